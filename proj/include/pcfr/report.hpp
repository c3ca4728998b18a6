// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "pcfr/trace_lab.hpp"

namespace pcfr {

/// Version of every JSON document below, stored under "schema".
inline constexpr int kReportSchema = 1;

nlohmann::json to_json(const GradReport& r);
nlohmann::json to_json(const ScanReport& r, const std::string& program = {});
nlohmann::json to_json(const StabilityVerdict& v, const std::string& program = {});
nlohmann::json to_json(const BranchTrace& t);

/// One row per sample: coordinates, verdict, value, both AD gradients and
/// the finite-difference gradient. Missing values are empty cells.
void write_scan_csv(std::ostream& os, const ScanReport& r);

}  // namespace pcfr
