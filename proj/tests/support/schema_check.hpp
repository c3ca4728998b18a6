// SPDX-License-Identifier: Apache-2.0
// Validator for the subset of JSON Schema used by docs/schema: type (string
// or list), const, enum, required, properties, additionalProperties (bool),
// items, minimum, minItems, maxItems.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace pcfr::testing {

/// Violations as "path: message"; empty when the document conforms.
std::vector<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema);

nlohmann::json load_schema(const std::filesystem::path& path);

}  // namespace pcfr::testing
