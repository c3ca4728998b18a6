// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcfr/oracle.hpp"

namespace pcfr {

/// Branch choices and unfoldings of a deterministic head normalization.
struct BranchTrace {
  DecisionLog events;
  OutcomeKind outcome = OutcomeKind::NormalForm;

  /// Same outcome and the same events in order. Guard values are not
  /// compared: nearby inputs take the same branches with different guards.
  friend bool operator==(const BranchTrace& a, const BranchTrace& b);
};

BranchTrace branch_trace(const Program& p, std::span<const double> r, const EvalConfig& cfg = {});

struct PretraceResult {
  bool holds = false;
  /// Some fixpoint was not matched by any unfolding up to the bound.
  bool bound_hit = false;
  explicit operator bool() const { return holds; }
};

/// Decides t ⊑ m for a simple term t, searching fixpoint unfoldings of
/// depth 1..fix_bound. Free variables of m are traced by themselves.
/// Throws Error(NotSimple) if t contains a conditional or a fixpoint.
PretraceResult pretrace_check(const Term& t, const Term& m, std::size_t fix_bound = 8);

struct StabilityVerdict {
  enum class Kind { StableEmpirical, UnstableEmpirical, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::vector<double> center;
  double radius = 0.0;
  std::size_t probes = 0;
  std::uint64_t seed = 0;
  /// UnstableEmpirical: first probe whose trace differs from the center's.
  std::vector<double> witness;
  std::string reason;
};

std::string_view to_string(StabilityVerdict::Kind k);

/// Compares the branch trace at r with those at `probes` points drawn
/// uniformly from the ball of the given radius (the box for n > 3).
StabilityVerdict stability_probe(const Program& p, std::span<const double> r, double radius,
                                 std::size_t probes, std::uint64_t seed,
                                 const EvalConfig& cfg = {});

struct ScanOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  /// Worker threads; results do not depend on this value.
  std::size_t jobs = 1;
  std::size_t fail_cap = 100;
  /// Keep every sampled report (for CSV output).
  bool record_samples = false;
};

struct ScanSample {
  std::vector<double> point;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> value;
  std::optional<std::vector<double>> ad_forward;
  std::optional<std::vector<double>> ad_reverse;
  std::optional<std::vector<double>> fd;
};

struct ScanReport {
  std::vector<std::pair<double, double>> box;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t evaluated = 0;
  /// The program itself is undefined at the point.
  std::size_t divergent = 0;
  /// Includes the inconclusive points.
  std::size_t outside_diff_domain = 0;
  std::size_t inconclusive = 0;
  std::size_t agree = 0;
  std::size_t fail = 0;
  /// Sorted lexicographically, at most fail_cap entries.
  std::vector<std::vector<double>> fail_points;
  double fail_fraction = 0.0;
  std::vector<ScanSample> sample_log;
};

/// Monte-Carlo estimate of the failure set over a box.
ScanReport failure_scan(const Program& p, std::span<const std::pair<double, double>> box,
                        const ScanOptions& opts, const OracleConfig& cfg = {});

/// Uniform doubles in [0, 1) from a seeded 64-bit Mersenne twister; the
/// mapping is fixed so that seeds reproduce across standard libraries.
class UnitSampler {
 public:
  explicit UnitSampler(std::uint64_t seed) : rng_(seed) {}
  double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace pcfr
