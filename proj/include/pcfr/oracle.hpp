// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcfr/ad.hpp"

namespace pcfr {

struct OracleConfig {
  /// Strictly decreasing step sizes for the one-sided quotients.
  std::vector<double> h_ladder{1e-4, 1e-5, 1e-6};
  /// Relative agreement required between quotients at the two smallest steps.
  double probe_tol = 1e-3;
  double rtol = 1e-4;
  double atol = 1e-6;
  /// Strategy for both the oracle and the gradient terms. Call-by-value
  /// avoids the duplication of unevaluated tangents that head reduction
  /// incurs on recursive programs.
  Strategy strategy = Strategy::CallByValue;
  EvalConfig eval;
};

/// Central differences at step h; nothing if any evaluation is bottom.
std::optional<std::vector<double>> fd_gradient(const Program& p, std::span<const double> r,
                                               double h, Strategy strategy = Strategy::CallByValue,
                                               const EvalConfig& cfg = {});

struct DiffProbe {
  enum class Kind { Differentiable, NotDifferentiable, Undefined, Unknown };
  Kind kind = Kind::Unknown;
  /// Differentiable: central differences at the smallest step.
  std::vector<double> grad;
  /// NotDifferentiable: 1-based axis and one-sided slopes there.
  std::size_t axis = 0;
  double left_slope = 0.0;
  double right_slope = 0.0;
  /// Set when the function has a jump along `axis`.
  bool jump = false;
  std::string reason;
};

std::string_view to_string(DiffProbe::Kind k);

/// Empirical differentiability test at r. Per axis, one-sided quotients
/// must settle across the two smallest steps; a one-sided increment that
/// stays constant as h shrinks is reported as a jump.
DiffProbe diff_probe(const Program& p, std::span<const double> r, const OracleConfig& cfg = {});

enum class Verdict { Agree, Fail, OutsideDiffDomain, Inconclusive };

std::string_view to_string(Verdict v);

struct GradReport {
  std::vector<double> point;
  std::optional<double> value;
  std::optional<std::vector<double>> ad_forward;
  std::optional<std::vector<double>> ad_reverse;
  DiffProbe fd;
  Verdict verdict = Verdict::Inconclusive;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
};

/// Checks AD against the oracle for one program; the transformations are
/// computed once and reused at every point.
class GradChecker {
 public:
  /// Throws TypeError(IllTyped) unless p is a ground program of coarity 1.
  explicit GradChecker(Program p, OracleConfig cfg = {});

  GradReport at(std::span<const double> r) const;

  const Program& program() const { return program_; }
  const OracleConfig& config() const { return cfg_; }

 private:
  Program program_;
  OracleConfig cfg_;
  GradProgram forward_;
  GradProgram reverse_;
};

GradReport compare_at(const Program& p, std::span<const double> r, const OracleConfig& cfg = {});

}  // namespace pcfr
