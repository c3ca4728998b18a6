// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pcfr/eval.hpp"
#include "pcfr/typecheck.hpp"

namespace pcfr {

enum class AdMode { Forward, Reverse };

std::string_view to_string(AdMode m);
std::optional<AdMode> parse_ad_mode(std::string_view text);

/// Lifted type. Forward: R becomes the flattened tuple R^{n+1} (primal
/// first, then the n tangent components). Reverse: R becomes
/// R x (R -> R^n). Arrows and products are mapped componentwise.
Type ad_type(const Type& a, AdMode mode, std::size_t n);

TypingEnv ad_env(const TypingEnv& env, AdMode mode, std::size_t n);

/// The source-to-source transformation. Primitive applications expand to
/// the chain-rule template as an explicit beta-redex; no simplification is
/// performed. Throws Error(MissingPartials) when a primitive lacks a
/// registered derivative and Error(InvalidArgument) on lifted primitives.
Term ad_term(const Term& m, AdMode mode, std::size_t n,
             const PrimRegistry& reg = default_registry());

/// Gradient program of Eqs. for a program of arity n and coarity 1. The
/// transformed body is computed once; `at` only substitutes seeds.
class GradProgram {
 public:
  /// Throws TypeError(IllTyped) unless `p` is a ground program of coarity 1.
  GradProgram(const Program& p, AdMode mode, const PrimRegistry& reg = default_registry());

  AdMode mode() const { return mode_; }
  std::size_t arity() const { return params_.size(); }
  const Term& transformed() const { return transformed_; }

  /// Closed term whose normal form is the gradient at r (a numeral for
  /// n = 1, an n-tuple of numerals otherwise).
  Term at(std::span<const double> r) const;

  /// Normalizes `at(r)`; nothing when AD diverges or errs.
  std::optional<std::vector<double>> evaluate(std::span<const double> r, Strategy strategy,
                                              const EvalConfig& cfg) const;

 private:
  AdMode mode_;
  std::vector<Name> params_;
  Term transformed_;
};

/// term_size of ad_term(m, mode, n) for each n.
std::vector<std::pair<std::size_t, std::size_t>> transform_size_curve(
    const Term& m, AdMode mode, std::span<const std::size_t> ns);

}  // namespace pcfr
