// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcfr/term.hpp"
#include "pcfr/typecheck.hpp"

namespace pcfr {

/// Deterministic reduction strategies. Every strategy evaluates the guard of
/// a conditional before choosing a branch and never reduces inside branches
/// except FullNormalize once the guard is stuck.
enum class Strategy {
  /// Leftmost-outermost among head contexts.
  HeadDeterministic,
  /// Weak reduction; arguments are values (lambdas, numerals, tuples of
  /// values) before beta fires.
  CallByValue,
  /// Weak reduction; arguments are passed unevaluated and primitive
  /// arguments are forced strictly left to right.
  CallByName,
  /// Leftmost-outermost over all contexts, including under binders.
  FullNormalize,
};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

enum class Branch { Then, Else };

struct Decision {
  enum class Kind { CondTaken, FixUnfolded };
  Kind kind = Kind::CondTaken;
  Branch branch = Branch::Then;
  double guard = 0.0;
  Name binder;

  static Decision cond_taken(Branch b, double guard) { return {Kind::CondTaken, b, guard, {}}; }
  static Decision fix_unfolded(Name f) { return {Kind::FixUnfolded, Branch::Then, 0.0, f}; }
};

using DecisionLog = std::vector<Decision>;

std::string to_string(const Decision& d);

struct EvalConfig {
  std::uint64_t fuel = 1'000'000;
  /// When set, every fixpoint is replaced by its approximant of this depth
  /// before evaluation.
  std::optional<std::size_t> fix_cap;
  bool record_decisions = false;
};

struct StepResult {
  Term term;
  std::optional<Decision> event;
};

/// Fires the redex selected by `strategy`, or returns nothing when there is
/// none. Throws PrimDomainError when a primitive is undefined at its
/// numeral arguments.
std::optional<StepResult> step(const Term& m, Strategy strategy);

enum class OutcomeKind { NormalForm, FuelExhausted, PrimDomainError, Stuck };

std::string_view to_string(OutcomeKind k);

struct EvalOutcome {
  OutcomeKind kind = OutcomeKind::NormalForm;
  /// Final term for NormalForm / Stuck, last term reached otherwise.
  Term term;
  std::uint64_t steps = 0;
  DecisionLog decisions;
  /// PrimDomainError details.
  std::string symbol;
  std::vector<double> args;

  bool ok() const { return kind == OutcomeKind::NormalForm; }
};

/// Iterates `step` until normal form, fuel exhaustion or a domain error. A
/// closed term with no redex that is not a value is reported Stuck.
EvalOutcome normalize(const Term& m, Strategy strategy, const EvalConfig& cfg);

/// Numerals of a normal form of ground type (a numeral or a tuple of them).
std::optional<std::vector<double>> decode_numerals(const Term& t);

/// [[M]]^S(args): substitutes numerals for the parameters, normalizes and
/// decodes. Nothing means bottom. Throws TypeError (IllTyped) when the
/// program is not a ground program of arity |args|.
std::optional<std::vector<double>> eval_program(const Program& p, std::span<const double> args,
                                                Strategy strategy, const EvalConfig& cfg);

/// Substitutes `args` for the parameters and normalizes; no type check.
EvalOutcome run_program(const Program& p, std::span<const double> args, Strategy strategy,
                        const EvalConfig& cfg);

}  // namespace pcfr
