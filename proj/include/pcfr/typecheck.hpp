// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pcfr/term.hpp"

namespace pcfr {

/// Ordered typing context; later bindings shadow earlier ones.
class TypingEnv {
 public:
  TypingEnv() = default;
  TypingEnv(std::initializer_list<std::pair<Name, Type>> bindings) : bindings_(bindings) {}

  /// x1:R, ..., xn:R.
  static TypingEnv ground(std::span<const Name> names);

  void push(Name x, Type t) { bindings_.emplace_back(x, std::move(t)); }
  void pop() { bindings_.pop_back(); }
  const Type* lookup(Name x) const;
  const std::vector<std::pair<Name, Type>>& bindings() const { return bindings_; }

 private:
  std::vector<std::pair<Name, Type>> bindings_;
};

/// The unique type of `m` under `env`. Throws TypeError.
Type infer(const TypingEnv& env, const Term& m);
std::optional<Type> try_infer(const TypingEnv& env, const Term& m);

/// A program of arity n: a term together with its ordered ground
/// parameters x1..xn.
struct Program {
  Term body;
  std::vector<Name> params;

  std::size_t arity() const { return params.size(); }
};

/// Parameters default to the free variables in first-occurrence order.
Program make_program(Term body);
Program make_program(Term body, std::vector<Name> params);

/// True iff x1:R..xn:R |- M : R^m (R^1 = R).
bool check_program(const Program& p, std::size_t m);
/// Spec-style form: free variables of M, padded with unused names up to n.
bool check_program(const Term& m, std::size_t n, std::size_t coarity);

/// Coarity of a well-typed program, or nothing when its type is not R^m.
std::optional<std::size_t> program_coarity(const Program& p);

}  // namespace pcfr
