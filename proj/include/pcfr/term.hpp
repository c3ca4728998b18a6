// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "pcfr/error.hpp"
#include "pcfr/name.hpp"
#include "pcfr/primitives.hpp"
#include "pcfr/type.hpp"

namespace pcfr {

enum class TermKind { Var, Prim, Lam, App, Tuple, Proj, Cond, Fix };

class TermNode;
/// Terms are immutable and freely shared between threads and evaluations.
using Term = std::shared_ptr<const TermNode>;
/// Children are stored inline for the common arities.
using TermKids = boost::container::small_vector<Term, 3>;

class TermNode {
 public:
  TermKind kind() const { return kind_; }

  /// Var name, or binder of Lam / Fix.
  Name name() const { return name_; }
  /// Binder annotation of Lam / Fix.
  const Type& binder_type() const { return type_; }

  /// Primitive symbol; null for numerals.
  const Prim& prim() const { return prim_; }
  bool is_numeral() const { return kind_ == TermKind::Prim && !prim_; }
  double value() const { return value_; }
  /// Pointwise lifting width of a primitive application: with lanes = n > 1
  /// the arguments and result have type R^n and phi is applied per lane.
  std::size_t lanes() const { return lanes_; }

  std::span<const Term> kids() const { return {kids_.data(), kids_.size()}; }
  const Term& kid(std::size_t i) const { return kids_[i]; }
  std::size_t arity() const { return kids_.size(); }

  /// Lam / Fix body.
  const Term& body() const { return kids_[0]; }
  const Term& fun() const { return kids_[0]; }
  const Term& arg() const { return kids_[1]; }
  const Term& guard() const { return kids_[0]; }
  const Term& then_branch() const { return kids_[1]; }
  const Term& else_branch() const { return kids_[2]; }

  /// Proj: 1-based index and tuple width.
  std::size_t index() const { return index_; }
  std::size_t width() const { return width_; }

  /// Number of syntax nodes; type annotations are not counted.
  std::size_t size() const { return size_; }
  /// Cached free-variable summary. Exact for up to kInlineFree variables;
  /// beyond that `may_have_free` answers conservatively.
  bool closed() const { return fv_count_ == 0 && !fv_overflow_; }
  bool may_have_free(Name x) const;
  bool contains_fix_or_cond() const { return impure_; }

  SourceSpan span() const { return span_; }

  struct Private;
  TermNode(const Private&, TermKind kind, TermKids&& kids);

 private:
  friend struct TermBuilder;
  TermKind kind_;
  Name name_;
  Type type_;
  Prim prim_;
  double value_ = 0.0;
  std::size_t lanes_ = 1;
  std::size_t index_ = 0;
  std::size_t width_ = 0;
  TermKids kids_;
  std::size_t size_ = 1;
  static constexpr std::size_t kInlineFree = 4;
  std::array<Name, kInlineFree> fv_{};
  std::uint8_t fv_count_ = 0;
  bool fv_overflow_ = false;
  bool impure_ = false;
  SourceSpan span_;
};

// Constructors. Tuples of one component and projections pi_1^1 collapse to
// their argument.
Term var(Name name, SourceSpan span = {});
Term var(std::string_view name);
Term mk_numeral(double value, SourceSpan span = {});
Term prim_app(Prim symbol, std::vector<Term> args, SourceSpan span = {});
Term lifted_prim_app(Prim symbol, std::size_t lanes, std::vector<Term> args,
                     SourceSpan span = {});
/// Lifted numeral: the R^lanes vector with every lane equal to `value`.
Term lifted_numeral(double value, std::size_t lanes, SourceSpan span = {});
Term lam(Name binder, Type binder_type, Term body, SourceSpan span = {});
Term app(Term fun, Term arg, SourceSpan span = {});
Term apps(Term fun, std::span<const Term> args);
Term tuple(std::vector<Term> components, SourceSpan span = {});
Term proj(std::size_t index, std::size_t width, Term body, SourceSpan span = {});
Term cond(Term guard, Term then_branch, Term else_branch, SourceSpan span = {});
Term fix(Name binder, Type binder_type, Term body, SourceSpan span = {});

/// Same node with its children replaced; the arity must not change.
Term with_kids(const Term& t, TermKids&& kids);
/// Binary primitive from the default registry by name ("add", "mul", ...).
Term call(const std::string& symbol, std::vector<Term> args);
/// Left-nested binary sum; the empty sum is the numeral 0.
Term sum(std::vector<Term> terms);

bool is_value(const Term& t);
bool is_numeral_tuple(const Term& t);

/// Exact free variables in first-occurrence order.
std::vector<Name> free_vars(const Term& t);
bool occurs_free(Name x, const Term& t);

/// Capture-avoiding substitution M{N/x}.
Term subst(const Term& m, Name x, const Term& n);
/// Simultaneous substitution of closed terms.
Term subst_closed(const Term& m, std::span<const Name> xs, std::span<const Term> ns);

bool alpha_eq(const Term& a, const Term& b);

std::size_t term_size(const Term& t);

/// iota_i^n = \x:R. <0,..,x,..,0> with x at position i.
Term iota(std::size_t i, std::size_t n);

/// Omega at an arrow type: fix g. g.
Term omega(const Type& arrow_type);

/// Fixpoint approximant fix_k f M; `depth` empty means k = infinity.
Term fix_approx(Name f, const Type& type, const Term& body,
                std::optional<std::size_t> depth);

/// Replaces every fixpoint of `t` by its approximant of the given depth.
Term cap_fixpoints(const Term& t, std::size_t depth);

/// True iff `t` contains no conditional and no fixpoint.
bool is_simple(const Term& t);

}  // namespace pcfr
