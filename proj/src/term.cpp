// SPDX-License-Identifier: Apache-2.0
#include "pcfr/term.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace pcfr {

struct TermNode::Private {};

TermNode::TermNode(const Private&, TermKind kind, TermKids&& kids)
    : kind_(kind), kids_(std::move(kids)) {}

bool TermNode::may_have_free(Name x) const {
  if (fv_overflow_) return true;
  for (std::uint8_t i = 0; i < fv_count_; ++i) {
    if (fv_[i] == x) return true;
  }
  return false;
}

namespace {

// Terms are allocated and dropped at a high rate during reduction; a
// per-thread free list of fixed-size blocks avoids most malloc traffic.
// Blocks released on another thread simply join that thread's list.
class BlockPool {
 public:
  void* take(std::size_t bytes) {
    if (bytes != block_ || !head_) {
      if (block_ == 0) block_ = bytes;
      return ::operator new(bytes);
    }
    Free* f = head_;
    head_ = f->next;
    --count_;
    return f;
  }

  void give(void* p, std::size_t bytes) {
    if (bytes != block_ || count_ >= kMaxFree) {
      ::operator delete(p);
      return;
    }
    auto* f = static_cast<Free*>(p);
    f->next = head_;
    head_ = f;
    ++count_;
  }

  ~BlockPool() {
    while (head_) {
      Free* f = head_;
      head_ = f->next;
      ::operator delete(f);
    }
  }

 private:
  struct Free {
    Free* next;
  };
  static constexpr std::size_t kMaxFree = 1 << 16;
  Free* head_ = nullptr;
  std::size_t block_ = 0;
  std::size_t count_ = 0;
};

BlockPool& pool() {
  thread_local BlockPool p;
  return p;
}

template <typename T>
struct PoolAllocator {
  using value_type = T;
  PoolAllocator() = default;
  template <typename U>
  PoolAllocator(const PoolAllocator<U>&) {}
  T* allocate(std::size_t n) {
    if (n != 1) return static_cast<T*>(::operator new(n * sizeof(T)));
    return static_cast<T*>(pool().take(sizeof(T)));
  }
  void deallocate(T* p, std::size_t n) {
    if (n != 1) {
      ::operator delete(p);
      return;
    }
    pool().give(p, sizeof(T));
  }
  template <typename U>
  bool operator==(const PoolAllocator<U>&) const {
    return true;
  }
};

template <typename... Ts>
TermKids kids_of(Ts&&... ts) {
  TermKids k;
  (k.push_back(std::forward<Ts>(ts)), ...);
  return k;
}

TermKids kids_of(std::vector<Term>&& v) {
  return TermKids(std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
}

}  // namespace

struct TermBuilder {
  std::shared_ptr<TermNode> node;

  TermBuilder(TermKind kind, TermKids&& kids, SourceSpan span)
      : node(std::allocate_shared<TermNode>(PoolAllocator<TermNode>{}, TermNode::Private{}, kind,
                                            std::move(kids))) {
    node->span_ = span;
  }

  void set_name(Name x) { node->name_ = x; }
  void set_type(Type t) { node->type_ = std::move(t); }
  void set_value(double v) { node->value_ = v; }
  void set_prim(Prim p) { node->prim_ = std::move(p); }
  void set_lanes(std::size_t l) { node->lanes_ = l; }
  void set_proj(std::size_t index, std::size_t width) {
    node->index_ = index;
    node->width_ = width;
  }

  void add_free(Name x) {
    auto& n = *node;
    if (n.fv_overflow_) return;
    for (std::uint8_t i = 0; i < n.fv_count_; ++i) {
      if (n.fv_[i] == x) return;
    }
    if (n.fv_count_ == TermNode::kInlineFree) {
      n.fv_overflow_ = true;
      return;
    }
    n.fv_[n.fv_count_++] = x;
  }

  Term finish() {
    auto& n = *node;
    n.size_ = 1;
    n.impure_ = n.kind_ == TermKind::Cond || n.kind_ == TermKind::Fix;
    if (n.kind_ == TermKind::Var) add_free(n.name_);
    const bool binds = n.kind_ == TermKind::Lam || n.kind_ == TermKind::Fix;
    for (const auto& k : n.kids_) {
      n.size_ += k->size_;
      n.impure_ = n.impure_ || k->impure_;
      if (k->fv_overflow_) {
        // Precision is lost; keep the over-approximation.
        n.fv_overflow_ = true;
      } else {
        for (std::uint8_t i = 0; i < k->fv_count_; ++i) {
          if (!(binds && k->fv_[i] == n.name_)) add_free(k->fv_[i]);
        }
      }
    }
    if (binds && n.fv_overflow_) {
      // Recompute exactly; overflow on a binder is rare.
      auto exact = free_vars(n.kids_[0]);
      std::erase(exact, n.name_);
      n.fv_overflow_ = false;
      n.fv_count_ = 0;
      for (Name x : exact) add_free(x);
    }
    return node;
  }
};

Term var(Name name, SourceSpan span) {
  TermBuilder b(TermKind::Var, {}, span);
  b.set_name(name);
  return b.finish();
}

Term var(std::string_view name) { return var(Name(name)); }

Term mk_numeral(double value, SourceSpan span) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteNumeral, "numeral must be finite", span);
  }
  TermBuilder b(TermKind::Prim, {}, span);
  b.set_value(value);
  return b.finish();
}

Term lifted_numeral(double value, std::size_t lanes, SourceSpan span) {
  if (lanes == 0) throw Error(ErrorCode::InvalidArgument, "lanes must be positive", span);
  auto t = mk_numeral(value, span);
  if (lanes == 1) return t;
  TermBuilder b(TermKind::Prim, {}, span);
  b.set_value(value);
  b.set_lanes(lanes);
  return b.finish();
}

Term lifted_prim_app(Prim symbol, std::size_t lanes, std::vector<Term> args, SourceSpan span) {
  if (!symbol) throw Error(ErrorCode::UnknownPrimitive, "null primitive", span);
  if (lanes == 0) throw Error(ErrorCode::InvalidArgument, "lanes must be positive", span);
  if (args.size() != symbol->arity) {
    throw Error(ErrorCode::ArityMismatch,
                symbol->name + " expects " + std::to_string(symbol->arity) + " arguments, got " +
                    std::to_string(args.size()),
                span);
  }
  TermBuilder b(TermKind::Prim, kids_of(std::move(args)), span);
  b.set_prim(std::move(symbol));
  b.set_lanes(lanes);
  return b.finish();
}

Term prim_app(Prim symbol, std::vector<Term> args, SourceSpan span) {
  return lifted_prim_app(std::move(symbol), 1, std::move(args), span);
}

Term lam(Name binder, Type binder_type, Term body, SourceSpan span) {
  TermBuilder b(TermKind::Lam, kids_of(std::move(body)), span);
  b.set_name(binder);
  b.set_type(std::move(binder_type));
  return b.finish();
}

Term app(Term fun, Term arg, SourceSpan span) {
  return TermBuilder(TermKind::App, kids_of(std::move(fun), std::move(arg)), span).finish();
}

Term apps(Term fun, std::span<const Term> args) {
  for (const auto& a : args) fun = app(std::move(fun), a);
  return fun;
}

Term tuple(std::vector<Term> components, SourceSpan span) {
  if (components.size() == 1) return std::move(components.front());
  return TermBuilder(TermKind::Tuple, kids_of(std::move(components)), span).finish();
}

Term proj(std::size_t index, std::size_t width, Term body, SourceSpan span) {
  if (index < 1 || index > width) {
    throw Error(ErrorCode::IndexOutOfRange,
                "projection index " + std::to_string(index) + " outside 1.." +
                    std::to_string(width),
                span);
  }
  if (width == 1) return body;
  TermBuilder b(TermKind::Proj, kids_of(std::move(body)), span);
  b.set_proj(index, width);
  return b.finish();
}

Term cond(Term guard, Term then_branch, Term else_branch, SourceSpan span) {
  return TermBuilder(TermKind::Cond,
                     kids_of(std::move(guard), std::move(then_branch), std::move(else_branch)),
                     span)
      .finish();
}

Term fix(Name binder, Type binder_type, Term body, SourceSpan span) {
  TermBuilder b(TermKind::Fix, kids_of(std::move(body)), span);
  b.set_name(binder);
  b.set_type(std::move(binder_type));
  return b.finish();
}

Term call(const std::string& symbol, std::vector<Term> args) {
  auto p = default_registry().find(symbol);
  if (!p) throw Error(ErrorCode::UnknownPrimitive, "unknown primitive " + symbol);
  return prim_app(std::move(p), std::move(args));
}

Term sum(std::vector<Term> terms) {
  if (terms.empty()) return mk_numeral(0.0);
  Term acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = call("add", {acc, terms[i]});
  return acc;
}

Term with_kids(const Term& t, TermKids&& kids) {
  TermBuilder b(t->kind(), std::move(kids), t->span());
  b.set_name(t->name());
  b.set_type(t->binder_type());
  b.set_prim(t->prim());
  b.set_value(t->value());
  b.set_lanes(t->lanes());
  b.set_proj(t->index(), t->width());
  return b.finish();
}

bool is_value(const Term& t) {
  switch (t->kind()) {
    case TermKind::Lam:
    case TermKind::Var:
      return true;
    case TermKind::Prim:
      return t->is_numeral() && t->lanes() == 1;
    case TermKind::Tuple:
      return std::all_of(t->kids().begin(), t->kids().end(), is_value);
    default:
      return false;
  }
}

bool is_numeral_tuple(const Term& t) {
  if (t->kind() == TermKind::Prim) return t->is_numeral() && t->lanes() == 1;
  if (t->kind() != TermKind::Tuple) return false;
  return std::all_of(t->kids().begin(), t->kids().end(),
                     [](const Term& k) { return k->is_numeral() && k->lanes() == 1; });
}

namespace {

void collect_free(const Term& t, std::vector<Name>& bound, std::vector<Name>& out) {
  if (t->closed()) return;
  switch (t->kind()) {
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), t->name()) == bound.end() &&
          std::find(out.begin(), out.end(), t->name()) == out.end()) {
        out.push_back(t->name());
      }
      return;
    case TermKind::Lam:
    case TermKind::Fix:
      bound.push_back(t->name());
      collect_free(t->body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& k : t->kids()) collect_free(k, bound, out);
  }
}

template <typename F>
Term rebuild(const Term& t, F&& f) {
  TermKids kids;
  bool changed = false;
  for (const auto& k : t->kids()) {
    kids.push_back(f(k));
    changed = changed || kids.back() != k;
  }
  if (!changed) return t;
  return with_kids(t, std::move(kids));
}

struct Substitution {
  Name x;
  const Term& n;
  std::optional<std::vector<Name>> n_free;

  const std::vector<Name>& free_of_n() {
    if (!n_free) n_free = free_vars(n);
    return *n_free;
  }

  bool captures(Name y) {
    if (n->closed()) return false;
    const auto& fv = free_of_n();
    return std::find(fv.begin(), fv.end(), y) != fv.end();
  }

  Term run(const Term& m) {
    if (!m->may_have_free(x)) return m;
    switch (m->kind()) {
      case TermKind::Var:
        return m->name() == x ? n : m;
      case TermKind::Lam:
      case TermKind::Fix: {
        const Name y = m->name();
        if (y == x) return m;
        Term body = m->body();
        Name binder = y;
        if (captures(y) && occurs_free(x, body)) {
          binder = Name::fresh(y);
          body = subst(body, y, var(binder));
        }
        Term new_body = run(body);
        if (binder == y && new_body == m->body()) return m;
        return m->kind() == TermKind::Lam ? lam(binder, m->binder_type(), new_body, m->span())
                                          : fix(binder, m->binder_type(), new_body, m->span());
      }
      default:
        return rebuild(m, [this](const Term& k) { return run(k); });
    }
  }
};

bool alpha_eq_rec(const Term& a, const Term& b, std::vector<std::pair<Name, Name>>& env) {
  if (a == b && env.empty()) return true;
  if (a->kind() != b->kind() || a->arity() != b->arity()) return false;
  switch (a->kind()) {
    case TermKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        const bool la = it->first == a->name();
        const bool lb = it->second == b->name();
        if (la || lb) return la && lb;
      }
      return a->name() == b->name();
    }
    case TermKind::Prim:
      if (a->is_numeral() != b->is_numeral() || a->lanes() != b->lanes()) return false;
      if (a->is_numeral()) {
        return std::bit_cast<std::uint64_t>(a->value()) == std::bit_cast<std::uint64_t>(b->value());
      }
      if (a->prim()->name != b->prim()->name) return false;
      break;
    case TermKind::Lam:
    case TermKind::Fix: {
      if (!type_equal(a->binder_type(), b->binder_type())) return false;
      env.emplace_back(a->name(), b->name());
      const bool eq = alpha_eq_rec(a->body(), b->body(), env);
      env.pop_back();
      return eq;
    }
    case TermKind::Proj:
      if (a->index() != b->index() || a->width() != b->width()) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a->arity(); ++i) {
    if (!alpha_eq_rec(a->kid(i), b->kid(i), env)) return false;
  }
  return true;
}

}  // namespace

std::vector<Name> free_vars(const Term& t) {
  std::vector<Name> bound;
  std::vector<Name> out;
  collect_free(t, bound, out);
  return out;
}

bool occurs_free(Name x, const Term& t) {
  if (!t->may_have_free(x)) return false;
  switch (t->kind()) {
    case TermKind::Var:
      return t->name() == x;
    case TermKind::Lam:
    case TermKind::Fix:
      return t->name() != x && occurs_free(x, t->body());
    default:
      return std::any_of(t->kids().begin(), t->kids().end(),
                         [x](const Term& k) { return occurs_free(x, k); });
  }
}

Term subst(const Term& m, Name x, const Term& n) {
  Substitution s{x, n, std::nullopt};
  return s.run(m);
}

Term subst_closed(const Term& m, std::span<const Name> xs, std::span<const Term> ns) {
  Term out = m;
  for (std::size_t i = 0; i < xs.size(); ++i) out = subst(out, xs[i], ns[i]);
  return out;
}

bool alpha_eq(const Term& a, const Term& b) {
  std::vector<std::pair<Name, Name>> env;
  return alpha_eq_rec(a, b, env);
}

std::size_t term_size(const Term& t) { return t->size(); }

Term iota(std::size_t i, std::size_t n) {
  if (i < 1 || i > n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "injection index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  }
  const Name x("x");
  std::vector<Term> comps;
  comps.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) comps.push_back(j == i ? var(x) : mk_numeral(0.0));
  return lam(x, real_type(), tuple(std::move(comps)));
}

Term omega(const Type& arrow_type) {
  if (!arrow_type->is_arrow()) {
    throw Error(ErrorCode::NonArrowFixType, "Omega requires an arrow type, got " +
                                                to_string(arrow_type));
  }
  const Name g("g");
  return fix(g, arrow_type, var(g));
}

Term fix_approx(Name f, const Type& type, const Term& body, std::optional<std::size_t> depth) {
  if (!type->is_arrow()) {
    throw Error(ErrorCode::NonArrowFixType,
                "fixpoints exist only at arrow types, got " + to_string(type));
  }
  if (!depth) return fix(f, type, body);
  Term approx = omega(type);
  Name x("x");
  if (occurs_free(x, body)) x = Name::fresh(x);
  const Term unfold = lam(f, type, body);
  for (std::size_t k = 0; k < *depth; ++k) {
    approx = app(unfold, lam(x, type->domain(), app(approx, var(x))));
  }
  return approx;
}

Term cap_fixpoints(const Term& t, std::size_t depth) {
  if (!t->contains_fix_or_cond()) return t;
  if (t->kind() == TermKind::Fix) {
    return fix_approx(t->name(), t->binder_type(), cap_fixpoints(t->body(), depth), depth);
  }
  return rebuild(t, [depth](const Term& k) { return cap_fixpoints(k, depth); });
}

bool is_simple(const Term& t) { return !t->contains_fix_or_cond(); }

}  // namespace pcfr
