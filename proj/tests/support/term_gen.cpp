// SPDX-License-Identifier: Apache-2.0
#include "term_gen.hpp"

#include <bit>
#include <cmath>

namespace pcfr::testing {

TermGen::TermGen(std::uint64_t seed, GenOptions opts) : opts_(std::move(opts)), rng_(seed) {
  for (const auto& s : opts_.prims) prims_.push_back(default_registry().find(s));
}

bool TermGen::chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

std::size_t TermGen::below(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

double TermGen::numeral() {
  if (opts_.wild_numerals) {
    for (;;) {
      const double d = std::bit_cast<double>(rng_());
      if (std::isfinite(d)) return chance(0.5) ? d : std::ldexp(d, -std::ilogb(d));
    }
  }
  return static_cast<double>(static_cast<int>(below(13)) - 6) / 2.0;
}

Name TermGen::binder() {
  if (opts_.shadowing && !env_.empty() && chance(0.25)) return env_[below(env_.size())].first;
  return Name("v" + std::to_string(fresh_++ % 6));
}

Type TermGen::arg_type(std::size_t depth) {
  switch (below(depth > 2 ? 4 : 2)) {
    case 0:
    case 1: return real_type();
    case 2: return product({real_type(), real_type()});
    default: return arrow(real_type(), real_type());
  }
}

Program TermGen::program(std::size_t arity) {
  std::vector<Name> params;
  for (std::size_t i = 1; i <= arity; ++i) {
    params.emplace_back("x" + std::to_string(i));
    env_.emplace_back(params.back(), real_type());
  }
  Term body = gen(real_type(), opts_.max_depth);
  env_.clear();
  return make_program(std::move(body), std::move(params));
}

Term TermGen::closed(const Type& t) {
  env_.clear();
  return gen(t, opts_.max_depth);
}

Term TermGen::leaf(const Type& t, std::size_t depth) {
  std::vector<Name> hits;
  for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
    bool shadowed = false;
    for (auto jt = env_.rbegin(); jt != it; ++jt) shadowed |= jt->first == it->first;
    if (!shadowed && type_equal(it->second, t)) hits.push_back(it->first);
  }
  if (!hits.empty() && (!t->is_real() || chance(0.7))) return var(hits[below(hits.size())]);
  switch (t->kind()) {
    case TypeKind::Real: return mk_numeral(numeral());
    case TypeKind::Product: {
      std::vector<Term> parts;
      for (const auto& c : t->components()) parts.push_back(leaf(c, depth));
      return tuple(std::move(parts));
    }
    case TypeKind::Arrow: {
      const Name x = binder();
      env_.emplace_back(x, t->domain());
      Term body = leaf(t->codomain(), depth);
      env_.pop_back();
      return lam(x, t->domain(), std::move(body));
    }
  }
  return nullptr;
}

Term TermGen::gen(const Type& t, std::size_t depth) {
  if (depth == 0 || chance(0.05)) return leaf(t, depth);
  if (opts_.conditionals && chance(0.1)) {
    Term g = gen(real_type(), depth - 1);
    Term a = gen(t, depth - 1);
    return cond(std::move(g), std::move(a), gen(t, depth - 1));
  }
  switch (t->kind()) {
    case TypeKind::Real: return real_term(depth);
    case TypeKind::Product: {
      if (chance(0.2)) return leaf(t, depth);
      std::vector<Term> parts;
      for (const auto& c : t->components()) parts.push_back(gen(c, depth - 1));
      return tuple(std::move(parts));
    }
    case TypeKind::Arrow: {
      if (chance(0.15)) return leaf(t, depth);
      const Name x = binder();
      env_.emplace_back(x, t->domain());
      Term body = gen(t->codomain(), depth - 1);
      env_.pop_back();
      return lam(x, t->domain(), std::move(body));
    }
  }
  return nullptr;
}

Term TermGen::real_term(std::size_t depth) {
  const std::size_t d = depth - 1;
  const std::size_t roll = below(opts_.fixpoints ? 9 : 8);
  if (roll <= 2 && !prims_.empty()) {
    const Prim& p = prims_[below(prims_.size())];
    std::vector<Term> args;
    for (std::size_t i = 0; i < p->arity; ++i) args.push_back(gen(real_type(), d));
    return prim_app(p, std::move(args));
  }
  if (roll <= 4) {
    const Type a = arg_type(depth);
    Term f = gen(arrow(a, real_type()), d);
    return app(std::move(f), gen(a, d));
  }
  if (roll == 5) {
    const std::size_t i = 1 + below(2);
    std::vector<Type> comps{real_type(), arg_type(depth)};
    if (i == 2) std::swap(comps[0], comps[1]);
    return proj(i, 2, gen(product(std::move(comps)), d));
  }
  if (roll == 8) {
    const Name f("rec"), n("n");
    const Type rr = arrow(real_type(), real_type());
    env_.emplace_back(n, real_type());
    Term base = gen(real_type(), d);
    env_.pop_back();
    Term step = app(var(f), call("sub", {var(n), mk_numeral(1)}));
    Term body = lam(n, real_type(), cond(var(n), std::move(base), std::move(step)));
    return app(fix(f, rr, std::move(body)), gen(real_type(), d));
  }
  return leaf(real_type(), depth);
}

}  // namespace pcfr::testing
