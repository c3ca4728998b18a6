// SPDX-License-Identifier: Apache-2.0
#include "pcfr/ad.hpp"

namespace pcfr {

std::string_view to_string(AdMode m) { return m == AdMode::Forward ? "fwd" : "rev"; }

std::optional<AdMode> parse_ad_mode(std::string_view text) {
  if (text == "fwd" || text == "forward") return AdMode::Forward;
  if (text == "rev" || text == "reverse") return AdMode::Reverse;
  return std::nullopt;
}

namespace {

Type lifted_real(AdMode mode, std::size_t n) {
  if (mode == AdMode::Forward) return real_power(n + 1);
  return product({real_type(), arrow(real_type(), real_power(n))});
}

class Transformer {
 public:
  Transformer(AdMode mode, std::size_t n, const PrimRegistry& reg)
      : mode_(mode), n_(n), reg_(reg), dreal_(lifted_real(mode, n)) {}

  Term run(const Term& t) {
    switch (t->kind()) {
      case TermKind::Var: return t;
      case TermKind::Lam:
        return lam(t->name(), ad_type(t->binder_type(), mode_, n_), run(t->body()), t->span());
      case TermKind::Fix:
        return fix(t->name(), ad_type(t->binder_type(), mode_, n_), run(t->body()), t->span());
      case TermKind::App: return app(run(t->fun()), run(t->arg()), t->span());
      case TermKind::Tuple: {
        std::vector<Term> comps;
        comps.reserve(t->arity());
        for (const auto& k : t->kids()) comps.push_back(run(k));
        return tuple(std::move(comps), t->span());
      }
      case TermKind::Proj: return proj(t->index(), t->width(), run(t->body()), t->span());
      case TermKind::Cond:
        return cond(primal(run(t->guard())), run(t->then_branch()), run(t->else_branch()),
                    t->span());
      case TermKind::Prim: return t->is_numeral() ? numeral(t) : primitive(t);
    }
    return t;
  }

 private:
  std::size_t width() const { return mode_ == AdMode::Forward ? n_ + 1 : 2; }

  Term primal(Term z) const { return proj(1, width(), std::move(z)); }

  Term numeral(const Term& t) const {
    if (t->lanes() != 1) {
      throw Error(ErrorCode::InvalidArgument, "lifted numerals cannot be differentiated", t->span());
    }
    if (mode_ == AdMode::Forward) {
      std::vector<Term> comps{t};
      for (std::size_t j = 0; j < n_; ++j) comps.push_back(mk_numeral(0.0));
      return tuple(std::move(comps), t->span());
    }
    return tuple({t, lam(Name("a"), real_type(), lifted_numeral(0.0, n_))}, t->span());
  }

  Prim partial(const PrimEntry& p, std::size_t i, SourceSpan span) const {
    Prim d = i < p.partials.size() ? reg_.find(p.partials[i]) : nullptr;
    if (!d || d->arity != p.arity) {
      throw Error(ErrorCode::MissingPartials, "no derivative registered for " + p.name +
                                                  " in argument " + std::to_string(i + 1),
                  span);
    }
    return d;
  }

  Term primitive(const Term& t) {
    if (t->lanes() != 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "lifted primitive " + t->prim()->name + " cannot be differentiated", t->span());
    }
    const PrimEntry& p = *t->prim();
    const std::size_t k = p.arity;
    std::vector<Name> zs;
    std::vector<Term> primals;
    for (std::size_t i = 0; i < k; ++i) {
      zs.emplace_back(k == 1 ? std::string("z") : "z" + std::to_string(i + 1));
      primals.push_back(primal(var(zs.back())));
    }
    const Term value = prim_app(t->prim(), primals);

    Term body;
    if (mode_ == AdMode::Forward) {
      std::vector<Term> comps{value};
      for (std::size_t j = 1; j <= n_; ++j) {
        std::vector<Term> terms;
        for (std::size_t i = 0; i < k; ++i) {
          terms.push_back(call("mul", {prim_app(partial(p, i, t->span()), primals),
                                       proj(j + 1, n_ + 1, var(zs[i]))}));
        }
        comps.push_back(sum(std::move(terms)));
      }
      body = tuple(std::move(comps));
    } else {
      const Name a("a");
      const Prim add = reg_.find("add");
      Term acc;
      for (std::size_t i = 0; i < k; ++i) {
        Term contrib = app(proj(2, 2, var(zs[i])),
                           call("mul", {prim_app(partial(p, i, t->span()), primals), var(a)}));
        acc = acc ? lifted_prim_app(add, n_, {acc, contrib}) : contrib;
      }
      if (!acc) acc = lifted_numeral(0.0, n_);
      body = tuple({value, lam(a, real_type(), acc)});
    }

    Term fn = body;
    for (std::size_t i = k; i-- > 0;) fn = lam(zs[i], dreal_, fn);
    std::vector<Term> args;
    args.reserve(k);
    for (const auto& m : t->kids()) args.push_back(run(m));
    return apps(fn, args);
  }

  AdMode mode_;
  std::size_t n_;
  const PrimRegistry& reg_;
  Type dreal_;
};

}  // namespace

Type ad_type(const Type& a, AdMode mode, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "gradient dimension must be positive");
  switch (a->kind()) {
    case TypeKind::Real: return lifted_real(mode, n);
    case TypeKind::Arrow:
      return arrow(ad_type(a->domain(), mode, n), ad_type(a->codomain(), mode, n));
    case TypeKind::Product: {
      std::vector<Type> comps;
      comps.reserve(a->width());
      for (const auto& c : a->components()) comps.push_back(ad_type(c, mode, n));
      return product(std::move(comps));
    }
  }
  return a;
}

TypingEnv ad_env(const TypingEnv& env, AdMode mode, std::size_t n) {
  TypingEnv out;
  for (const auto& [x, t] : env.bindings()) out.push(x, ad_type(t, mode, n));
  return out;
}

Term ad_term(const Term& m, AdMode mode, std::size_t n, const PrimRegistry& reg) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "gradient dimension must be positive");
  return Transformer(mode, n, reg).run(m);
}

GradProgram::GradProgram(const Program& p, AdMode mode, const PrimRegistry& reg)
    : mode_(mode), params_(p.params) {
  if (p.arity() == 0 || !check_program(p, 1)) {
    throw TypeError(ErrorCode::IllTyped,
                    "gradients need a program of positive arity and coarity 1");
  }
  const std::size_t n = p.arity();
  Term d = ad_term(p.body, mode, n, reg);
  if (mode == AdMode::Forward) {
    if (n == 1) {
      transformed_ = proj(2, 2, d);
    } else {
      const Name z("z");
      std::vector<Term> tangent;
      for (std::size_t j = 2; j <= n + 1; ++j) tangent.push_back(proj(j, n + 1, var(z)));
      transformed_ = app(lam(z, real_power(n + 1), tuple(std::move(tangent))), d);
    }
  } else {
    transformed_ = app(proj(2, 2, d), mk_numeral(1.0));
  }
}

Term GradProgram::at(std::span<const double> r) const {
  const std::size_t n = arity();
  if (r.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n) + " coordinates, got " +
                                                std::to_string(r.size()));
  }
  std::vector<Term> seeds;
  seeds.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mode_ == AdMode::Forward) {
      std::vector<Term> comps{mk_numeral(r[i])};
      for (std::size_t j = 0; j < n; ++j) comps.push_back(mk_numeral(j == i ? 1.0 : 0.0));
      seeds.push_back(tuple(std::move(comps)));
    } else {
      seeds.push_back(tuple({mk_numeral(r[i]), iota(i + 1, n)}));
    }
  }
  return subst_closed(transformed_, params_, seeds);
}

std::optional<std::vector<double>> GradProgram::evaluate(std::span<const double> r,
                                                         Strategy strategy,
                                                         const EvalConfig& cfg) const {
  auto out = normalize(at(r), strategy, cfg);
  if (!out.ok()) return std::nullopt;
  return decode_numerals(out.term);
}

std::vector<std::pair<std::size_t, std::size_t>> transform_size_curve(
    const Term& m, AdMode mode, std::span<const std::size_t> ns) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) out.emplace_back(n, term_size(ad_term(m, mode, n)));
  return out;
}

}  // namespace pcfr
