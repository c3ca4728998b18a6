// SPDX-License-Identifier: Apache-2.0
#include "pcfr/eval.hpp"

#include <cmath>

namespace pcfr {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::HeadDeterministic: return "head";
    case Strategy::CallByValue: return "cbv";
    case Strategy::CallByName: return "cbn";
    case Strategy::FullNormalize: return "full";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "head") return Strategy::HeadDeterministic;
  if (text == "cbv") return Strategy::CallByValue;
  if (text == "cbn") return Strategy::CallByName;
  if (text == "full") return Strategy::FullNormalize;
  return std::nullopt;
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::NormalForm: return "NormalForm";
    case OutcomeKind::FuelExhausted: return "FuelExhausted";
    case OutcomeKind::PrimDomainError: return "PrimDomainError";
    case OutcomeKind::Stuck: return "Stuck";
  }
  return "?";
}

std::string to_string(const Decision& d) {
  if (d.kind == Decision::Kind::FixUnfolded) return "FixUnfolded(" + d.binder.str() + ")";
  return std::string("CondTaken(") + (d.branch == Branch::Then ? "Then" : "Else") + ", " +
         format_real(d.guard) + ")";
}

namespace {

bool is_scalar_numeral(const Term& t) { return t->is_numeral() && t->lanes() == 1; }

bool is_lane_value(const Term& t, std::size_t lanes) {
  if (lanes == 1) return is_scalar_numeral(t);
  return t->kind() == TermKind::Tuple && t->arity() == lanes && is_numeral_tuple(t);
}

Term replace_kid(const Term& t, std::size_t i, Term k) {
  TermKids kids(t->kids().begin(), t->kids().end());
  kids[i] = std::move(k);
  return with_kids(t, std::move(kids));
}

double apply_prim(const PrimEntry& p, std::span<const double> args) {
  const double r = p.evaluate(args);
  if (!std::isfinite(r)) throw PrimDomainError(p.name, std::vector<double>(args.begin(), args.end()));
  return r;
}

Term contract_prim(const Term& t) {
  const std::size_t lanes = t->lanes();
  if (t->is_numeral()) {
    // lifted numeral
    return tuple(std::vector<Term>(lanes, mk_numeral(t->value())));
  }
  const PrimEntry& p = *t->prim();
  std::vector<double> args(t->arity());
  if (lanes == 1) {
    for (std::size_t i = 0; i < args.size(); ++i) args[i] = t->kid(i)->value();
    return mk_numeral(apply_prim(p, args));
  }
  std::vector<Term> out;
  out.reserve(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    for (std::size_t i = 0; i < args.size(); ++i) args[i] = t->kid(i)->kid(l)->value();
    out.push_back(mk_numeral(apply_prim(p, args)));
  }
  return tuple(std::move(out));
}

Term unfold_fix(const Term& t) {
  static const Name kX("x");
  Name x = kX;
  if (occurs_free(x, t)) x = Name::fresh(x);
  const Term eta = lam(x, t->binder_type()->domain(), app(t, var(x)));
  return subst(t->body(), t->name(), eta);
}

class Stepper {
 public:
  explicit Stepper(Strategy s) : s_(s) {}

  std::optional<Decision> event;

  std::optional<Term> run(const Term& t) {
    if (auto r = contract(t)) return r;
    switch (s_) {
      case Strategy::HeadDeterministic: return descend_head(t);
      case Strategy::CallByName: return descend_cbn(t);
      case Strategy::CallByValue: return descend_cbv(t);
      case Strategy::FullNormalize: return descend_full(t);
    }
    return std::nullopt;
  }

 private:
  std::optional<Term> contract(const Term& t) {
    switch (t->kind()) {
      case TermKind::App: {
        const Term& f = t->fun();
        if (f->kind() != TermKind::Lam) return std::nullopt;
        if (s_ == Strategy::CallByValue && !is_value(t->arg())) return std::nullopt;
        return subst(f->body(), f->name(), t->arg());
      }
      case TermKind::Proj: {
        const Term& b = t->body();
        if (b->kind() != TermKind::Tuple || b->arity() != t->width()) return std::nullopt;
        if (s_ == Strategy::CallByValue && !is_value(b)) return std::nullopt;
        return b->kid(t->index() - 1);
      }
      case TermKind::Prim: {
        if (t->is_numeral() && t->lanes() == 1) return std::nullopt;
        for (const auto& a : t->kids()) {
          if (!is_lane_value(a, t->lanes())) return std::nullopt;
        }
        return contract_prim(t);
      }
      case TermKind::Cond: {
        const Term& g = t->guard();
        if (!is_scalar_numeral(g)) return std::nullopt;
        const bool take_then = g->value() <= 0.0;
        event = Decision::cond_taken(take_then ? Branch::Then : Branch::Else, g->value());
        return take_then ? t->then_branch() : t->else_branch();
      }
      case TermKind::Fix:
        event = Decision::fix_unfolded(t->name());
        return unfold_fix(t);
      default:
        return std::nullopt;
    }
  }

  std::optional<Term> at(const Term& t, std::size_t i) {
    if (auto r = run(t->kid(i))) return replace_kid(t, i, std::move(*r));
    return std::nullopt;
  }

  std::optional<Term> descend_head(const Term& t) {
    switch (t->kind()) {
      case TermKind::App:
      case TermKind::Proj:
      case TermKind::Cond:
        return at(t, 0);
      case TermKind::Prim:
      case TermKind::Tuple:
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (auto r = at(t, i)) return r;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::optional<Term> descend_cbn(const Term& t) {
    switch (t->kind()) {
      case TermKind::App:
      case TermKind::Proj:
      case TermKind::Cond:
        return at(t, 0);
      case TermKind::Prim:
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (!is_lane_value(t->kid(i), t->lanes())) return at(t, i);
        }
        return std::nullopt;
      case TermKind::Tuple:
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (auto r = at(t, i)) return r;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::optional<Term> descend_cbv(const Term& t) {
    switch (t->kind()) {
      case TermKind::App:
        if (!is_value(t->fun())) return at(t, 0);
        if (!is_value(t->arg())) return at(t, 1);
        return std::nullopt;
      case TermKind::Proj:
      case TermKind::Cond:
        return at(t, 0);
      case TermKind::Prim:
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (!is_lane_value(t->kid(i), t->lanes())) return at(t, i);
        }
        return std::nullopt;
      case TermKind::Tuple:
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (!is_value(t->kid(i))) return at(t, i);
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::optional<Term> descend_full(const Term& t) {
    if (t->kind() == TermKind::Fix) return std::nullopt;
    for (std::size_t i = 0; i < t->arity(); ++i) {
      if (auto r = at(t, i)) return r;
    }
    return std::nullopt;
  }

  Strategy s_;
};

}  // namespace

std::optional<StepResult> step(const Term& m, Strategy strategy) {
  Stepper st(strategy);
  auto r = st.run(m);
  if (!r) return std::nullopt;
  return StepResult{std::move(*r), st.event};
}

EvalOutcome normalize(const Term& m, Strategy strategy, const EvalConfig& cfg) {
  if (cfg.fuel == 0) throw Error(ErrorCode::InvalidArgument, "fuel must be at least 1");
  EvalOutcome out;
  Term cur = cfg.fix_cap ? cap_fixpoints(m, *cfg.fix_cap) : m;
  try {
    while (out.steps < cfg.fuel) {
      Stepper st(strategy);
      auto next = st.run(cur);
      if (!next) {
        out.kind = cur->closed() && !is_value(cur) ? OutcomeKind::Stuck : OutcomeKind::NormalForm;
        out.term = std::move(cur);
        return out;
      }
      cur = std::move(*next);
      ++out.steps;
      if (cfg.record_decisions && st.event) out.decisions.push_back(*st.event);
    }
    // the last permitted step may have produced a normal form
    if (!step(cur, strategy)) {
      out.kind = cur->closed() && !is_value(cur) ? OutcomeKind::Stuck : OutcomeKind::NormalForm;
    } else {
      out.kind = OutcomeKind::FuelExhausted;
    }
  } catch (const PrimDomainError& e) {
    out.kind = OutcomeKind::PrimDomainError;
    out.symbol = e.symbol();
    out.args = e.args();
  }
  out.term = std::move(cur);
  return out;
}

std::optional<std::vector<double>> decode_numerals(const Term& t) {
  if (!is_numeral_tuple(t)) return std::nullopt;
  if (t->kind() == TermKind::Prim) return std::vector<double>{t->value()};
  std::vector<double> out;
  out.reserve(t->arity());
  for (const auto& k : t->kids()) out.push_back(k->value());
  return out;
}

EvalOutcome run_program(const Program& p, std::span<const double> args, Strategy strategy,
                        const EvalConfig& cfg) {
  if (args.size() != p.arity()) {
    throw TypeError(ErrorCode::IllTyped, "program expects " + std::to_string(p.arity()) +
                                             " arguments, got " + std::to_string(args.size()));
  }
  std::vector<Term> nums;
  nums.reserve(args.size());
  for (double a : args) nums.push_back(mk_numeral(a));
  return normalize(subst_closed(p.body, p.params, nums), strategy, cfg);
}

std::optional<std::vector<double>> eval_program(const Program& p, std::span<const double> args,
                                                Strategy strategy, const EvalConfig& cfg) {
  if (args.size() != p.arity() || !program_coarity(p)) {
    throw TypeError(ErrorCode::IllTyped, "not a ground program of arity " +
                                             std::to_string(args.size()));
  }
  auto out = run_program(p, args, strategy, cfg);
  if (!out.ok()) return std::nullopt;
  return decode_numerals(out.term);
}

}  // namespace pcfr
