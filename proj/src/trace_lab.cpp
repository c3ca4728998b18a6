// SPDX-License-Identifier: Apache-2.0
#include "pcfr/trace_lab.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace pcfr {

bool operator==(const BranchTrace& a, const BranchTrace& b) {
  if (a.outcome != b.outcome || a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const Decision& x = a.events[i];
    const Decision& y = b.events[i];
    if (x.kind != y.kind) return false;
    if (x.kind == Decision::Kind::CondTaken ? x.branch != y.branch : x.binder != y.binder) {
      return false;
    }
  }
  return true;
}

BranchTrace branch_trace(const Program& p, std::span<const double> r, const EvalConfig& cfg) {
  EvalConfig c = cfg;
  c.record_decisions = true;
  auto out = run_program(p, r, Strategy::HeadDeterministic, c);
  return {std::move(out.decisions), out.kind};
}

// ---- pre-trace relation

namespace {

bool type_pretrace(const Type& a, const Type& b) {
  switch (a->kind()) {
    case TypeKind::Real:
      return b->kind() == TypeKind::Real;
    case TypeKind::Arrow:
      return b->is_arrow() && type_pretrace(a->domain(), b->domain()) &&
             type_pretrace(a->codomain(), b->codomain());
    case TypeKind::Product: {
      const auto& as = a->components();
      if (b->kind() == TypeKind::Product && b->width() == a->width()) {
        bool all = true;
        for (std::size_t i = 0; i < as.size() && all; ++i) {
          all = type_pretrace(as[i], b->components()[i]);
        }
        if (all) return true;
      }
      return std::all_of(as.begin(), as.end(),
                         [&](const Type& c) { return type_pretrace(c, b); });
    }
  }
  return false;
}

class Pretrace {
 public:
  explicit Pretrace(std::size_t bound) : bound_(bound) {}

  bool bound_hit = false;

  bool check(const Term& t, const Term& m) {
    switch (m->kind()) {
      case TermKind::Var: return check_var(t, m->name());
      case TermKind::Lam: {
        if (t->kind() != TermKind::Lam) return false;
        if (!type_pretrace(t->binder_type(), m->binder_type())) return false;
        xi_.push_back({m->name(), t->name(), t->binder_type()});
        const bool ok = check(t->body(), m->body());
        xi_.pop_back();
        return ok;
      }
      case TermKind::App: {
        if (t->kind() != TermKind::App) return false;
        if (!check(t->fun(), m->fun())) return false;
        if (check(t->arg(), m->arg())) return true;
        const Term& a = t->arg();
        if (a->kind() != TermKind::Tuple) return false;
        return std::all_of(a->kids().begin(), a->kids().end(),
                           [&](const Term& u) { return check(u, m->arg()); });
      }
      case TermKind::Tuple: {
        if (t->kind() != TermKind::Tuple || t->arity() != m->arity()) return false;
        for (std::size_t i = 0; i < m->arity(); ++i) {
          if (!check(t->kid(i), m->kid(i))) return false;
        }
        return true;
      }
      case TermKind::Proj:
        return t->kind() == TermKind::Proj && t->index() == m->index() &&
               t->width() == m->width() && check(t->body(), m->body());
      case TermKind::Prim: {
        if (t->kind() != TermKind::Prim || t->lanes() != m->lanes()) return false;
        if (m->is_numeral() || t->is_numeral()) return alpha_eq(t, m);
        if (t->prim()->name != m->prim()->name) return false;
        for (std::size_t i = 0; i < m->arity(); ++i) {
          if (!check(t->kid(i), m->kid(i))) return false;
        }
        return true;
      }
      case TermKind::Cond: {
        if (t->kind() != TermKind::Proj || t->width() != 2) return false;
        const Term& pair = t->body();
        if (pair->kind() != TermKind::Tuple || pair->arity() != 2) return false;
        if (!alpha_eq(pair->kid(0), pair->kid(1))) return false;
        const Term& branch = t->index() == 1 ? m->then_branch() : m->else_branch();
        return check(pair->kid(0), branch);
      }
      case TermKind::Fix: {
        // Every unfolding fix_n with n > 0 is an application.
        if (t->kind() != TermKind::App) return false;
        for (std::size_t n = 1; n <= bound_; ++n) {
          if (check(t, fix_approx(m->name(), m->binder_type(), m->body(), n))) return true;
        }
        bound_hit = true;
        return false;
      }
    }
    return false;
  }

 private:
  struct Binding {
    Name x;
    Name p;
    Type p_type;
  };

  bool check_var(const Term& t, Name x) const {
    auto it = std::find_if(xi_.rbegin(), xi_.rend(), [x](const Binding& b) { return b.x == x; });
    if (it == xi_.rend()) return t->kind() == TermKind::Var && t->name() == x;
    // the matching binder of t must not be shadowed by a later one
    const Name p = it->p;
    const bool shadowed = std::any_of(xi_.rbegin(), it, [p](const Binding& b) { return b.p == p; });
    if (shadowed) return false;
    if (t->kind() == TermKind::Var) return t->name() == p;
    if (t->kind() != TermKind::Proj || t->body()->kind() != TermKind::Var ||
        t->body()->name() != p) {
      return false;
    }
    return it->p_type->kind() == TypeKind::Product && it->p_type->width() == t->width();
  }

  std::size_t bound_;
  std::vector<Binding> xi_;
};

}  // namespace

PretraceResult pretrace_check(const Term& t, const Term& m, std::size_t fix_bound) {
  if (!is_simple(t)) {
    throw Error(ErrorCode::NotSimple, "the tracing term must not contain conditionals or fixpoints",
                t->span());
  }
  Pretrace p(fix_bound);
  PretraceResult out;
  out.holds = p.check(t, m);
  out.bound_hit = !out.holds && p.bound_hit;
  return out;
}

// ---- stability

std::string_view to_string(StabilityVerdict::Kind k) {
  switch (k) {
    case StabilityVerdict::Kind::StableEmpirical: return "StableEmpirical";
    case StabilityVerdict::Kind::UnstableEmpirical: return "UnstableEmpirical";
    case StabilityVerdict::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

std::vector<double> ball_point(UnitSampler& s, std::span<const double> c, double radius) {
  const std::size_t n = c.size();
  std::vector<double> u(n);
  while (true) {
    double norm2 = 0.0;
    for (auto& x : u) {
      x = 2.0 * s.next() - 1.0;
      norm2 += x * x;
    }
    if (n > 3 || norm2 < 1.0) break;
  }
  for (std::size_t i = 0; i < n; ++i) u[i] = c[i] + radius * u[i];
  return u;
}

}  // namespace

StabilityVerdict stability_probe(const Program& p, std::span<const double> r, double radius,
                                 std::size_t probes, std::uint64_t seed, const EvalConfig& cfg) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (probes < 2) throw Error(ErrorCode::InvalidArgument, "at least two probes are needed");
  if (r.size() != p.arity() || !check_program(p, 1)) {
    throw TypeError(ErrorCode::IllTyped, "expected a ground program of coarity 1 and arity " +
                                             std::to_string(r.size()));
  }
  StabilityVerdict v;
  v.center.assign(r.begin(), r.end());
  v.radius = radius;
  v.probes = probes;
  v.seed = seed;

  const BranchTrace center = branch_trace(p, r, cfg);
  if (center.outcome != OutcomeKind::NormalForm) {
    v.kind = StabilityVerdict::Kind::Inconclusive;
    v.reason = std::string("center evaluation ended in ") + std::string(to_string(center.outcome));
    return v;
  }
  UnitSampler sampler(seed);
  std::optional<std::vector<double>> witness;
  for (std::size_t k = 0; k < probes; ++k) {
    auto q = ball_point(sampler, r, radius);
    const BranchTrace t = branch_trace(p, q, cfg);
    if (t.outcome == OutcomeKind::FuelExhausted) {
      v.kind = StabilityVerdict::Kind::Inconclusive;
      v.reason = "a probe exhausted its fuel";
      return v;
    }
    if (!witness && !(t == center)) witness = std::move(q);
  }
  if (witness) {
    v.kind = StabilityVerdict::Kind::UnstableEmpirical;
    v.witness = std::move(*witness);
    v.reason = "branch trace differs from the center";
  } else {
    v.kind = StabilityVerdict::Kind::StableEmpirical;
  }
  return v;
}

// ---- failure scan

ScanReport failure_scan(const Program& p, std::span<const std::pair<double, double>> box,
                        const ScanOptions& opts, const OracleConfig& cfg) {
  if (box.size() != p.arity()) {
    throw Error(ErrorCode::InvalidArgument, "box has " + std::to_string(box.size()) +
                                                " axes but the program has arity " +
                                                std::to_string(p.arity()));
  }
  for (const auto& [lo, hi] : box) {
    if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "each axis needs lo <= hi");
  }
  const GradChecker checker(p, cfg);

  ScanReport rep;
  rep.box.assign(box.begin(), box.end());
  rep.samples = opts.samples;
  rep.seed = opts.seed;

  // Points are drawn up front so that the result does not depend on jobs.
  UnitSampler sampler(opts.seed);
  std::vector<std::vector<double>> points(opts.samples, std::vector<double>(box.size()));
  for (auto& pt : points) {
    for (std::size_t i = 0; i < box.size(); ++i) {
      pt[i] = box[i].first + (box[i].second - box[i].first) * sampler.next();
    }
  }

  std::vector<GradReport> reports(opts.samples);
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, opts.samples));
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < opts.samples; i += jobs) reports[i] = checker.at(points[i]);
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
  }

  for (auto& g : reports) {
    if (!g.value) {
      ++rep.divergent;
    } else {
      ++rep.evaluated;
      switch (g.verdict) {
        case Verdict::Agree: ++rep.agree; break;
        case Verdict::Fail:
          ++rep.fail;
          rep.fail_points.push_back(g.point);
          break;
        case Verdict::OutsideDiffDomain: ++rep.outside_diff_domain; break;
        case Verdict::Inconclusive:
          ++rep.outside_diff_domain;
          ++rep.inconclusive;
          break;
      }
    }
    if (opts.record_samples) {
      ScanSample s;
      s.point = g.point;
      s.verdict = g.verdict;
      s.value = g.value;
      s.ad_forward = g.ad_forward;
      s.ad_reverse = g.ad_reverse;
      if (g.fd.kind == DiffProbe::Kind::Differentiable) s.fd = g.fd.grad;
      rep.sample_log.push_back(std::move(s));
    }
  }
  std::sort(rep.fail_points.begin(), rep.fail_points.end());
  if (rep.fail_points.size() > opts.fail_cap) rep.fail_points.resize(opts.fail_cap);
  rep.fail_fraction =
      static_cast<double>(rep.fail) / static_cast<double>(std::max<std::size_t>(1, rep.agree + rep.fail));
  return rep;
}

}  // namespace pcfr
