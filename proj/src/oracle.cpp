// SPDX-License-Identifier: Apache-2.0
#include "pcfr/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pcfr {

std::string_view to_string(DiffProbe::Kind k) {
  switch (k) {
    case DiffProbe::Kind::Differentiable: return "Differentiable";
    case DiffProbe::Kind::NotDifferentiable: return "NotDifferentiable";
    case DiffProbe::Kind::Undefined: return "Undefined";
    case DiffProbe::Kind::Unknown: return "Unknown";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Agree: return "Agree";
    case Verdict::Fail: return "Fail";
    case Verdict::OutsideDiffDomain: return "OutsideDiffDomain";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

std::optional<double> eval_scalar(const Program& p, std::span<const double> r, Strategy s,
                                  const EvalConfig& cfg) {
  auto out = run_program(p, r, s, cfg);
  if (!out.ok() || !out.term->is_numeral() || out.term->lanes() != 1) return std::nullopt;
  return out.term->value();
}

std::optional<double> eval_shifted(const Program& p, std::vector<double> r, std::size_t axis,
                                   double delta, Strategy s, const EvalConfig& cfg) {
  r[axis] += delta;
  return eval_scalar(p, r, s, cfg);
}

void require_scalar_program(const Program& p) {
  if (!check_program(p, 1)) {
    throw TypeError(ErrorCode::IllTyped, "expected a ground program of coarity 1");
  }
}

constexpr double kJumpFloor = 1e-12;

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

std::optional<std::vector<double>> fd_gradient(const Program& p, std::span<const double> r,
                                               double h, Strategy strategy, const EvalConfig& cfg) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  require_scalar_program(p);
  const std::vector<double> base(r.begin(), r.end());
  std::vector<double> g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto fp = eval_shifted(p, base, i, h, strategy, cfg);
    auto fm = eval_shifted(p, base, i, -h, strategy, cfg);
    if (!fp || !fm) return std::nullopt;
    g[i] = (*fp - *fm) / (2.0 * h);
  }
  return g;
}

namespace {

DiffProbe probe_from(const Program& p, std::span<const double> r, const OracleConfig& cfg,
                     std::optional<double> f0);

}  // namespace

DiffProbe diff_probe(const Program& p, std::span<const double> r, const OracleConfig& cfg) {
  require_scalar_program(p);
  return probe_from(p, r, cfg, eval_scalar(p, r, cfg.strategy, cfg.eval));
}

namespace {

DiffProbe probe_from(const Program& p, std::span<const double> r, const OracleConfig& cfg,
                     std::optional<double> f0) {
  const auto& ladder = cfg.h_ladder;
  if (ladder.size() < 2) throw Error(ErrorCode::InvalidArgument, "the step ladder needs two steps");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0) || (i > 0 && !(ladder[i] < ladder[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "the step ladder must be strictly decreasing");
    }
  }
  DiffProbe out;
  const std::vector<double> base(r.begin(), r.end());
  if (!f0) {
    out.kind = DiffProbe::Kind::Undefined;
    out.reason = "program undefined at the point";
    return out;
  }

  const std::size_t m = ladder.size();
  std::vector<double> grad(base.size());
  bool unknown = false;
  for (std::size_t axis = 0; axis < base.size(); ++axis) {
    std::vector<double> up(m), down(m);
    for (std::size_t k = 0; k < m; ++k) {
      auto fp = eval_shifted(p, base, axis, ladder[k], cfg.strategy, cfg.eval);
      auto fm = eval_shifted(p, base, axis, -ladder[k], cfg.strategy, cfg.eval);
      if (!fp || !fm) {
        out.kind = DiffProbe::Kind::Undefined;
        out.axis = axis + 1;
        out.reason = "program undefined near the point";
        return out;
      }
      up[k] = *fp - *f0;
      down[k] = *f0 - *fm;
    }
    const double h1 = ladder[m - 2];
    const double h2 = ladder[m - 1];
    const double right = up[m - 1] / h2;
    const double left = down[m - 1] / h2;

    // A one-sided increment that does not shrink with h is a jump; a smooth
    // increment scales with h, so the comparison has to be relative.
    // Increments at rounding level are noise, not jumps.
    const double noise = kJumpFloor * std::max(1.0, std::abs(*f0));
    const auto is_jump = [&](const std::vector<double>& d) {
      const double a = d[m - 1], b = d[m - 2];
      return std::abs(a) > noise &&
             std::abs(a - b) <= cfg.probe_tol * std::max(std::abs(a), std::abs(b));
    };
    if (is_jump(up) || is_jump(down)) {
      out.kind = DiffProbe::Kind::NotDifferentiable;
      out.axis = axis + 1;
      out.left_slope = left;
      out.right_slope = right;
      out.jump = true;
      out.reason = "jump discontinuity";
      return out;
    }

    const bool stable = close(up[m - 2] / h1, right, cfg.probe_tol) &&
                        close(down[m - 2] / h1, left, cfg.probe_tol);
    if (!stable) {
      unknown = true;
      out.axis = axis + 1;
      out.left_slope = left;
      out.right_slope = right;
      continue;
    }
    if (!close(left, right, cfg.probe_tol)) {
      out.kind = DiffProbe::Kind::NotDifferentiable;
      out.axis = axis + 1;
      out.left_slope = left;
      out.right_slope = right;
      out.reason = "one-sided slopes differ";
      return out;
    }
    grad[axis] = (up[m - 1] + down[m - 1]) / (2.0 * h2);
  }
  if (unknown) {
    out.kind = DiffProbe::Kind::Unknown;
    out.reason = "difference quotients did not settle";
    return out;
  }
  out.kind = DiffProbe::Kind::Differentiable;
  out.grad = std::move(grad);
  return out;
}

}  // namespace

GradChecker::GradChecker(Program p, OracleConfig cfg)
    : program_(std::move(p)),
      cfg_(std::move(cfg)),
      forward_(program_, AdMode::Forward),
      reverse_(program_, AdMode::Reverse) {}

GradReport GradChecker::at(std::span<const double> r) const {
  GradReport rep;
  rep.point.assign(r.begin(), r.end());
  rep.value = eval_scalar(program_, r, cfg_.strategy, cfg_.eval);
  rep.ad_forward = forward_.evaluate(r, cfg_.strategy, cfg_.eval);
  rep.ad_reverse = reverse_.evaluate(r, cfg_.strategy, cfg_.eval);
  for (auto* g : {&rep.ad_forward, &rep.ad_reverse}) {
    if (*g && g->value().size() != r.size()) g->reset();
  }
  if (!rep.value) {
    rep.fd.kind = DiffProbe::Kind::Undefined;
    rep.fd.reason = "program undefined at the point";
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  rep.fd = probe_from(program_, r, cfg_, rep.value);
  switch (rep.fd.kind) {
    case DiffProbe::Kind::Undefined:
    case DiffProbe::Kind::NotDifferentiable:
      rep.verdict = Verdict::OutsideDiffDomain;
      return rep;
    case DiffProbe::Kind::Unknown:
      rep.verdict = Verdict::Inconclusive;
      return rep;
    case DiffProbe::Kind::Differentiable:
      break;
  }
  if (!rep.ad_forward && !rep.ad_reverse) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  bool fail = false;
  for (const auto* g : {&rep.ad_forward, &rep.ad_reverse}) {
    if (!*g) continue;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double ad = (**g)[i];
      const double fd = rep.fd.grad[i];
      const double err = std::abs(ad - fd);
      rep.max_abs_err = std::max(rep.max_abs_err, err);
      if (fd != 0.0) rep.max_rel_err = std::max(rep.max_rel_err, err / std::abs(fd));
      if (err > cfg_.atol + cfg_.rtol * std::abs(fd)) fail = true;
    }
  }
  rep.verdict = fail ? Verdict::Fail : Verdict::Agree;
  return rep;
}

GradReport compare_at(const Program& p, std::span<const double> r, const OracleConfig& cfg) {
  return GradChecker(p, cfg).at(r);
}

}  // namespace pcfr
