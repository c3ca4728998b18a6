// SPDX-License-Identifier: Apache-2.0
// Command-line front end: eval, transform, grad, check, scan, stability,
// trace, pretrace and the shipped corpus.
//
// Exit codes: 0 success, 1 check verdict Fail, 2 usage/parse/type error,
// 3 divergence (fuel exhausted or primitive domain error).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pcfr/report.hpp"
#include "pcfr/syntax.hpp"

namespace fs = std::filesystem;
using namespace pcfr;

namespace {

constexpr int kOk = 0;
constexpr int kFailVerdict = 1;
constexpr int kUsage = 2;
constexpr int kDiverged = 3;

struct Common {
  std::uint64_t fuel = 1'000'000;
  std::string strategy;
  std::optional<std::size_t> fix_cap;
};

EvalConfig eval_config(const Common& c) {
  EvalConfig cfg;
  cfg.fuel = c.fuel;
  cfg.fix_cap = c.fix_cap;
  return cfg;
}

Strategy strategy_or(const Common& c, Strategy fallback) {
  if (c.strategy.empty()) return fallback;
  auto s = parse_strategy(c.strategy);
  if (!s) throw Error(ErrorCode::InvalidArgument, "unknown strategy " + c.strategy);
  return *s;
}

std::string join(std::span<const double> xs, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_real(xs[i]);
  }
  return out;
}

std::string vec(const std::optional<std::vector<double>>& v) {
  return v ? "<" + join(*v, ", ") + ">" : "undefined";
}

void require_point(const SourceProgram& src, std::span<const double> r) {
  if (r.size() != src.arity()) {
    throw Error(ErrorCode::InvalidArgument,
                src.path + " takes " + std::to_string(src.arity()) + " argument(s), got " +
                    std::to_string(r.size()));
  }
}

void require_scalar(const SourceProgram& src) {
  auto m = src.coarity();
  if (!m) {
    infer(TypingEnv::ground(src.params), src.term);  // throws the precise type error
    throw TypeError(ErrorCode::IllTyped, src.path + " is not a ground program");
  }
  if (*m != 1) {
    throw TypeError(ErrorCode::IllTyped, src.path + " has coarity " + std::to_string(*m) +
                                             "; gradients need coarity 1");
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
}

int report_outcome(const EvalOutcome& out) {
  switch (out.kind) {
    case OutcomeKind::NormalForm:
      std::cout << print_term(out.term) << '\n';
      return kOk;
    case OutcomeKind::FuelExhausted:
      std::cout << "diverged: fuel exhausted after " << out.steps << " steps\n";
      return kDiverged;
    case OutcomeKind::PrimDomainError:
      std::cout << "undefined: " << out.symbol << '(' << join(out.args, ", ") << ")\n";
      return kDiverged;
    case OutcomeKind::Stuck:
      std::cout << "stuck: " << print_term(out.term) << '\n';
      return kUsage;
  }
  return kUsage;
}

void print_report(const GradReport& r) {
  std::cout << "point       " << join(r.point) << '\n'
            << "value       " << (r.value ? format_real(*r.value) : "undefined") << '\n'
            << "ad forward  " << vec(r.ad_forward) << '\n'
            << "ad reverse  " << vec(r.ad_reverse) << '\n'
            << "fd probe    " << to_string(r.fd.kind);
  if (r.fd.kind == DiffProbe::Kind::Differentiable) {
    std::cout << " <" << join(r.fd.grad, ", ") << '>';
  } else if (r.fd.axis != 0) {
    std::cout << " axis " << r.fd.axis << " left " << format_real(r.fd.left_slope) << " right "
              << format_real(r.fd.right_slope);
  }
  if (!r.fd.reason.empty()) std::cout << " (" << r.fd.reason << ')';
  std::cout << '\n' << "verdict     " << to_string(r.verdict) << '\n';
}

void print_trace(const BranchTrace& t) {
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    std::cout << i + 1 << ". " << to_string(t.events[i]) << '\n';
  }
  std::cout << "outcome: " << to_string(t.outcome) << '\n';
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pcfr") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int run_corpus(const fs::path& dir, const Common& common, bool run) {
  int status = kOk;
  for (const auto& file : corpus_files(dir)) {
    const SourceProgram src = load_source(file);
    const auto m = src.coarity();
    std::cout << file.filename().string() << "  arity " << src.arity() << "  coarity "
              << (m ? std::to_string(*m) : std::string("-")) << '\n';
    if (!run) continue;
    if (src.arity() == 0) {
      const auto out = normalize(src.term, strategy_or(common, Strategy::HeadDeterministic),
                                 eval_config(common));
      std::cout << "  value " << (out.ok() ? print_term(out.term) : to_string(out.kind)) << '\n';
      continue;
    }
    if (!m || *m != 1) continue;
    OracleConfig ocfg;
    ocfg.strategy = strategy_or(common, Strategy::CallByValue);
    ocfg.eval = eval_config(common);
    const GradChecker checker(src.program(), ocfg);
    for (const auto& pt : src.sample_points) {
      const GradReport r = checker.at(pt);
      const StabilityVerdict s = stability_probe(src.program(), pt, 0.1, 32, 42, ocfg.eval);
      std::cout << "  at " << join(pt) << ": value "
                << (r.value ? format_real(*r.value) : "undefined") << ", fwd " << vec(r.ad_forward)
                << ", rev " << vec(r.ad_reverse) << ", " << to_string(r.verdict) << ", "
                << to_string(s.kind) << '\n';
      if (r.verdict == Verdict::Fail) status = kFailVerdict;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PCF with real numbers: evaluation, AD transformations and a failure laboratory.\n"
               "Conditionals test their guard against 0: `if g then a else b` takes `a` when "
               "g <= 0.\nExample: \\x:R. if x then 0 else x is ReLU."};
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv("PCFR_FUEL")) {
    try {
      common.fuel = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: PCFR_FUEL must be a positive integer\n";
      return kUsage;
    }
  }
  auto add_common = [&](CLI::App* sub, bool with_strategy) {
    sub->add_option("--fuel", common.fuel, "Maximum reduction steps (env PCFR_FUEL)")
        ->check(CLI::PositiveNumber);
    if (with_strategy) {
      sub->add_option("--strategy", common.strategy, "head | cbv | cbn | full")
          ->check(CLI::IsMember({"head", "cbv", "cbn", "full"}));
    }
  };

  std::string file, simple_file, mode = "fwd", json_path, csv_path;
  std::vector<double> point, box;
  std::size_t n = 1, samples = 10000, probes = 32, jobs = 1, fix_bound = 8, fix_cap = 0;
  std::uint64_t seed = 42;
  double radius = 0.1, rtol = 1e-4, atol = 1e-6;
  bool print_type = false;

  auto* eval_cmd = app.add_subcommand("eval", "Normalize a program at the given arguments");
  eval_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--args", point, "Argument values")->allow_extra_args();
  eval_cmd->add_option("--fix-cap", fix_cap, "Replace fixpoints by approximants of this depth");
  add_common(eval_cmd, true);

  auto* transform_cmd = app.add_subcommand("transform", "Print the AD transform of a term");
  transform_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("--mode", mode)->check(CLI::IsMember({"fwd", "rev"}));
  transform_cmd->add_option("-n", n, "Gradient dimension")->check(CLI::PositiveNumber);
  transform_cmd->add_flag("--print-type", print_type, "Also print the type of the transform");

  auto* grad_cmd = app.add_subcommand("grad", "Gradient computed by AD");
  grad_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  grad_cmd->add_option("--mode", mode)->check(CLI::IsMember({"fwd", "rev"}));
  grad_cmd->add_option("--at", point)->required()->allow_extra_args();
  add_common(grad_cmd, true);

  auto* check_cmd = app.add_subcommand("check", "Compare both AD modes with finite differences");
  check_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--at", point)->required()->allow_extra_args();
  check_cmd->add_option("--rtol", rtol);
  check_cmd->add_option("--atol", atol);
  check_cmd->add_option("--json", json_path, "Write the report as JSON");
  add_common(check_cmd, true);

  auto* scan_cmd = app.add_subcommand("scan", "Monte-Carlo search for AD failures in a box");
  scan_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--box", box, "LO HI per axis")->required()->allow_extra_args();
  scan_cmd->add_option("--samples", samples);
  scan_cmd->add_option("--seed", seed);
  scan_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  scan_cmd->add_option("--json", json_path, "Write the report as JSON");
  scan_cmd->add_option("--csv", csv_path, "Write one row per sample");
  add_common(scan_cmd, true);

  auto* stab_cmd = app.add_subcommand("stability", "Empirical stability of a point");
  stab_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  stab_cmd->add_option("--at", point)->required()->allow_extra_args();
  stab_cmd->add_option("--radius", radius);
  stab_cmd->add_option("--probes", probes);
  stab_cmd->add_option("--seed", seed);
  stab_cmd->add_option("--json", json_path, "Write the verdict as JSON");
  add_common(stab_cmd, false);

  auto* trace_cmd = app.add_subcommand("trace", "Branch trace of head reduction");
  trace_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  trace_cmd->add_option("--at", point)->allow_extra_args();
  trace_cmd->add_option("--json", json_path, "Write the trace as JSON");
  add_common(trace_cmd, false);

  auto* pre_cmd = app.add_subcommand("pretrace", "Decide whether a simple term pre-traces a term");
  pre_cmd->add_option("simple", simple_file)->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--fix-bound", fix_bound);

  std::string corpus_action, corpus_dir = PCFR_CORPUS_DIR;
  auto* corpus_cmd = app.add_subcommand("corpus", "List or run the shipped examples");
  corpus_cmd->add_option("action", corpus_action)->required()->check(CLI::IsMember({"list", "run"}));
  corpus_cmd->add_option("--dir", corpus_dir)->check(CLI::ExistingDirectory);
  add_common(corpus_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*corpus_cmd) return run_corpus(corpus_dir, common, corpus_action == "run");

    const SourceProgram src = load_source(file);
    const AdMode ad_mode = *parse_ad_mode(mode);

    if (*eval_cmd) {
      if (fix_cap > 0) common.fix_cap = fix_cap;
      const Strategy s = strategy_or(common, Strategy::HeadDeterministic);
      infer(TypingEnv::ground(src.params), src.term);
      if (point.empty() && src.arity() > 0) {
        throw Error(ErrorCode::InvalidArgument, src.path + " needs --args");
      }
      require_point(src, point);
      return report_outcome(run_program(src.program(), point, s, eval_config(common)));
    }

    if (*transform_cmd) {
      const Term d = ad_term(src.term, ad_mode, n);
      std::cout << print_term(d) << '\n';
      if (print_type) {
        const TypingEnv env = ad_env(TypingEnv::ground(src.params), ad_mode, n);
        std::cout << ": " << to_string(infer(env, d)) << '\n';
      }
      return kOk;
    }

    if (*grad_cmd) {
      require_scalar(src);
      require_point(src, point);
      OracleConfig ocfg;
      ocfg.strategy = strategy_or(common, Strategy::CallByValue);
      ocfg.eval = eval_config(common);
      const GradProgram g(src.program(), ad_mode);
      const auto out = normalize(g.at(point), ocfg.strategy, ocfg.eval);
      if (!out.ok()) return report_outcome(out);
      const auto grad = decode_numerals(out.term);
      std::cout << join(*grad) << '\n';
      const DiffProbe fd = diff_probe(src.program(), point, ocfg);
      if (fd.kind == DiffProbe::Kind::Differentiable) {
        for (std::size_t i = 0; i < grad->size(); ++i) {
          if (std::abs((*grad)[i] - fd.grad[i]) > ocfg.atol + ocfg.rtol * std::abs(fd.grad[i])) {
            std::cerr << "warning: finite differences disagree: <" << join(fd.grad, ", ")
                      << ">\n";
            break;
          }
        }
      }
      return kOk;
    }

    if (*check_cmd) {
      require_scalar(src);
      require_point(src, point);
      OracleConfig ocfg;
      ocfg.rtol = rtol;
      ocfg.atol = atol;
      ocfg.strategy = strategy_or(common, Strategy::CallByValue);
      ocfg.eval = eval_config(common);
      const GradReport r = compare_at(src.program(), point, ocfg);
      print_report(r);
      write_json(json_path, to_json(r));
      return r.verdict == Verdict::Fail ? kFailVerdict : kOk;
    }

    if (*scan_cmd) {
      require_scalar(src);
      if (box.size() != 2 * src.arity()) {
        throw Error(ErrorCode::InvalidArgument,
                    "--box needs " + std::to_string(2 * src.arity()) + " values (LO HI per axis)");
      }
      std::vector<std::pair<double, double>> axes;
      for (std::size_t i = 0; i < box.size(); i += 2) axes.emplace_back(box[i], box[i + 1]);
      ScanOptions opts;
      opts.samples = samples;
      opts.seed = seed;
      opts.jobs = jobs;
      opts.record_samples = !csv_path.empty();
      OracleConfig ocfg;
      ocfg.strategy = strategy_or(common, Strategy::CallByValue);
      ocfg.eval = eval_config(common);
      const ScanReport r = failure_scan(src.program(), axes, opts, ocfg);
      std::cout << "samples            " << r.samples << '\n'
                << "evaluated          " << r.evaluated << '\n'
                << "divergent          " << r.divergent << '\n'
                << "outsideDiffDomain  " << r.outside_diff_domain << " (inconclusive "
                << r.inconclusive << ")\n"
                << "agree              " << r.agree << '\n'
                << "fail               " << r.fail << '\n'
                << "failFraction       " << format_real(r.fail_fraction) << '\n';
      for (const auto& p : r.fail_points) std::cout << "fail at            " << join(p) << '\n';
      write_json(json_path, to_json(r, src.path));
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + csv_path);
        write_scan_csv(out, r);
      }
      return kOk;
    }

    if (*stab_cmd) {
      require_scalar(src);
      require_point(src, point);
      const StabilityVerdict v =
          stability_probe(src.program(), point, radius, probes, seed, eval_config(common));
      std::cout << to_string(v.kind);
      if (!v.witness.empty()) std::cout << " witness " << join(v.witness);
      if (!v.reason.empty()) std::cout << " (" << v.reason << ')';
      std::cout << '\n';
      write_json(json_path, to_json(v, src.path));
      return kOk;
    }

    if (*trace_cmd) {
      infer(TypingEnv::ground(src.params), src.term);
      require_point(src, point);
      const BranchTrace t = branch_trace(src.program(), point, eval_config(common));
      print_trace(t);
      write_json(json_path, to_json(t));
      return t.outcome == OutcomeKind::NormalForm ? kOk : kDiverged;
    }

    if (*pre_cmd) {
      const SourceProgram simple = load_source(simple_file);
      const PretraceResult r = pretrace_check(simple.term, src.term, fix_bound);
      std::cout << (r.holds ? "yes" : "no");
      if (r.bound_hit) std::cout << " (fixpoint bound " << fix_bound << " reached)";
      std::cout << '\n';
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
