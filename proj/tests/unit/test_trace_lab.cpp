// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "corpus.hpp"
#include "pcfr/trace_lab.hpp"

using namespace pcfr;
using pcfr::testing::corpus;
using pcfr::testing::corpus_program;

namespace {

Term P(std::string_view text) { return parse_term(text); }

StabilityVerdict::Kind stability(const Program& p, std::vector<double> r) {
  return stability_probe(p, r, 0.1, 32, 42).kind;
}

}  // namespace

TEST_SUITE("trace_lab") {
  TEST_CASE("branch traces") {
    const auto neg = branch_trace(corpus_program("relu"), std::vector<double>{-1});
    REQUIRE(neg.events.size() == 1);
    CHECK(neg.events[0].branch == Branch::Then);
    CHECK(neg.events[0].guard == -1.0);
    CHECK(neg.outcome == OutcomeKind::NormalForm);

    const auto pos = branch_trace(corpus_program("relu"), std::vector<double>{2});
    REQUIRE(pos.events.size() == 1);
    CHECK(pos.events[0].branch == Branch::Else);
    CHECK(pos.events[0].guard == 2.0);

    const auto floor = branch_trace(corpus_program("floor"), std::vector<double>{0.5});
    CHECK(floor.events.size() >= 3);
    CHECK(floor.events.front().kind == Decision::Kind::FixUnfolded);
    std::size_t unfolds = 0;
    for (const auto& e : floor.events) unfolds += e.kind == Decision::Kind::FixUnfolded;
    CHECK(unfolds == 1);
    // Int 0.5 0: guard 0 - 0.5 selects then, guard 0 - 0.5 + 1 selects else, so Int is 0
    // and the outer conditional returns n = 0.
    REQUIRE(floor.events.size() == 4);
    CHECK(floor.events[1].branch == Branch::Then);
    CHECK(floor.events[2].branch == Branch::Else);
    CHECK(floor.events[3].branch == Branch::Then);
    CHECK(floor.events[3].guard == 0.0);
  }

  TEST_CASE("trace equality ignores guard values") {
    const auto a = branch_trace(corpus_program("relu"), std::vector<double>{1});
    const auto b = branch_trace(corpus_program("relu"), std::vector<double>{1.5});
    CHECK(a == b);
    CHECK_FALSE(a == branch_trace(corpus_program("relu"), std::vector<double>{-1}));
  }

  TEST_CASE("traces are deterministic") {
    const auto a = branch_trace(corpus_program("floor"), std::vector<double>{-2.25});
    const auto b = branch_trace(corpus_program("floor"), std::vector<double>{-2.25});
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      CHECK(a.events[i].guard == b.events[i].guard);
      CHECK(a.events[i].kind == b.events[i].kind);
    }
  }

  TEST_CASE("divergent traces") {
    const auto t = branch_trace(make_program(P("(fix f:R -> R. \\n:R. f n) x")),
                                std::vector<double>{0}, testing::with_fuel(100));
    CHECK(t.outcome == OutcomeKind::FuelExhausted);
  }

  TEST_CASE("pre-traces of SillyId") {
    const Term silly = corpus("traces/sillyid").term;
    for (const char* t : {"traces/sillyid_t1", "traces/sillyid_t2", "traces/sillyid_t3"}) {
      CAPTURE(t);
      CHECK(pretrace_check(corpus(t).term, silly, 4));
    }
    CHECK_FALSE(pretrace_check(corpus("traces/id").term, corpus("traces/relu").term, 4));
    CHECK_FALSE(pretrace_check(P("\\x:R. 1"), silly, 4));
  }

  TEST_CASE("pre-trace rules") {
    CHECK(pretrace_check(P("\\x:R. x + 1"), P("\\x:R. x + 1")));
    CHECK(pretrace_check(P("\\y:R. y"), P("\\x:R. x")));
    CHECK(pretrace_check(P("(\\x:R. x) 2"), P("(\\x:R. x) 2")));
    CHECK_FALSE(pretrace_check(P("\\x:R. x + 1"), P("\\x:R. x + 2")));
    CHECK_THROWS_AS(pretrace_check(P("if 1 then 2 else 3"), P("1")), Error);
  }

  TEST_CASE("pre-traces through fixpoints") {
    // The first unfolding is (\f. \n. n) (\x. Omega x); the trace drops the
    // Omega argument with an empty tuple.
    const Term m = P("(fix f:R -> R. \\n:R. n) 1");
    const auto r = pretrace_check(P("(\\f:1. \\n:R. n) <> 1"), m, 4);
    CHECK(r.holds);
    CHECK_FALSE(r.bound_hit);
    CHECK_FALSE(pretrace_check(P("(\\n:R. n) 1"), m, 4));
    const auto miss = pretrace_check(P("(\\f:1. \\n:R. n + 1) <> 1"), m, 3);
    CHECK_FALSE(miss.holds);
    CHECK(miss.bound_hit);
  }

  TEST_CASE("traces agree with SillyId on their regions") {
    const Program silly = corpus_program("sillyid");
    const std::pair<const char*, std::vector<double>> cases[] = {
        {"traces/sillyid_t2", {-1.5, -0.25}}, {"traces/sillyid_t1", {0.0}},
        {"traces/sillyid_t3", {0.25, 2.0}}};
    for (const auto& [stem, points] : cases) {
      const Term t = corpus(stem).term;
      for (double r : points) {
        const auto tv = normalize(app(t, mk_numeral(r)), Strategy::HeadDeterministic, {});
        const auto mv = eval_program(silly, std::vector<double>{r}, Strategy::HeadDeterministic, {});
        REQUIRE(tv.ok());
        CHECK(decode_numerals(tv.term) == mv);
      }
    }
  }

  TEST_CASE("stability") {
    CHECK(stability(corpus_program("relu"), {0}) == StabilityVerdict::Kind::UnstableEmpirical);
    CHECK(stability(corpus_program("relu"), {1}) == StabilityVerdict::Kind::StableEmpirical);
    CHECK(stability(corpus_program("relu"), {-0.5}) == StabilityVerdict::Kind::StableEmpirical);
    CHECK(stability(corpus_program("eqproj_diag"), {0}) == StabilityVerdict::Kind::StableEmpirical);
    CHECK(stability(corpus_program("eqproj"), {0, 1}) == StabilityVerdict::Kind::StableEmpirical);
    CHECK(stability(corpus_program("eqproj"), {1, 1}) == StabilityVerdict::Kind::UnstableEmpirical);

    const auto v = stability_probe(corpus_program("relu"), std::vector<double>{0}, 0.1, 32, 42);
    REQUIRE(v.witness.size() == 1);
    CHECK(std::abs(v.witness[0]) <= 0.1);
    CHECK_FALSE(branch_trace(corpus_program("relu"), v.witness) ==
                branch_trace(corpus_program("relu"), std::vector<double>{0}));

    const Program loop = make_program(P("(fix f:R -> R. \\n:R. f n) x"));
    CHECK(stability_probe(loop, std::vector<double>{0}, 0.1, 4, 1, testing::with_fuel(100)).kind ==
          StabilityVerdict::Kind::Inconclusive);
  }

  TEST_CASE("scans") {
    ScanOptions opts;
    opts.samples = 10'000;
    const std::pair<double, double> box[] = {{-1, 1}};
    const auto sq = failure_scan(corpus_program("square"), box, opts);
    CHECK(sq.fail_fraction == 0.0);
    CHECK(sq.agree == sq.evaluated);
    CHECK(sq.evaluated == 10'000);

    opts.samples = 500;
    const auto relu = failure_scan(corpus_program("relu"), box, opts);
    CHECK(relu.fail == 0);
    CHECK(relu.agree + relu.outside_diff_domain == relu.evaluated);
  }

  TEST_CASE("scans count failures and bottom") {
    // A degenerate box pins every sample to a failure point.
    ScanOptions opts;
    opts.samples = 20;
    opts.fail_cap = 5;
    const std::pair<double, double> diag[] = {{1, 1}, {1, 1}};
    const auto r = failure_scan(corpus_program("eqproj"), diag, opts);
    CHECK(r.fail == 20);
    CHECK(r.fail_fraction == 1.0);
    CHECK(r.fail_points.size() == 5);

    const Program lg = make_program(P("log(x)"));
    const std::pair<double, double> around[] = {{-1, 1}};
    opts.samples = 400;
    const auto l = failure_scan(lg, around, opts);
    CHECK(l.divergent > 100);
    CHECK(l.divergent + l.evaluated == 400);
  }

  TEST_CASE("scans are reproducible and independent of the worker count") {
    ScanOptions opts;
    opts.samples = 300;
    opts.seed = 9;
    const std::pair<double, double> box[] = {{-1, 1}, {-1, 1}};
    const auto a = failure_scan(corpus_program("eqproj"), box, opts);
    opts.jobs = 4;
    opts.record_samples = true;
    const auto b = failure_scan(corpus_program("eqproj"), box, opts);
    CHECK(a.agree == b.agree);
    CHECK(a.fail_points == b.fail_points);
    REQUIRE(b.sample_log.size() == 300);
    opts.jobs = 1;
    const auto c = failure_scan(corpus_program("eqproj"), box, opts);
    for (std::size_t i = 0; i < 300; ++i) CHECK(b.sample_log[i].point == c.sample_log[i].point);
  }

  TEST_CASE("unit sampler") {
    UnitSampler a(5), b(5);
    for (int i = 0; i < 100; ++i) {
      const double x = a.next();
      CHECK(x == b.next());
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
  }
}
