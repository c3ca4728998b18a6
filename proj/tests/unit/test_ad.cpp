// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "corpus.hpp"
#include "pcfr/ad.hpp"
#include "term_gen.hpp"

using namespace pcfr;
using pcfr::testing::corpus;
using pcfr::testing::corpus_program;

namespace {

Term P(std::string_view text) { return parse_term(text); }

constexpr AdMode kModes[] = {AdMode::Forward, AdMode::Reverse};

std::vector<double> grad(const Program& p, AdMode mode, std::vector<double> r,
                         Strategy s = Strategy::CallByValue) {
  auto g = GradProgram(p, mode).evaluate(r, s, {});
  REQUIRE(g);
  return *g;
}

}  // namespace

TEST_SUITE("ad") {
  TEST_CASE("lifted types") {
    CHECK(to_string(ad_type(real_type(), AdMode::Forward, 2)) == "R^3");
    CHECK(to_string(ad_type(parse_type("R -> R"), AdMode::Reverse, 1)) ==
          "(R * (R -> R)) -> (R * (R -> R))");
    CHECK(to_string(ad_type(unit_type(), AdMode::Forward, 3)) == "1");
    CHECK(to_string(ad_type(parse_type("(R * (R -> R))"), AdMode::Forward, 1)) ==
          "(R^2 * (R^2 -> R^2))");
    CHECK_THROWS_AS(ad_type(real_type(), AdMode::Forward, 0), Error);
    for (AdMode m : kModes) CHECK(parse_ad_mode(to_string(m)) == m);
    CHECK(parse_ad_mode("reverse") == AdMode::Reverse);
  }

  TEST_CASE("forward transform of ReLU") {
    const Term d = ad_term(corpus("traces/relu").term, AdMode::Forward, 1);
    const auto nf = normalize(d, Strategy::FullNormalize, {});
    CHECK(alpha_eq(nf.term, P("\\x:R^2. if proj 1 2 x then <0, 0> else x")));
  }

  TEST_CASE("numerals lift to zero tangents") {
    for (std::size_t n : {1u, 2u, 5u}) {
      const auto out = normalize(ad_term(mk_numeral(2.5), AdMode::Forward, n),
                                 Strategy::FullNormalize, {});
      std::vector<double> expect(n + 1, 0.0);
      expect[0] = 2.5;
      CHECK(decode_numerals(out.term) == expect);

      const Term rev = ad_term(mk_numeral(2.5), AdMode::Reverse, n);
      const auto primal = normalize(proj(1, 2, rev), Strategy::CallByValue, {});
      CHECK(primal.term->value() == 2.5);
      const auto back = normalize(app(proj(2, 2, rev), mk_numeral(1)), Strategy::CallByValue, {});
      CHECK(decode_numerals(back.term) == std::vector<double>(n, 0.0));
    }
  }

  TEST_CASE("primitives without partials are rejected") {
    PrimRegistry reg;
    reg.add({"h", 1, [](std::span<const double> a) { return a[0]; }, {}});
    const Term t = prim_app(reg.find("h"), {var("x")});
    for (AdMode m : kModes) {
      try {
        ad_term(t, m, 1, reg);
        FAIL("expected MissingPartials");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingPartials);
      }
    }
  }

  TEST_CASE("typing lift on the corpus") {
    for (const char* stem : {"relu", "sillyid", "int", "floor", "crelu", "eqproj", "t_relu",
                             "square", "sub", "traces/relu"}) {
      const auto src = corpus(stem);
      const TypingEnv env = TypingEnv::ground(src.params);
      const Type a = infer(env, src.term);
      for (AdMode m : kModes) {
        for (std::size_t n : {1u, 3u}) {
          CAPTURE(stem);
          const Term d = ad_term(src.term, m, n);
          CHECK(type_equal(infer(ad_env(env, m, n), d), ad_type(a, m, n)));
        }
      }
    }
  }

  TEST_CASE("typing lift on random terms") {
    pcfr::testing::GenOptions opts;
    opts.prims = {"add", "mul", "sub", "neg", "sin", "exp"};
    opts.conditionals = true;
    opts.fixpoints = true;
    pcfr::testing::TermGen gen(7, opts);
    for (int i = 0; i < 300; ++i) {
      const Program p = gen.program(1 + i % 3);
      const TypingEnv env = TypingEnv::ground(p.params);
      for (AdMode m : kModes) {
        const std::size_t n = 1 + i % 4;
        CHECK(type_equal(infer(ad_env(env, m, n), ad_term(p.body, m, n)), ad_type(real_type(), m, n)));
      }
    }
  }

  TEST_CASE("gradients of the corpus") {
    for (AdMode m : kModes) {
      const Program relu = corpus_program("relu");
      CHECK(grad(relu, m, {2}) == std::vector<double>{1});
      CHECK(grad(relu, m, {-3}) == std::vector<double>{0});
      CHECK(grad(relu, m, {0}) == std::vector<double>{0});

      const Program crelu = corpus_program("crelu");
      CHECK(grad(crelu, m, {0}) == std::vector<double>{0.5});
      CHECK(grad(crelu, m, {1}) == std::vector<double>{1});
      CHECK(grad(crelu, m, {-1}) == std::vector<double>{0});

      const Program eqproj = corpus_program("eqproj");
      CHECK(grad(eqproj, m, {1, 1}) == std::vector<double>{1, 0});
      CHECK(grad(eqproj, m, {1, 2}) == std::vector<double>{0, 1});

      CHECK(grad(corpus_program("sillyid"), m, {0}) == std::vector<double>{0});
      CHECK(grad(corpus_program("square"), m, {3}) == std::vector<double>{6});
      CHECK(grad(corpus_program("sub"), m, {3, 1}) == std::vector<double>{1, -1});
      CHECK(grad(corpus_program("floor"), m, {2.5}) == std::vector<double>{0});
    }
  }

  TEST_CASE("gradients agree across strategies") {
    const Program p = make_program(P("(\\f:R -> R. f (f x)) (\\u:R. u * y + sin(u))"));
    for (AdMode m : kModes) {
      const auto ref = grad(p, m, {0.3, -1.2}, Strategy::CallByValue);
      for (Strategy s : {Strategy::HeadDeterministic, Strategy::CallByName, Strategy::FullNormalize}) {
        const auto g = grad(p, m, {0.3, -1.2}, s);
        REQUIRE(g.size() == 2);
        CHECK(g[0] == doctest::Approx(ref[0]).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(ref[1]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("gradient programs need scalar ground programs") {
    CHECK_THROWS_AS(GradProgram(make_program(P("<x, x>")), AdMode::Forward), TypeError);
    CHECK_THROWS_AS(GradProgram(make_program(P("\\z:R. x")), AdMode::Reverse), TypeError);
    CHECK_THROWS_AS(GradProgram(make_program(P("1")), AdMode::Reverse), TypeError);
  }

  TEST_CASE("size curves") {
    const Term sub = P("x - y");
    const std::size_t ns[] = {1, 2, 3, 4};
    const auto fwd = transform_size_curve(sub, AdMode::Forward, ns);
    for (std::size_t i = 1; i < fwd.size(); ++i) CHECK(fwd[i].second > fwd[i - 1].second);
    const auto rev = transform_size_curve(sub, AdMode::Reverse, ns);
    for (const auto& [n, size] : rev) CHECK(size == rev.front().second);

    const std::size_t three[] = {1, 2, 3};
    const auto lit = transform_size_curve(mk_numeral(5), AdMode::Forward, three);
    CHECK(lit[1].second - lit[0].second == lit[2].second - lit[1].second);
    CHECK(lit[1].second > lit[0].second);
  }

  TEST_CASE("transforming commutes with substituting numerals") {
    pcfr::testing::GenOptions opts;
    opts.prims = {"add", "mul", "sub", "sin"};
    opts.conditionals = true;
    pcfr::testing::TermGen gen(11, opts);
    for (int i = 0; i < 100; ++i) {
      const Program p = gen.program(2);
      const double r[] = {0.75, -1.25};
      std::vector<Term> nums{mk_numeral(r[0]), mk_numeral(r[1])};
      const Term ground = subst_closed(p.body, p.params, nums);

      // Forward: substitute <r, 0, 0> into D(M) and transform M{r/x}.
      std::vector<Term> lifted;
      for (double v : r) lifted.push_back(tuple({mk_numeral(v), mk_numeral(0), mk_numeral(0)}));
      const Term a = subst_closed(ad_term(p.body, AdMode::Forward, 2), p.params, lifted);
      const Term b = ad_term(ground, AdMode::Forward, 2);
      const EvalConfig cfg = testing::with_fuel(200'000);
      const auto na = normalize(a, Strategy::CallByValue, cfg);
      const auto nb = normalize(b, Strategy::CallByValue, cfg);
      REQUIRE(na.kind == nb.kind);
      if (na.ok()) CHECK(decode_numerals(na.term) == decode_numerals(nb.term));
    }
  }
}
