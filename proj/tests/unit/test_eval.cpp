// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <doctest.h>

#include "corpus.hpp"
#include "pcfr/eval.hpp"

using namespace pcfr;
using pcfr::testing::corpus_program;

namespace {

Term P(std::string_view text) { return parse_term(text); }

constexpr Strategy kAll[] = {Strategy::HeadDeterministic, Strategy::CallByValue,
                             Strategy::CallByName, Strategy::FullNormalize};

std::optional<double> run1(const Program& p, std::vector<double> args, Strategy s,
                           EvalConfig cfg = {}) {
  auto v = eval_program(p, args, s, cfg);
  if (!v) return std::nullopt;
  REQUIRE(v->size() == 1);
  return v->front();
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("single steps") {
    auto s = step(P("if 1 then 5 else 7"), Strategy::HeadDeterministic);
    REQUIRE(s);
    CHECK(s->term->value() == 7.0);
    REQUIRE(s->event);
    CHECK(s->event->branch == Branch::Else);
    CHECK(s->event->guard == 1.0);

    s = step(P("proj 2 3 <1, 2, 3>"), Strategy::CallByValue);
    REQUIRE(s);
    CHECK(s->term->value() == 2.0);
    CHECK_FALSE(s->event);

    CHECK_THROWS_AS(step(P("log(-1)"), Strategy::CallByName), PrimDomainError);
    CHECK_FALSE(step(mk_numeral(4), Strategy::FullNormalize));
  }

  TEST_CASE("guard zero and negative zero select then") {
    for (Strategy s : kAll) {
      const auto a = normalize(P("if 0 then 1 else 2"), s, {});
      CHECK(a.term->value() == 1.0);
      const auto b = normalize(P("if -1 * 0 then 1 else 2"), s, {});
      CHECK(b.term->value() == 1.0);
    }
  }

  TEST_CASE("normal forms") {
    const Program silly = corpus_program("sillyid");
    for (Strategy s : kAll) CHECK(run1(silly, {0}, s) == 0.0);

    const auto omega_app = app(omega(parse_type("R -> R")), mk_numeral(1));
    const auto out = normalize(omega_app, Strategy::HeadDeterministic, testing::with_fuel(1000));
    CHECK(out.kind == OutcomeKind::FuelExhausted);
    CHECK(out.steps == 1000);

    const auto dom = normalize(P("1 + log(0 - 2)"), Strategy::CallByValue, {});
    CHECK(dom.kind == OutcomeKind::PrimDomainError);
    CHECK(dom.symbol == "log");
    CHECK(dom.args == std::vector<double>{-2});

    CHECK_THROWS_AS(normalize(mk_numeral(1), Strategy::CallByValue, testing::with_fuel(0)), Error);
  }

  TEST_CASE("stuck terms") {
    // Only reachable from ill-typed input.
    for (Strategy s : kAll) {
      const auto out = normalize(app(mk_numeral(1), mk_numeral(2)), s, {});
      CHECK(out.kind == OutcomeKind::Stuck);
      CHECK(normalize(P("proj 1 2 (\\x:R. x)"), s, {}).kind == OutcomeKind::Stuck);
    }
    // Open terms are never stuck: a variable in head position is a normal form.
    CHECK(normalize(P("y 1"), Strategy::HeadDeterministic, {}).kind == OutcomeKind::NormalForm);
  }

  TEST_CASE("floor unfolds the fixpoint and logs decisions") {
    EvalConfig cfg;
    cfg.record_decisions = true;
    const auto out =
        run_program(corpus_program("floor"), std::vector<double>{2.5}, Strategy::HeadDeterministic, cfg);
    REQUIRE(out.ok());
    CHECK(out.term->value() == 2.0);
    std::size_t unfolds = 0, conds = 0;
    for (const auto& d : out.decisions) {
      (d.kind == Decision::Kind::FixUnfolded ? unfolds : conds) += 1;
    }
    CHECK(unfolds == 3);
    CHECK(conds > 0);
    CHECK(out.decisions.front().kind == Decision::Kind::FixUnfolded);
  }

  TEST_CASE("program evaluation") {
    CHECK(run1(corpus_program("relu"), {-2}, Strategy::HeadDeterministic) == 0.0);
    CHECK(run1(corpus_program("relu"), {2}, Strategy::CallByName) == 2.0);
    CHECK(run1(corpus_program("eqproj"), {3, 3}, Strategy::FullNormalize) == 3.0);
    CHECK(run1(corpus_program("floor"), {-0.5}, Strategy::HeadDeterministic) == -1.0);
    for (Strategy s : kAll) {
      CHECK(run1(corpus_program("floor"), {2.5}, s) == 2.0);
      CHECK(run1(corpus_program("int"), {2.5, 2}, s) == 0.0);
      CHECK(run1(corpus_program("int"), {3.5, 2}, s) == 1.0);
      CHECK(run1(corpus_program("crelu"), {-1}, s) == 0.0);
    }
  }

  TEST_CASE("eval_program rejects arity and type mismatches") {
    CHECK_THROWS_AS(eval_program(corpus_program("relu"), std::vector<double>{1, 2},
                                 Strategy::HeadDeterministic, {}),
                    TypeError);
    CHECK_THROWS_AS(eval_program(make_program(P("\\z:R. z")), {}, Strategy::HeadDeterministic, {}),
                    TypeError);
  }

  TEST_CASE("divergence and domain errors are bottom") {
    const Program p = make_program(P("(fix f:R -> R. \\n:R. f n) x"));
    CHECK_FALSE(run1(p, {1}, Strategy::CallByValue, testing::with_fuel(500)));
    CHECK_FALSE(run1(make_program(P("recip(x)")), {0}, Strategy::CallByValue));
    CHECK(run1(make_program(P("recip(x)")), {4}, Strategy::CallByValue) == 0.25);
  }

  TEST_CASE("capped fixpoints") {
    const Program floor = corpus_program("floor");
    EvalConfig shallow;
    shallow.fix_cap = 1;
    shallow.fuel = 10'000;
    CHECK_FALSE(run1(floor, {2.5}, Strategy::CallByValue, shallow));
    EvalConfig deep;
    deep.fix_cap = 4;
    CHECK(run1(floor, {2.5}, Strategy::CallByValue, deep) == 2.0);
  }

  TEST_CASE("full normalization reduces under binders") {
    const auto out = normalize(P("\\y:R. (\\x:R. x + 1) y"), Strategy::FullNormalize, {});
    CHECK(alpha_eq(out.term, P("\\y:R. y + 1")));
    const auto weak = normalize(P("\\y:R. (\\x:R. x + 1) y"), Strategy::CallByValue, {});
    CHECK(alpha_eq(weak.term, P("\\y:R. (\\x:R. x + 1) y")));
  }

  TEST_CASE("call-by-value evaluates arguments first") {
    const Term t = P("(\\x:R. 1) log(0 - 1)");
    CHECK(normalize(t, Strategy::CallByValue, {}).kind == OutcomeKind::PrimDomainError);
    CHECK(normalize(t, Strategy::CallByName, {}).term->value() == 1.0);
    CHECK(normalize(t, Strategy::HeadDeterministic, {}).term->value() == 1.0);
  }

  TEST_CASE("strategy names") {
    for (Strategy s : kAll) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_FALSE(parse_strategy("lazy"));
  }

  TEST_CASE("decoding") {
    CHECK(decode_numerals(P("<1, 2>")) == std::vector<double>{1, 2});
    CHECK(decode_numerals(mk_numeral(3)) == std::vector<double>{3});
    CHECK_FALSE(decode_numerals(P("\\x:R. x")));
  }
}
