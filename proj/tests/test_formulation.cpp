#include <doctest.h>

#include <random>
#include <set>

#include "dp/cases.hpp"
#include "dp/formulation.hpp"

using namespace dp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ParseError;
}

Attribute ordinal(const std::string& name, std::vector<std::string> labels, const std::string& expr) {
  Attribute a;
  a.name = name;
  a.codomain.labels = std::move(labels);
  a.evaluator = Expression(expr);
  return a;
}

ProblemFormulation single_variable(StatementKind kind) {
  ProblemFormulation f;
  f.alternatives.variables = {{"level", Domain::enumerated({"low", "mid", "high"})}};
  f.attributes = {ordinal("quality", {"low", "mid", "high"}, "level")};
  f.statement.kind = kind;
  return f;
}

Attribute knapsack_weight(std::vector<double> weights) {
  Attribute w;
  w.name = "weight";
  w.scale = Scale::ratio;
  w.codomain.hi = 100;
  w.direction = Direction::decreasing;
  Decomposition d;
  for (std::size_t i = 0; i < weights.size(); ++i)
    d.per_variable.emplace("item" + std::to_string(i + 1), Expression(std::to_string(weights[i]) + " * x"));
  w.decomposition = std::move(d);
  return w;
}

AlternativeSet items(std::size_t n) {
  AlternativeSet s;
  for (std::size_t i = 0; i < n; ++i) s.variables.push_back({"item" + std::to_string(i + 1), Domain::binary()});
  return s;
}

}  // namespace

TEST_SUITE("formulation") {
  TEST_CASE("problem statement classification") {
    CHECK(classify_problem_statement(true, Comparison::relative) == StatementKind::ranking);
    CHECK(classify_problem_statement(true, Comparison::absolute) == StatementKind::rating);
    CHECK(classify_problem_statement(false, Comparison::relative) == StatementKind::clustering);
    CHECK(classify_problem_statement(false, Comparison::absolute) == StatementKind::assignment);
    std::set<StatementKind> all;
    for (bool o : {false, true})
      for (auto c : {Comparison::relative, Comparison::absolute}) all.insert(classify_problem_statement(o, c));
    CHECK(all.size() == 4);
  }

  TEST_CASE("validation") {
    ProblemFormulation f = single_variable(StatementKind::ranking);
    f.attributes[0].separable = false;
    CHECK(code_of([&] { validate_formulation(f); }) == ErrorCode::NoDecisionProblem);

    ProblemFormulation choice = single_variable(StatementKind::ranking);
    choice.statement.class_count = 2;
    const Diagnostics d = validate_formulation(choice);
    CHECK(d.ok);
    CHECK(d.choice);

    CHECK(code_of([] { validate_formulation(single_variable(StatementKind::rating)); }) == ErrorCode::MissingNorms);
    CHECK(code_of([] { validate_formulation(single_variable(StatementKind::assignment)); }) == ErrorCode::MissingNorms);

    ProblemFormulation bad_ref = single_variable(StatementKind::ranking);
    bad_ref.attributes[0].evaluator = Expression("nothing + 1");
    CHECK(code_of([&] { validate_formulation(bad_ref); }) == ErrorCode::UnknownReference);

    ProblemFormulation norms = single_variable(StatementKind::rating);
    norms.statement.norms = NormSet{"grades", {{"good", {{"missing", 1}}}}};
    CHECK(code_of([&] { validate_formulation(norms); }) == ErrorCode::UnknownReference);
  }

  TEST_CASE("enumeration") {
    const AlternativeSet twenty = items(20);
    const Enumeration e = enumerate_alternatives(twenty, 10);
    REQUIRE(e.total);
    CHECK(*e.total == 1048576u);
    CHECK(e.alternatives.size() == 10);

    const Enumeration one = enumerate_alternatives(items(1), 10);
    REQUIRE(one.alternatives.size() == 2);
    CHECK(one.alternatives[0].values() == std::vector<double>{0});
    CHECK(one.alternatives[1].values() == std::vector<double>{1});

    AlternativeSet real;
    real.variables = {{"t", Domain::real_interval(0, 1)}};
    CHECK(code_of([&] { enumerate_alternatives(real, 10); }) == ErrorCode::NotEnumerable);

    const Enumeration beyond = enumerate_alternatives(items(22), 4);
    CHECK_FALSE(beyond.total);
    CHECK(beyond.alternatives.size() == 4);
  }

  TEST_CASE("enumeration respects constraints and explicit members") {
    AlternativeSet s = items(3);
    s.feasibility.emplace_back(LinearConstraint{{{"item1", 1}, {"item2", 1}, {"item3", 1}}, Sense::le, 1});
    const Enumeration e = enumerate_alternatives(s, 100);
    CHECK(*e.total == 4);

    AlternativeSet m = items(2);
    m.explicit_members = std::vector<ExplicitMember>{{"both", {{"item1", 1}, {"item2", 1}}},
                                                     {"none", {{"item1", 0}, {"item2", 0}}}};
    const Enumeration me = enumerate_alternatives(m, 100);
    REQUIRE(me.alternatives.size() == 2);
    CHECK(me.alternatives[0].id() == "both");

    m.feasibility.emplace_back(LinearConstraint{{{"item1", 1}}, Sense::eq, 0});
    CHECK(code_of([&] { enumerate_alternatives(m, 100); }) == ErrorCode::InvalidFormulation);
  }

  TEST_CASE("extension predicates") {
    register_predicate("even_count", [](const Alternative& a) {
      double s = 0;
      for (double v : a.values()) s += v;
      return static_cast<int>(s) % 2 == 0;
    });
    AlternativeSet s = items(3);
    s.feasibility.emplace_back(ExtensionPredicate{"even_count"});
    CHECK(*enumerate_alternatives(s, 100).total == 4);
    s.feasibility.back() = ExtensionPredicate{"unregistered"};
    CHECK(code_of([&] { enumerate_alternatives(s, 100); }) == ErrorCode::UnknownReference);
  }

  TEST_CASE("evaluation examples") {
    const CoveringCase p5 = build_covering_case(path_instance(5));
    const Alternative open25 = p5.formulation.alternatives.make(std::vector<double>{0, 1, 0, 0, 1});
    const auto o = std::find_if(p5.formulation.attributes.begin(), p5.formulation.attributes.end(),
                                [](const Attribute& a) { return a.name == "o"; });
    CHECK(evaluate_attribute(open25, *o) == 2);

    const AlternativeSet bag = items(2);
    const Attribute w = knapsack_weight({3, 5});
    CHECK(evaluate_attribute(bag.make(std::vector<double>{0, 0}), w) == 0);
    CHECK(evaluate_decomposed(bag.make(std::vector<double>{1, 1}), w) == 8);

    const AliceCase alice = build_alice_case();
    const Alternative sb = alice.formulation.alternatives.make(std::vector<double>{2});
    REQUIRE(sb.id() == "sb");
    const Attribute& not_accepted = alice.formulation.attributes[2];
    CHECK(describe_value(not_accepted, evaluate_attribute(sb, not_accepted)) == "ticket cost -t, no reward");
  }

  TEST_CASE("nominal attributes cannot be summed") {
    Attribute colour;
    colour.name = "colour";
    colour.scale = Scale::nominal;
    colour.codomain.labels = {"red", "blue"};
    Decomposition d;
    d.per_variable.emplace("item1", Expression("x"));
    d.function = AggregationFn::sum;
    colour.decomposition = d;
    CHECK(code_of([&] { evaluate_decomposed(items(1).make(std::vector<double>{1}), colour); }) ==
          ErrorCode::NotAggregable);
  }

  TEST_CASE("custom decomposition hook") {
    register_aggregation("product", [](std::span<const double> v) {
      double p = 1;
      for (double x : v) p *= x;
      return p;
    });
    Attribute a = knapsack_weight({2, 4});
    a.decomposition->function = AggregationFn::custom;
    a.decomposition->custom_name = "product";
    CHECK(evaluate_decomposed(items(2).make(std::vector<double>{1, 1}), a) == 8);
  }

  TEST_CASE("alternatives reject values outside their domain") {
    CHECK_THROWS_AS(items(1).make(std::vector<double>{2}), Error);
    CHECK_THROWS_AS(items(2).make(std::vector<double>{1}), Error);
  }

  TEST_CASE("label codomains check evaluator codes") {
    ProblemFormulation f = single_variable(StatementKind::ranking);
    f.attributes[0].evaluator = Expression("level + 5");
    const Alternative a = f.alternatives.make(std::vector<double>{0});
    CHECK(code_of([&] { evaluate_attribute(a, f.attributes[0]); }) == ErrorCode::EvaluationFailure);
  }

  TEST_CASE("induced relation follows direction") {
    const AlternativeSet bag = items(2);
    std::vector<Alternative> alts;
    for_each_alternative(bag, [&](const Alternative& a) {
      alts.push_back(a);
      return true;
    });
    const Attribute w = knapsack_weight({3, 5});
    const auto table = build_performance_table(alts, std::vector<Attribute>{w});
    const Relation r = induced_relation(table, 0, w);
    // lighter is better
    CHECK(r.holds(0, 3));
    CHECK_FALSE(r.holds(3, 0));
    CHECK(check_properties(r).total_preorder);
  }

  TEST_CASE("expression language") {
    ExpressionContext ctx;
    ctx.value = [](std::string_view n) -> std::optional<double> {
      if (n == "x") return 2;
      return std::nullopt;
    };
    CHECK(Expression("1 + 2 * x").evaluate(ctx) == 5);
    CHECK(Expression("if(x > 1, 10, 20)").evaluate(ctx) == 10);
    CHECK(Expression("max(1, x, 3) - min(4, x)").evaluate(ctx) == 1);
    CHECK(Expression("not x == 2 or x >= 2 and 1").evaluate(ctx) == 1);
    CHECK(Expression("1.5e1").evaluate(ctx) == 15);
    CHECK_THROWS_AS(Expression("1 +"), Error);
    CHECK_THROWS_AS(Expression("y + 1").evaluate(ctx), Error);
    CHECK_THROWS_AS(Expression("1 / (x - 2)").evaluate(ctx), Error);
    CHECK(Expression("abs(x) + sum(1, 2)").identifiers() == std::set<std::string>{"x"});
  }

  TEST_CASE("property: enumeration yields each feasible alternative once") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 40; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 11);
      AlternativeSet s = items(n);
      LinearConstraint lc;
      std::uniform_int_distribution<int> coef(-2, 3);
      for (std::size_t i = 0; i < n; ++i) lc.coefficients["item" + std::to_string(i + 1)] = coef(rng);
      lc.rhs = 1;
      s.feasibility.emplace_back(lc);
      std::set<std::vector<double>> seen;
      std::uint64_t visits = 0;
      for_each_alternative(s, [&](const Alternative& a) {
        ++visits;
        seen.insert(a.values());
        return true;
      });
      std::uint64_t expected = 0;
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        double lhs = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (m >> (n - 1 - i) & 1) lhs += lc.coefficients["item" + std::to_string(i + 1)];
        expected += lhs >= 1;
      }
      CHECK(visits == seen.size());
      CHECK(visits == expected);
      CHECK(*enumerate_alternatives(s, 0).total == expected);
    }
  }

  TEST_CASE("property: additive decomposition") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 10);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 6;
      std::vector<double> weights(n);
      for (auto& w : weights) w = std::round(u(rng) * 4) / 4;
      const Attribute a = knapsack_weight(weights);
      const AlternativeSet s = items(n);
      std::vector<double> b1(n), b2(n), both(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int who = static_cast<int>(rng() % 3);
        b1[i] = who == 1;
        b2[i] = who == 2;
        both[i] = who != 0;
      }
      CHECK(evaluate_decomposed(s.make(both), a) ==
            doctest::Approx(evaluate_decomposed(s.make(b1), a) + evaluate_decomposed(s.make(b2), a)));
    }
  }
}
