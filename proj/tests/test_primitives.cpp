#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dp/primitives.hpp"
#include "support.hpp"

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

struct Point {
  double h;
  double g;
};

/// Base over a grid of (h, g) levels with relations induced by the given
/// overall value; single-dimension relations follow the levels.
PrimitiveBase planted_base(const std::vector<Point>& grid, const std::function<double(Point)>& value) {
  PrimitiveBase b;
  for (std::size_t i = 0; i < grid.size(); ++i) b.carrier.emplace_back("e" + std::to_string(i));
  Relation rh(b.carrier), rg(b.carrier), all(b.carrier);
  for (std::size_t x = 0; x < grid.size(); ++x)
    for (std::size_t y = 0; y < grid.size(); ++y) {
      if (grid[x].h >= grid[y].h) rh.set(x, y);
      if (grid[x].g >= grid[y].g) rg.set(x, y);
      if (value(grid[x]) >= value(grid[y])) all.set(x, y);
    }
  b.per_dimension.emplace("h", rh);
  b.per_dimension.emplace("g", rg);
  b.multi_attribute.emplace("g+h", all);
  PerformanceTable t;
  t.carrier = b.carrier;
  t.attributes = {"h", "g"};
  for (const auto& p : grid) {
    t.values.push_back(p.h);
    t.values.push_back(p.g);
  }
  b.performances = t;
  return b;
}

std::vector<Point> full_grid(int hl, int gl) {
  std::vector<Point> out;
  for (int h = 0; h < hl; ++h)
    for (int g = 0; g < gl; ++g) out.push_back({double(h), double(g)});
  return out;
}

const std::vector<std::string> H{"h"};
const std::vector<std::string> G{"g"};

/// Answers swaps from a hidden value function on one attribute.
FunctionOracle swap_oracle(std::function<double(double)> v) {
  return FunctionOracle([v](const OracleQuery& q) -> Json {
    const auto& p = q.payload;
    const double d = v(p["to"].get<double>()) - v(p["from"].get<double>());
    const double r = v(p["ref_to"].get<double>()) - v(p["ref_from"].get<double>());
    if (std::fabs(d - r) <= 1e-9 * std::max(1.0, std::fabs(r))) return "indifferent";
    return d > r ? "more" : "less";
  });
}

Attribute numeric(const std::string& name, double lo, double hi, Direction dir = Direction::increasing) {
  Attribute a;
  a.name = name;
  a.scale = Scale::interval;
  a.codomain.lo = lo;
  a.codomain.hi = hi;
  a.direction = dir;
  return a;
}

double recovered_residual(const ValueFunction& fn, const std::function<double(double)>& v) {
  std::vector<double> truth;
  for (double p : fn.points) truth.push_back(v(p));
  return dpt::affine_residual(fn.values, truth);
}

ProblemFormulation two_attributes() {
  ProblemFormulation f;
  f.attributes = {numeric("h", 0, 10), numeric("g", 0, 10)};
  f.statement.kind = StatementKind::rating;
  f.statement.norms = NormSet{"grades", {{"good", {{"h", 5}}}}};
  return f;
}

PreferenceStatement st(std::vector<std::string> l, std::vector<std::string> r, std::vector<std::string> scope = {},
                       Comparator c = Comparator::weak) {
  PreferenceStatement s;
  s.lhs = std::move(l);
  s.rhs = std::move(r);
  s.scope = std::move(scope);
  s.comparator = c;
  return s;
}

}  // namespace

TEST_SUITE("primitives") {
  TEST_CASE("statement classification") {
    const ProblemFormulation f = two_attributes();
    const std::vector<ElementId> carrier = dpt::letters(3);
    const StatementContext ctx = make_context(carrier, f);
    CHECK(classify_preference_statement(st({"a"}, {"b"}, {"h"}), ctx) == PreferenceKind::first_order_relative);
    CHECK(classify_preference_statement(st({"a"}, {"b"}, {"h", "g"}), ctx) == PreferenceKind::multi_attribute);
    CHECK(classify_preference_statement(st({"a"}, {"good"}, {"h"}), ctx) == PreferenceKind::first_order_absolute);
    CHECK(classify_preference_statement(st({"a", "b"}, {"c"}), ctx) == PreferenceKind::extended);
    CHECK(classify_preference_statement(st({"h"}, {"g"}), ctx) == PreferenceKind::second_order);
    PreferenceStatement in = st({"a", "b"}, {"b", "c"});
    in.intensity = true;
    CHECK(classify_preference_statement(in, ctx) == PreferenceKind::intensity);
    in.rhs = {"c"};
    CHECK(code_of([&] { classify_preference_statement(in, ctx); }) == ErrorCode::UnsupportedStatement);
    CHECK(code_of([&] { classify_preference_statement(st({"zzz"}, {"a"}), ctx); }) == ErrorCode::UnknownReference);
    CHECK(code_of([&] { classify_preference_statement(st({"a"}, {"b"}, {"depth"}), ctx); }) ==
          ErrorCode::UnknownReference);
    PreferenceStatement declared = st({"a"}, {"b"}, {"h"});
    declared.kind = PreferenceKind::extended;
    CHECK(code_of([&] { classify_preference_statement(declared, ctx); }) == ErrorCode::UnsupportedStatement);
  }

  TEST_CASE("compiling a primitive base") {
    const ProblemFormulation f = two_attributes();
    PreferenceStatement neg = st({"b"}, {"c"}, {"h"});
    neg.polarity = Polarity::explicit_negative;
    const std::vector<PreferenceStatement> s = {
        st({"a"}, {"b"}, {"h"}, Comparator::strict), st({"a"}, {"b"}, {"h", "g"}), st({"a"}, {"good"}, {"h"}),
        st({"h"}, {"g"}), st({"a", "b"}, {"c"}), neg};
    const CompiledBase c = compile_primitive_base(s, f, dpt::letters(3));
    const Relation& h = c.base.per_dimension.at("h");
    CHECK(h.holds("a", "b"));
    CHECK(h.holds("c", "c"));
    CHECK_FALSE(h.holds("b", "a"));
    // a denial is not turned into the reverse pair
    CHECK_FALSE(h.holds("c", "b"));
    CHECK(c.base.negatives.at("h").count({"b", "c"}));
    CHECK(c.base.multi_attribute.at("g+h").holds("a", "b"));
    CHECK(c.base.norms.at("h").holds("a", "good"));
    CHECK(c.base.extended.size() == 1);
    REQUIRE(c.rejections.size() == 1);
    CHECK(c.rejections[0].index == 3);
    CHECK(c.rejections[0].kind == PreferenceKind::second_order);
    CHECK(c.rejections[0].reason.find("not a primitive") != std::string::npos);
    CHECK(c.base.parked.size() == 1);
    CHECK(c.base.derived_importance.empty());
  }

  TEST_CASE("inconsistent statements") {
    const ProblemFormulation f = two_attributes();
    PreferenceStatement neg = st({"a"}, {"b"}, {"h"});
    neg.polarity = Polarity::explicit_negative;
    const std::vector<PreferenceStatement> deny_after = {st({"a"}, {"b"}, {"h"}), neg};
    const std::vector<PreferenceStatement> deny_before = {neg, st({"a"}, {"b"}, {"h"})};
    const std::vector<PreferenceStatement> reversed = {st({"a"}, {"b"}, {"h"}, Comparator::strict),
                                                       st({"b"}, {"a"}, {"h"})};
    const std::vector<PreferenceStatement> reversed_late = {st({"b"}, {"a"}, {"h"}),
                                                            st({"a"}, {"b"}, {"h"}, Comparator::strict)};
    for (const auto* list : {&deny_after, &deny_before, &reversed, &reversed_late})
      CHECK(code_of([&] { compile_primitive_base(*list, f, dpt::letters(2)); }) == ErrorCode::InconsistentStatements);
  }

  TEST_CASE("a statement without scope needs a single attribute") {
    const ProblemFormulation f = two_attributes();
    const std::vector<PreferenceStatement> s = {st({"a"}, {"b"})};
    CHECK(code_of([&] { compile_primitive_base(s, f, dpt::letters(2)); }) == ErrorCode::UnknownReference);
  }

  TEST_CASE("importance on planted data") {
    const auto grid = full_grid(3, 3);
    const PrimitiveBase lex = planted_base(grid, [](Point p) { return p.h * 10 + p.g; });
    const ImportanceVerdict v = derive_importance(lex, H, G);
    CHECK(v.verdict == Importance::h_over_g);
    REQUIRE(v.witness);
    CHECK_FALSE(v.reverse_witness);
    CHECK(v.independence == IndependenceVerdict::independent);
    CHECK(derive_importance(lex, G, H).verdict == Importance::g_over_h);

    const PrimitiveBase sym = planted_base(full_grid(2, 2), [](Point p) { return p.h + p.g; });
    const ImportanceVerdict s = derive_importance(sym, H, G);
    CHECK(s.verdict == Importance::incomparable);
    CHECK_FALSE(s.witness);
  }

  TEST_CASE("importance needs independence") {
    std::vector<Point> grid = full_grid(2, 2);
    for (auto& p : grid) p.g = p.g * 2 - 1;
    const PrimitiveBase cond = planted_base(grid, [](Point p) { return p.h * p.g; });
    CHECK(code_of([&] { derive_importance(cond, H, G); }) == ErrorCode::DependentDimensions);
  }

  TEST_CASE("parked importance statements are checked, not applied") {
    const auto grid = full_grid(3, 2);
    PrimitiveBase b = planted_base(grid, [](Point p) { return p.h * 10 + p.g; });
    b.parked.push_back(st({"h"}, {"g"}, {}, Comparator::strict));
    b.parked.push_back(st({"g"}, {"h"}, {}, Comparator::strict));
    const auto checks = check_parked_importance(b);
    REQUIRE(checks.size() == 2);
    CHECK(checks[0].consistent);
    CHECK_FALSE(checks[1].consistent);
    CHECK(b.derived_importance.empty());
  }

  TEST_CASE("independence verdicts") {
    const PrimitiveBase add = planted_base(full_grid(3, 3), [](Point p) { return 2 * p.h + p.g; });
    CHECK(check_preferential_independence(add, H, G).verdict == IndependenceVerdict::independent);
    CHECK(check_preferential_independence(add, H, G).compared > 0);

    std::vector<Point> grid = full_grid(2, 2);
    for (auto& p : grid) p.g = p.g * 2 - 1;
    const auto dep = check_preferential_independence(planted_base(grid, [](Point p) { return p.h * p.g; }), H, G);
    CHECK(dep.verdict == IndependenceVerdict::dependent);
    CHECK(dep.counterexample);

    const PrimitiveBase one = planted_base(full_grid(3, 1), [](Point p) { return p.h; });
    CHECK(check_preferential_independence(one, H, G).verdict == IndependenceVerdict::inconclusive);

    PrimitiveBase none = one;
    none.performances.reset();
    CHECK(check_preferential_independence(none, H, G).verdict == IndependenceVerdict::inconclusive);
  }

  TEST_CASE("separability") {
    // overall preference depends only on g
    const PrimitiveBase b = planted_base(full_grid(2, 2), [](Point p) { return p.g; });
    const auto h = check_separability("h", b);
    CHECK(h.verdict == SeparabilityVerdict::not_separable);
    CHECK(h.twins == 2);
    const auto g = check_separability("g", b);
    CHECK(g.verdict == SeparabilityVerdict::separable);
    REQUIRE(g.witness);
    CHECK(g.witness->first == ElementId("e1"));

    const PrimitiveBase single = planted_base({{0, 0}}, [](Point p) { return p.g; });
    CHECK(check_separability("g", single).verdict == SeparabilityVerdict::inconclusive);
  }

  TEST_CASE("value function recovery") {
    const auto v = [](double u) { return 2 * u + 3; };
    FunctionOracle oracle = swap_oracle(v);
    const ValueFunction fn = derive_value_function({}, numeric("u", 0, 100), oracle);
    REQUIRE(fn.points.size() == 9);
    CHECK(fn.points.front() == 0);
    CHECK(fn.points.back() == 100);
    CHECK(recovered_residual(fn, v) <= 1e-6);
    CHECK(fn(50) == doctest::Approx(4).epsilon(1e-6));
    CHECK(check_swap_consistency(fn, oracle));

    const auto concave = [](double u) { return std::sqrt(u + 1); };
    FunctionOracle co = swap_oracle(concave);
    const ValueFunction cf = derive_value_function({}, numeric("u", 0, 100), co);
    CHECK(recovered_residual(cf, concave) <= 1e-6);
    // equal value steps get wider toward the best end
    CHECK(cf.points[2] - cf.points[1] > cf.points[1] - cf.points[0]);
  }

  TEST_CASE("value function on a cost attribute") {
    const auto v = [](double u) { return -u; };
    FunctionOracle oracle = swap_oracle(v);
    const ValueFunction fn = derive_value_function({}, numeric("cost", 0, 80, Direction::decreasing), oracle);
    CHECK(fn.points.front() == 0);
    CHECK(fn.values.front() == 8);
    CHECK(fn.values.back() == 0);
    CHECK(recovered_residual(fn, v) <= 1e-6);
  }

  TEST_CASE("value function edge cases") {
    FunctionOracle unused([](const OracleQuery&) -> Json {
      FAIL("no question expected");
      return "less";
    });
    const ValueFunction c = derive_value_function({}, numeric("u", 5, 5), unused);
    CHECK(c.points == std::vector<double>{5});
    CHECK(c(7) == 0);

    FunctionOracle always_more([](const OracleQuery&) -> Json { return "more"; });
    CHECK(code_of([&] { derive_value_function({}, numeric("u", 0, 100), always_more); }) ==
          ErrorCode::IntransitiveSwaps);

    Attribute labels;
    labels.name = "grade";
    labels.codomain.labels = {"low", "high"};
    CHECK(code_of([&] { derive_value_function({}, labels, always_more); }) == ErrorCode::NotRepresentable);

    ScriptedOracle empty;
    CHECK(code_of([&] { derive_value_function({}, numeric("u", 0, 1), empty); }) == ErrorCode::IncompleteElicitation);

    FunctionOracle garbage([](const OracleQuery&) -> Json { return 3; });
    CHECK(code_of([&] { derive_value_function({}, numeric("u", 0, 1), garbage); }) == ErrorCode::ProtocolViolation);
  }

  TEST_CASE("swap consistency catches a wrong function") {
    FunctionOracle oracle = swap_oracle([](double u) { return u * u; });
    const ValueFunction linear{"u", {0, 1, 2, 3}, {0, 1, 2, 3}};
    CHECK_FALSE(check_swap_consistency(linear, oracle));
  }

  TEST_CASE("property: planted lexicographic importance is recovered") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
      const int hl = 2 + static_cast<int>(rng() % 3), gl = 2 + static_cast<int>(rng() % 3);
      auto grid = full_grid(hl, gl);
      std::shuffle(grid.begin(), grid.end(), rng);
      const bool h_first = rng() % 2;
      const PrimitiveBase b = planted_base(grid, [&](Point p) { return h_first ? p.h * 10 + p.g : p.g * 10 + p.h; });
      const ImportanceVerdict v = derive_importance(b, H, G);
      CHECK(v.verdict == (h_first ? Importance::h_over_g : Importance::g_over_h));
    }
  }

  TEST_CASE("property: equal-weight additive data shows no importance") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 50; ++t) {
      const int levels = 2 + static_cast<int>(rng() % 3);
      auto grid = full_grid(levels, levels);
      std::shuffle(grid.begin(), grid.end(), rng);
      const PrimitiveBase b = planted_base(grid, [](Point p) { return p.h + p.g; });
      CHECK(derive_importance(b, H, G).verdict == Importance::incomparable);
    }
  }

  TEST_CASE("property: value functions are recovered up to an affine map") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> coef(0.1, 3);
    for (int t = 0; t < 20; ++t) {
      const double a = coef(rng), b = coef(rng) * (t % 2), hi = 10 + coef(rng) * 30;
      const auto v = [a, b](double u) { return a * u + b * u * u; };
      FunctionOracle oracle = swap_oracle(v);
      ValueFunctionOptions opts;
      opts.grid = 3 + static_cast<std::size_t>(t % 5);
      const ValueFunction fn = derive_value_function({}, numeric("u", 0, hi), oracle, opts);
      CHECK(fn.points.size() == opts.grid);
      CHECK(recovered_residual(fn, v) <= 1e-6 * (a * hi + b * hi * hi));
      for (std::size_t k = 1; k < fn.points.size(); ++k) CHECK(fn.points[k] > fn.points[k - 1]);
    }
  }
}
