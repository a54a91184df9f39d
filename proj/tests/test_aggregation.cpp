#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "dp/aggregation.hpp"
#include "support.hpp"

using namespace dp;
using dpt::letters;

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

Relation linear(const std::vector<std::size_t>& levels) { return dpt::order_of(letters(levels.size()), levels); }

std::vector<std::size_t> random_levels(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> v(n);
  for (auto& l : v) l = rng() % n;
  return v;
}

Valuation random_valuation(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 6);
  Valuation f{letters(n), {}};
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(d(rng));
  return f;
}

AggregationProfile profile_of(std::vector<std::string> dims, bool measurable) {
  AggregationProfile p;
  for (auto& d : dims) p.differences_measurable[d] = measurable;
  return p;
}

bool strictly(const Relation& r, std::size_t x, std::size_t y) { return r.holds(x, y) && !r.holds(y, x); }

}  // namespace

TEST_SUITE("aggregation") {
  TEST_CASE("archetype dispatch") {
    PrimitiveBase base;
    const AggregationProfile plain = profile_of({"a", "b", "c"}, false);
    const Aggregator m = select_archetype(plain, base);
    CHECK(m.archetype == Archetype::majority_relational);
    CHECK(m.threshold == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(m.log.empty());

    AggregationProfile neg = plain;
    neg.negative_preferences = true;
    base.negatives["a"] = {{"x", "y"}};
    base.negatives["b"] = {{"x", "y"}, {"y", "z"}};
    const Aggregator v = select_archetype(neg, base);
    CHECK(v.archetype == Archetype::veto_majority);
    CHECK(v.vetoes == std::vector<ElementPair>{{"x", "y"}, {"y", "z"}});

    AggregationProfile w = profile_of({"a", "b"}, true);
    w.commensurable = true;
    w.preferentially_independent = true;
    const Aggregator ws = select_archetype(w, base);
    CHECK(ws.archetype == Archetype::weighted_functional);
    CHECK(ws.weights == std::vector<double>{0.5, 0.5});

    AggregationProfile bad = plain;
    bad.commensurable = true;
    CHECK(code_of([&] { select_archetype(bad, base); }) == ErrorCode::NoAdmissibleArchetype);

    PrimitiveBase ordered;
    ordered.derived_importance.push_back({{"a"}, {"b"}, Importance::h_over_g, {}, {}, {}});
    ordered.derived_importance.push_back({{"b"}, {"c"}, Importance::h_over_g, {}, {}, {}});
    ordered.derived_importance.push_back({{"a"}, {"c"}, Importance::h_over_g, {}, {}, {}});
    const Aggregator lex = select_archetype(plain, ordered);
    CHECK(lex.archetype == Archetype::lexicographic);
    CHECK(lex.importance_order == std::vector<std::string>{"a", "b", "c"});

    AggregationProfile anon = plain;
    anon.required.insert(RequiredProperty::anonymity);
    CHECK(select_archetype(anon, ordered).archetype == Archetype::majority_relational);

    AggregationProfile forced = plain;
    forced.forced = Archetype::lexicographic;
    CHECK(code_of([&] { select_archetype(forced, PrimitiveBase{}); }) == ErrorCode::NoAdmissibleArchetype);
    forced.forced = Archetype::weighted_functional;
    CHECK(code_of([&] { select_archetype(forced, PrimitiveBase{}); }) == ErrorCode::NoAdmissibleArchetype);
    forced.forced = Archetype::veto_majority;
    CHECK(code_of([&] { select_archetype(forced, PrimitiveBase{}); }) == ErrorCode::NoAdmissibleArchetype);
    forced.forced = Archetype::majority_relational;
    CHECK(select_archetype(forced, ordered).archetype == Archetype::majority_relational);
  }

  TEST_CASE("importance order needs every pair") {
    PrimitiveBase b;
    b.derived_importance.push_back({{"a"}, {"b"}, Importance::h_over_g, {}, {}, {}});
    const std::vector<std::string> dims{"a", "b", "c"};
    CHECK_FALSE(importance_order(b, dims));
    const std::vector<std::string> two{"b", "a"};
    CHECK(importance_order(b, two) == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("majority can be intransitive") {
    const std::vector<Relation> cyc = {linear({0, 1, 2}), linear({2, 0, 1}), linear({1, 2, 0})};
    const Relation m = aggregate_majority(cyc, 0.5);
    CHECK(strictly(m, 0, 1));
    CHECK(strictly(m, 1, 2));
    CHECK(strictly(m, 2, 0));
    CHECK_FALSE(check_properties(m).transitive);
    CHECK(code_of([&] { aggregate_majority(cyc, 0.4); }) == ErrorCode::InvalidFormulation);
    CHECK(code_of([&] {
            const std::vector<Relation> mixed = {linear({0, 1}), linear({0, 1, 2})};
            aggregate_majority(mixed, 0.5);
          }) == ErrorCode::CarrierMismatch);
    const std::vector<ElementPair> veto = {{"a", "b"}};
    const Relation vetoed = aggregate_majority(cyc, 0.5, veto);
    CHECK_FALSE(vetoed.holds("a", "b"));
    const std::vector<ElementPair> stray = {{"a", "q"}};
    CHECK(code_of([&] { aggregate_majority(cyc, 0.5, stray); }) == ErrorCode::UnknownReference);
  }

  TEST_CASE("weighted sum") {
    const std::vector<Valuation> fs = {{letters(2), {1, 0}}, {letters(2), {0, 3}}};
    const std::vector<double> w = {0.75, 0.25};
    const Valuation v = aggregate_weighted(fs, w);
    CHECK(v.values[0] == doctest::Approx(0.75));
    CHECK(v.values[1] == doctest::Approx(0.75));
    CHECK(code_of([&] { aggregate_weighted(fs, w, false); }) == ErrorCode::NotCommensurable);
    const std::vector<double> off = {0.5, 0.6};
    CHECK(code_of([&] { aggregate_weighted(fs, off); }) == ErrorCode::InvalidFormulation);
    const std::vector<double> neg = {1.5, -0.5};
    CHECK(code_of([&] { aggregate_weighted(fs, neg); }) == ErrorCode::InvalidFormulation);
  }

  TEST_CASE("lexicographic") {
    // first dimension ties a and b, second separates them
    const std::vector<Relation> rs = {linear({0, 0, 1}), linear({1, 0, 2})};
    const Relation r = aggregate_lexicographic(rs);
    CHECK(render_order(levels_partition(r)) == "b ≻ a ≻ c");
    const std::vector<std::string> names{"first", "second"};
    Aggregator agg;
    agg.archetype = Archetype::lexicographic;
    agg.importance_order = {"second", "first"};
    CHECK(render_order(levels_partition(apply_aggregator(agg, rs, names))) == "b ≻ a ≻ c");
    agg.importance_order = {"second"};
    CHECK(code_of([&] { apply_aggregator(agg, rs, names); }) == ErrorCode::NotTotalImportance);
    agg.importance_order = {"third", "first"};
    CHECK(code_of([&] { apply_aggregator(agg, rs, names); }) == ErrorCode::UnknownReference);
  }

  TEST_CASE("order by importance") {
    Relation imp(make_ids({"x", "y", "z"}));
    imp.add("z", "x");
    imp.add("x", "y");
    imp.add("z", "y");
    const std::vector<std::string> names{"x", "y", "z"};
    CHECK(order_by_importance(names, imp) == std::vector<std::size_t>{2, 0, 1});
    imp.add("x", "z");
    CHECK(code_of([&] { order_by_importance(names, imp); }) == ErrorCode::NotTotalImportance);
  }

  TEST_CASE("function and relation conversions") {
    const Valuation f{letters(3), {2, 5, 2}};
    const Relation r = relation_from_function(f);
    CHECK(render_order(levels_partition(r)) == "b ≻ a ~ c");
    CHECK(function_from_relation(r).values == std::vector<double>{0, 1, 0});
    CHECK(code_of([] { function_from_relation(dpt::rel(2, {})); }) == ErrorCode::NotRepresentable);
  }

  TEST_CASE("round trip on every weak order up to six elements") {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 6; ++n)
      for (const auto& levels : dpt::weak_orders(n)) {
        const Relation r = linear(levels);
        const Relation back = relation_from_function(function_from_relation(r));
        CHECK(back == r);
        ++checked;
      }
    CHECK(checked == 1 + 3 + 13 + 75 + 541 + 4683);
  }

  TEST_CASE("hierarchy") {
    DimensionTree leaf{"only", {{"only", NodeTag::attribute, {}, linear({1, 0})}}, {}};
    CHECK(aggregate_hierarchy(leaf, {}) == linear({1, 0}));

    // scenario tree: the root folds three scenario leaves lexicographically
    DimensionTree tree;
    tree.root = "outcome";
    tree.nodes = {{"outcome", NodeTag::value, {"s1", "s2", "s3"}, std::nullopt},
                  {"s1", NodeTag::scenario, {}, linear({0, 0, 1})},
                  {"s2", NodeTag::scenario, {}, linear({2, 1, 0})},
                  {"s3", NodeTag::scenario, {}, linear({0, 1, 2})}};
    Aggregator lex;
    lex.archetype = Archetype::lexicographic;
    lex.importance_order = {"s1", "s3", "s2"};
    CHECK(render_order(levels_partition(aggregate_hierarchy(tree, {{"outcome", lex}}))) == "a ≻ b ≻ c");
    CHECK(code_of([&] { aggregate_hierarchy(tree, {}); }) == ErrorCode::UnconfiguredNode);

    DimensionTree cyclic = tree;
    cyclic.nodes[1].children = {"outcome"};
    CHECK(code_of([&] { aggregate_hierarchy(cyclic, {{"outcome", lex}, {"s1", lex}}); }) ==
          ErrorCode::MalformedRelation);
    DimensionTree dangling = tree;
    dangling.nodes[0].children.push_back("s4");
    CHECK(code_of([&] { aggregate_hierarchy(dangling, {{"outcome", lex}}); }) == ErrorCode::MalformedRelation);
  }

  TEST_CASE("joint group folds in one step") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 50; ++t) {
      const Relation x = linear(random_levels(4, rng)), y = linear(random_levels(4, rng)),
                     z = linear(random_levels(4, rng));
      DimensionTree tree;
      tree.root = "root";
      tree.nodes = {{"root", NodeTag::value, {"pair", "z"}, std::nullopt},
                    {"pair", NodeTag::attribute, {"x", "y"}, std::nullopt},
                    {"x", NodeTag::attribute, {}, x},
                    {"y", NodeTag::attribute, {}, y},
                    {"z", NodeTag::attribute, {}, z}};
      tree.joint_groups = {{"root", "pair"}};
      Aggregator maj;
      maj.threshold = 2.0 / 3.0;
      const std::vector<Relation> flat = {x, y, z};
      CHECK(aggregate_hierarchy(tree, {{"root", maj}}) == aggregate_majority(flat, 2.0 / 3.0));
    }
  }

  TEST_CASE("property: unanimity") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 250; ++t) {
      const std::size_t n = 2 + t % 5, m = 1 + t % 4;
      std::vector<Relation> rs;
      std::vector<Valuation> fs;
      for (std::size_t k = 0; k < m; ++k) {
        rs.push_back(linear(random_levels(n, rng)));
        fs.push_back(function_from_relation(rs.back()));
      }
      const Relation maj = aggregate_majority(rs, 1.0);
      const Relation lex = aggregate_lexicographic(rs);
      const std::vector<double> w(m, 1.0 / static_cast<double>(m));
      const Relation ws = relation_from_function(aggregate_weighted(fs, w));
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          const bool all = std::all_of(rs.begin(), rs.end(), [&](const Relation& r) { return strictly(r, x, y); });
          if (!all) continue;
          CHECK(strictly(maj, x, y));
          CHECK(strictly(lex, x, y));
          CHECK(strictly(ws, x, y));
        }
    }
  }

  TEST_CASE("property: majority is anonymous") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 250; ++t) {
      const std::size_t n = 2 + t % 5;
      std::vector<Relation> rs;
      for (std::size_t k = 0; k < 2 + t % 4; ++k) rs.push_back(dpt::random_relation(n, 0.5, rng));
      const double thr = 0.5 + 0.5 * static_cast<double>(t % 3) / 2.0;
      const Relation base = aggregate_majority(rs, thr);
      std::shuffle(rs.begin(), rs.end(), rng);
      CHECK(aggregate_majority(rs, thr) == base);
    }
  }

  TEST_CASE("property: vetoes only remove pairs") {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 250; ++t) {
      const std::size_t n = 2 + t % 5;
      std::vector<Relation> rs;
      for (std::size_t k = 0; k < 3; ++k) rs.push_back(dpt::random_relation(n, 0.6, rng));
      std::vector<ElementPair> vetoes;
      const Relation free = aggregate_majority(rs, 0.5);
      for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t x = rng() % n, y = rng() % n;
        vetoes.push_back({free.id(x), free.id(y)});
        const Relation now = aggregate_majority(rs, 0.5, vetoes);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            if (now.holds(i, j)) CHECK(free.holds(i, j));
            const bool named = std::find(vetoes.begin(), vetoes.end(), ElementPair{free.id(i), free.id(j)}) != vetoes.end();
            if (named) CHECK_FALSE(now.holds(i, j));
            if (!named) CHECK(now.holds(i, j) == free.holds(i, j));
          }
      }
    }
  }

  TEST_CASE("property: weighted sum respects dominance") {
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 250; ++t) {
      const std::size_t n = 2 + t % 6, m = 1 + t % 4;
      std::vector<Valuation> fs;
      for (std::size_t k = 0; k < m; ++k) fs.push_back(random_valuation(n, rng));
      std::vector<double> w(m);
      double total = 0;
      for (auto& x : w) total += x = u(rng) + 0.01;
      for (auto& x : w) x /= total;
      const Relation r = relation_from_function(aggregate_weighted(fs, w));
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          bool dominates = true;
          for (const auto& f : fs) dominates = dominates && f.values[x] >= f.values[y];
          if (dominates) CHECK(r.holds(x, y));
        }
    }
  }

  TEST_CASE("property: weighted sum is invariant under a common affine rescaling") {
    std::mt19937_64 rng(46);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int t = 0; t < 250; ++t) {
      const std::size_t n = 2 + t % 6, m = 1 + t % 4;
      std::vector<Valuation> fs;
      for (std::size_t k = 0; k < m; ++k) fs.push_back(random_valuation(n, rng));
      const std::vector<double> w(m, 1.0 / static_cast<double>(m));
      const double a = u(rng), b = u(rng) - 2.5;
      std::vector<Valuation> scaled = fs;
      for (auto& f : scaled)
        for (auto& v : f.values) v = a * v + b;
      const Valuation s1 = aggregate_weighted(fs, w), s2 = aggregate_weighted(scaled, w);
      // compare with a tolerance on the differences rather than on the scores
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          const double d1 = s1.values[x] - s1.values[y], d2 = s2.values[x] - s2.values[y];
          CHECK(d2 == doctest::Approx(a * d1).epsilon(1e-9).scale(1));
          if (std::fabs(d1) > 1e-9) CHECK((d1 > 0) == (d2 > 0));
        }
    }
  }

  TEST_CASE("property: higher majority thresholds keep fewer pairs") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 2 + t % 5;
      std::vector<Relation> rs;
      for (std::size_t k = 0; k < 5; ++k) rs.push_back(dpt::random_relation(n, 0.5, rng));
      const Relation lo = aggregate_majority(rs, 0.5), hi = aggregate_majority(rs, 0.8);
      for (const auto& p : hi.pairs()) CHECK(lo.holds(p.first, p.second));
    }
  }

  TEST_CASE("single relation passes through unless vetoed") {
    const std::vector<Relation> one = {linear({0, 1})};
    const std::vector<std::string> names{"only"};
    Aggregator maj;
    CHECK(apply_aggregator(maj, one, names) == one[0]);
    Aggregator veto;
    veto.archetype = Archetype::veto_majority;
    veto.vetoes = {{"a", "b"}};
    CHECK_FALSE(apply_aggregator(veto, one, names).holds("a", "b"));
  }
}
