#include <doctest.h>

#include <set>

#include "dp/relation.hpp"
#include "support.hpp"

using namespace dp;
using dpt::letters;
using dpt::rel;

TEST_SUITE("relation") {
  TEST_CASE("decompose splits strict and indifferent parts") {
    const auto ps = decompose(rel(2, {{0, 0}, {1, 1}, {0, 1}}));
    CHECK(ps.strict.pairs() == std::vector<ElementPair>{{"a", "b"}});
    CHECK(ps.indifference.pairs() == std::vector<ElementPair>{{"a", "a"}, {"b", "b"}});
    CHECK(ps.incomparable.empty());

    const auto sym = decompose(rel(2, {{0, 1}, {1, 0}}));
    CHECK(sym.strict.pair_count() == 0);
    CHECK(sym.indifference.pairs() == std::vector<ElementPair>{{"a", "b"}, {"b", "a"}});

    const auto empty = decompose(rel(2, {}));
    CHECK(empty.strict.pair_count() == 0);
    CHECK(empty.indifference.pair_count() == 0);
    CHECK(empty.incomparable == std::vector<ElementPair>{{"a", "b"}});
  }

  TEST_CASE("weak part is the reflexive closure") {
    const auto ps = decompose(rel(3, {{0, 1}}));
    CHECK(ps.weak.pair_count() == 4);
    CHECK(ps.weak.holds("c", "c"));
  }

  TEST_CASE("transitive closure") {
    CHECK(transitive_closure(rel(3, {{0, 1}, {1, 2}})).pairs() ==
          std::vector<ElementPair>{{"a", "b"}, {"a", "c"}, {"b", "c"}});
    const Relation t = rel(3, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(transitive_closure(t) == t);
    const Relation cyc = transitive_closure(rel(3, {{0, 1}, {1, 2}, {2, 0}}));
    CHECK(cyc.pair_count() == 9);
  }

  TEST_CASE("property checks") {
    // subset order on the subsets of {1,2}: {}, {1}, {2}, {1,2}
    Relation sub({"e", "1", "2", "12"});
    const std::vector<std::set<int>> sets = {{}, {1}, {2}, {1, 2}};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(), sets[i].end())) sub.set(i, j);
    const auto p = check_properties(sub);
    CHECK(p.partial_order);
    CHECK_FALSE(p.complete);

    CHECK_FALSE(check_properties(rel(3, {{0, 1}, {1, 2}, {2, 0}})).transitive);

    const auto full = check_properties(Relation::complete(letters(3)));
    CHECK(full.total_preorder);
    CHECK_FALSE(full.antisymmetric);
  }

  TEST_CASE("nearest total preorder examples") {
    const Relation tp = dpt::order_of(letters(3), {0, 0, 1});
    const auto same = nearest_total_preorder(tp, PreorderMode::exact);
    CHECK(same.distance == 0);
    CHECK(same.preorder == tp);

    // a > b > c > a: each of the three linear orders breaking the cycle is
    // two cells away from the reflexive closure; a > b > c comes first.
    const auto cyc = nearest_total_preorder(rel(3, {{0, 1}, {1, 2}, {2, 0}}), PreorderMode::exact);
    CHECK(cyc.distance == 2);
    CHECK(preorder_levels(cyc.preorder) == std::vector<std::size_t>{0, 1, 2});

    // linear order a > b > c without (a, c)
    const auto gap = nearest_total_preorder(rel(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}}), PreorderMode::exact);
    CHECK(preorder_levels(gap.preorder) == std::vector<std::size_t>{0, 1, 2});
    CHECK(gap.distance == 1);
  }

  TEST_CASE("nearest total preorder caps") {
    std::mt19937_64 rng(5);
    Relation big = dpt::random_relation(9, 0.5, rng);
    big.set(0, 1);
    big.remove("b", "a");
    big.set(1, 2);
    big.set(2, 0);
    big.remove("c", "b");
    big.remove("a", "c");
    CHECK_THROWS_AS(nearest_total_preorder(big, PreorderMode::exact), Error);
    const auto h = nearest_total_preorder(big, PreorderMode::heuristic);
    CHECK(check_properties(h.preorder).total_preorder);
    CHECK(h.distance == dpt::cells_differing(h.preorder, dpt::with_diagonal(big)));
  }

  TEST_CASE("maximal elements") {
    CHECK(maximal_elements(dpt::order_of(letters(3), {0, 1, 2})) == make_ids({"a"}));
    CHECK(maximal_elements(rel(3, {})) == make_ids({"a", "b", "c"}));
    CHECK(maximal_elements(rel(3, {{0, 2}, {1, 2}})) == make_ids({"a", "b"}));
    try {
      maximal_elements(rel(3, {{0, 1}, {1, 2}, {2, 0}}));
      FAIL("expected CyclicStrictPart");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CyclicStrictPart);
    }
  }

  TEST_CASE("levels partition examples") {
    const Partition lin = levels_partition(dpt::order_of(letters(3), {0, 1, 2}));
    CHECK(lin.classes() == std::vector<std::vector<ElementId>>{{"a"}, {"b"}, {"c"}});
    CHECK(levels_partition(rel(3, {})).classes() == std::vector<std::vector<ElementId>>{{"a", "b", "c"}});
    const Partition ab = levels_partition(rel(3, {{0, 2}, {1, 2}, {0, 1}, {1, 0}}));
    CHECK(ab.classes() == std::vector<std::vector<ElementId>>{{"a", "b"}, {"c"}});
    CHECK(render_order(ab) == "a ~ b ≻ c");
  }

  TEST_CASE("partition invariants") {
    CHECK_THROWS_AS(Partition({{"a"}, {}}, true), Error);
    CHECK_THROWS_AS(Partition({{"a"}, {"a", "b"}}, true), Error);
    const Partition p({{"a"}, {"b", "c"}}, true);
    CHECK_NOTHROW(p.check_covers(letters(3)));
    CHECK_THROWS_AS(p.check_covers(letters(4)), Error);
    CHECK(p.class_of("c") == 1u);
    CHECK(p.class_order().holds("0", "1"));
    CHECK_FALSE(p.class_order().holds("1", "0"));
  }

  TEST_CASE("absolute relations never relate two norms") {
    Relation a({"x", "y"}, RelationKind::absolute, {"n1"});
    a.add("x", "n1");
    CHECK(a.holds("x", "n1"));
    CHECK_THROWS_AS(a.add("n1", "n1"), Error);
  }

  TEST_CASE("property: decomposition tiles the relation") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
      const Relation r = dpt::random_relation(2 + t % 5, 0.45, rng);
      const auto ps = decompose(r);
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j) {
          const bool s = ps.strict.holds(i, j), ind = ps.indifference.holds(i, j);
          CHECK_FALSE((s && ind));
          CHECK((s || ind) == r.holds(i, j));
        }
    }
  }

  TEST_CASE("property: closure is idempotent, extensive and minimal") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
      const Relation r = dpt::random_relation(2 + t % 4, 0.3, rng);
      const Relation c = transitive_closure(r);
      CHECK(c == dpt::naive_closure(r));
      CHECK(transitive_closure(c) == c);
      for (const auto& p : r.pairs()) CHECK(c.holds(p.first, p.second));
      // Every added pair is needed: dropping it breaks transitivity or loses R.
      for (const auto& p : c.pairs()) {
        if (r.holds(p.first, p.second)) continue;
        Relation less = c;
        less.remove(p.first, p.second);
        CHECK_FALSE(dpt::is_transitive(less));
      }
    }
  }

  TEST_CASE("property: exact preorder is Kemeny optimal") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 120; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
      const Relation r = dpt::random_relation(n, 0.5, rng);
      const auto got = nearest_total_preorder(r, PreorderMode::exact);
      const auto want = dpt::kemeny_oracle(r);
      CHECK(got.distance == want.distance);
      CHECK(got.distance == dpt::cells_differing(got.preorder, dpt::with_diagonal(r)));
      CHECK(check_properties(got.preorder).total_preorder);
      CHECK(preorder_levels(got.preorder) == want.levels);
    }
  }

  TEST_CASE("property: levels partition peels maximal elements") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
      const Relation r = transitive_closure(dpt::random_relation(n, 0.3, rng));
      if (!strict_part_acyclic(r)) continue;
      const Partition p = levels_partition(r);
      p.check_covers(r.carrier());
      for (std::size_t k = 0; k < p.size(); ++k) {
        std::vector<std::size_t> keep;
        for (std::size_t c = k; c < p.size(); ++c)
          for (const auto& e : p.classes()[c]) keep.push_back(r.index_of(e));
        std::sort(keep.begin(), keep.end());
        auto top = maximal_elements(r.restricted(keep));
        auto cls = p.classes()[k];
        std::sort(top.begin(), top.end());
        std::sort(cls.begin(), cls.end());
        CHECK(top == cls);
      }
    }
  }

  TEST_CASE("symmetric difference requires matching carriers") {
    CHECK(symmetric_difference(rel(2, {{0, 1}}), rel(2, {{1, 0}})) == 2);
    CHECK_THROWS_AS(symmetric_difference(rel(2, {}), rel(3, {})), Error);
  }
}
