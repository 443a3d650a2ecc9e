#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "thompson/annular.hpp"

using namespace thompson;

namespace {

const Arity two(2);
const Arity three(3);

}  // namespace

TEST(Forest, SingleCaret) {
  const StrandDiagram f = forest_generator(1, 1, two);
  EXPECT_EQ(f.sources(), 1);
  EXPECT_EQ(f.sinks(), 2);
  EXPECT_EQ(f.split_count(), 1);
  EXPECT_EQ(f.merge_count(), 0);
}

TEST(Forest, MiddleSplit) {
  const StrandDiagram f = forest_generator(2, 3, two);
  EXPECT_EQ(f.sources(), 3);
  EXPECT_EQ(f.sinks(), 4);
  EXPECT_TRUE(f.is_straight(0, 0));
  EXPECT_TRUE(f.is_straight(2, 3));
  EXPECT_EQ(f.vertex_count(), 1);
}

TEST(Forest, IndexOutOfRange) {
  EXPECT_THROW(forest_generator(0, 2, two), ArgumentError);
  EXPECT_THROW(forest_generator(3, 2, two), ArgumentError);
}

TEST(Forest, RelationAtSmallestCase) {
  EXPECT_EQ(compose(forest_generator(1, 2, two), forest_generator(3, 3, two)),
            compose(forest_generator(2, 2, two), forest_generator(1, 3, two)));
}

TEST(Forest, RelationForAllSmallIndices) {
  for (const Arity a : {two, three}) {
    const int n = a.value();
    for (int m = 1; m <= 6; ++m)
      for (int j = 1; j <= m + n - 1; ++j)
        for (int i = 1; i < j - n + 1; ++i) {
          const auto lhs = reduce(compose(forest_generator(i, m, a), forest_generator(j, m + n - 1, a)));
          const auto rhs = reduce(compose(forest_generator(j - n + 1, m, a), forest_generator(i, m + n - 1, a)));
          EXPECT_EQ(lhs, rhs) << "n=" << n << " m=" << m << " i=" << i << " j=" << j;
        }
  }
}

TEST(Compose, IdentityIsNeutral) {
  const StrandDiagram d = fixtures::element(fixtures::X).diagram();
  EXPECT_EQ(compose(StrandDiagram::identity(two, 1), d), d);
  EXPECT_EQ(compose(d, StrandDiagram::identity(two, 1)), d);
}

TEST(Compose, BoundaryMismatch) {
  EXPECT_THROW(compose(forest_generator(1, 1, two), forest_generator(1, 1, two)), CompositionError);
  EXPECT_THROW(compose(forest_generator(1, 1, two), forest_generator(1, 2, three)), CompositionError);
}

TEST(Reduce, MoveA) {
  const StrandDiagram d = compose(forest_generator(1, 1, two), invert(forest_generator(1, 1, two)));
  EXPECT_EQ(d.vertex_count(), 2);
  EXPECT_FALSE(is_reduced(d));
  EXPECT_EQ(reduce(d), StrandDiagram::identity(two, 1));
}

TEST(Reduce, MoveB) {
  const StrandDiagram d = compose(invert(forest_generator(1, 1, two)), forest_generator(1, 1, two));
  EXPECT_EQ(reduce(d), StrandDiagram::identity(two, 2));
}

TEST(Reduce, IdempotentAndBoundaryPreserving) {
  std::mt19937 rng(7);
  for (int k = 0; k < 50; ++k) {
    const StrandDiagram d = fixtures::random_unreduced(rng, k % 2 ? three : two);
    const StrandDiagram r = reduce(d);
    EXPECT_EQ(reduce(r), r);
    EXPECT_EQ(r.sources(), d.sources());
    EXPECT_EQ(r.sinks(), d.sinks());
    EXPECT_TRUE(is_reduced(r));
  }
}

TEST(Reduce, ConfluentUnderRandomOrder) {
  std::mt19937 rng(11);
  for (int k = 0; k < 100; ++k) {
    const StrandDiagram d = fixtures::random_unreduced(rng, k % 2 ? three : two);
    const StrandDiagram r = reduce(d);
    for (int order = 0; order < 4; ++order) EXPECT_EQ(reduce_random(d, rng).encode(), r.encode());
  }
}

TEST(Reduce, SquareOfNCancelsInnerConjugator) {
  const GroupElement N = fixtures::element(fixtures::N);
  const auto ed = essential_decomposition(N);
  const StrandDiagram three_blocks = compose(compose(ed.S, ed.E), invert(ed.S));
  const StrandDiagram squared = reduce(compose(three_blocks, three_blocks));
  EXPECT_EQ(squared, reduce(compose(compose(ed.S, power_concat(ed.E, 2)), invert(ed.S))));
  EXPECT_EQ(squared, group_power(N, 2).diagram());
}

TEST(Invert, Involution) {
  const StrandDiagram d = fixtures::element(fixtures::N).diagram();
  EXPECT_EQ(invert(invert(d)), d);
  const StrandDiagram m = invert(forest_generator(1, 1, two));
  EXPECT_EQ(m.sources(), 2);
  EXPECT_EQ(m.merge_count(), 1);
  EXPECT_EQ(m.split_count(), 0);
}

TEST(Invert, XTimesInverseReducesToIdentity) {
  const StrandDiagram d = fixtures::element(fixtures::X).diagram();
  EXPECT_EQ(reduce(compose(d, invert(d))), StrandDiagram::identity(two, 1));
}

TEST(Json, RoundTripIsBitExact) {
  for (const auto& s : {fixtures::A, fixtures::N, fixtures::X}) {
    const StrandDiagram d = fixtures::element(s).diagram();
    EXPECT_EQ(StrandDiagram::from_json(nlohmann::json::parse(d.encode())).encode(), d.encode());
  }
}

TEST(Json, RejectsNonPlanarPortOrder) {
  nlohmann::json j = fixtures::element(fixtures::A).diagram().to_json();
  int merge = -1;
  for (const auto& v : j["vertices"])
    if (v["kind"] == "merge") merge = v["id"].get<int>();
  // cross the two inputs of a merge
  for (auto& e : j["edges"])
    if (e[2] == merge) e[3] = 1 - e[3].get<int>();
  EXPECT_THROW(StrandDiagram::from_json(j), ArgumentError);
}

TEST(Trees, IdentityFromEqualTrees) {
  EXPECT_TRUE(element_from_trees({1}, {1}, two).is_identity());
  EXPECT_TRUE(fixtures::element("f1 f2 ; f1 f2").is_identity());
}

TEST(Trees, LeafMismatch) { EXPECT_THROW(element_from_trees({1, 1}, {1}, two), ArgumentError); }

TEST(Trees, GeneratorAIsX0) {
  const GroupElement A = fixtures::element(fixtures::A);
  EXPECT_EQ(A.diagram().vertex_count(), 4);
  EXPECT_EQ(A, standard_generator(0, two));
}

TEST(Trees, PowersOfAAreCombs) {
  const GroupElement A = fixtures::element(fixtures::A);
  EXPECT_EQ(group_compose(A, A), fixtures::element("f1 f1 f1 ; f1 f2 f3"));
  for (int n = 1; n <= 6; ++n) {
    const TreePair tp = group_power(A, n).to_tree_pair();
    EXPECT_EQ(tp.top.size(), static_cast<size_t>(n + 1));
    EXPECT_EQ(tp.bottom, right_comb(n + 1, two));
  }
}

TEST(Trees, TreePairRoundTrip) {
  std::mt19937 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Arity a = k % 2 ? three : two;
    const GroupElement g(fixtures::random_unreduced(rng, a));
    const TreePair tp = g.to_tree_pair();
    EXPECT_EQ(element_from_trees(tp.top, tp.bottom, a), g);
    EXPECT_EQ(parse_element(tree_pair_string(g), a), g);
  }
}

TEST(Group, Axioms) {
  for (const Arity a : {two, three}) {
    std::mt19937 rng(19);
    const GroupElement e = GroupElement::identity(a);
    for (int k = 0; k < 200; ++k) {
      const auto x = parse_element(fixtures::random_word(rng, 4), a);
      const auto y = parse_element(fixtures::random_word(rng, 4), a);
      const auto z = parse_element(fixtures::random_word(rng, 4), a);
      EXPECT_EQ(group_compose(group_compose(x, y), z), group_compose(x, group_compose(y, z)));
      EXPECT_EQ(group_compose(x, group_inverse(x)), e);
      EXPECT_EQ(group_compose(e, x), x);
    }
  }
}

TEST(Group, PowersAgreeWithRepeatedProducts) {
  const GroupElement X = fixtures::element(fixtures::X);
  GroupElement acc = GroupElement::identity(two);
  for (int p = 0; p <= 7; ++p) {
    EXPECT_EQ(group_power(X, p), acc);
    EXPECT_EQ(group_power(X, -p), group_inverse(acc));
    acc = group_compose(acc, X);
  }
}

TEST(Generators, PresentationRelations) {
  for (const Arity a : {two, three}) {
    const int n = a.value();
    for (int j = 1; j <= 7; ++j)
      for (int i = 0; i < j; ++i) {
        const auto lhs = group_compose(standard_generator(j, a), standard_generator(i, a));
        const auto rhs = group_compose(standard_generator(i, a), standard_generator(j + n - 1, a));
        EXPECT_EQ(lhs, rhs) << "n=" << n << " i=" << i << " j=" << j;
      }
  }
}

TEST(Generators, X2IsConjugateOfX1) {
  const auto x0 = standard_generator(0, two), x1 = standard_generator(1, two);
  EXPECT_EQ(standard_generator(2, two), group_compose(group_compose(group_inverse(x0), x1), x0));
}

TEST(Parse, Grammar) {
  EXPECT_EQ(fixtures::element("x0^2 x1^-1"),
            group_compose(group_power(standard_generator(0, two), 2), group_inverse(standard_generator(1, two))));
  EXPECT_TRUE(fixtures::element("e").is_identity());
  EXPECT_TRUE(fixtures::element("1").is_identity());
  EXPECT_EQ(fixtures::element("tree: f1 f1 ; tree: f1 f2"), fixtures::element(fixtures::A));
  EXPECT_THROW(fixtures::element("x0 y1"), ArgumentError);
  EXPECT_THROW(fixtures::element("f0 ; f1"), ArgumentError);
  EXPECT_THROW(fixtures::element("f2 ; f1"), ArgumentError);
  EXPECT_THROW(Arity{1}, ArgumentError);
}
