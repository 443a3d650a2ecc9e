#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "thompson/power_form.hpp"

using namespace thompson;

namespace {

const Arity two(2);
const Arity three(3);

int count_kind(const std::vector<DirectedCycle>& cycles, CycleKind k) {
  int c = 0;
  for (const auto& cy : cycles) c += cy.kind == k;
  return c;
}

std::vector<DirectedCycle> reduced_cycles(const StrandDiagram& d) {
  return classify_cycles(reduce_annular(close(d)).reduced);
}

/// Random elements from generator words, both arities, fixed seed.
std::vector<GroupElement> random_elements(unsigned seed, int count, int max_len) {
  std::mt19937 rng(seed);
  std::vector<GroupElement> out;
  for (int k = 0; k < count; ++k) out.push_back(parse_element(fixtures::random_word(rng, max_len), k % 2 ? three : two));
  return out;
}

void expect_affine(const std::vector<int>& v) {
  for (size_t i = 2; i < v.size(); ++i) EXPECT_EQ(v[i] - v[i - 1], v[1] - v[0]);
}

}  // namespace

TEST(Close, NonSquareRejected) { EXPECT_THROW(close(forest_generator(1, 1, two)), ArgumentError); }

TEST(Close, IdentityGivesFreeLoops) {
  for (const Arity a : {two, three})
    for (int k = 1; k <= 4; ++k) {
      const AnnularDiagram c = close(StrandDiagram::identity(a, k));
      EXPECT_EQ(c.strands(), k);
      const auto cycles = reduced_cycles(StrandDiagram::identity(a, k));
      // move C merges n loops into one
      EXPECT_EQ(static_cast<int>(cycles.size()), (k - 1) % (a.value() - 1) + 1);
      EXPECT_EQ(count_kind(cycles, CycleKind::free), static_cast<int>(cycles.size()));
    }
}

TEST(Close, CutMatchingRecorded) {
  const nlohmann::json j = close(fixtures::element(fixtures::A).diagram()).to_json();
  EXPECT_EQ(j["cutMatching"].size(), 1u);
  EXPECT_EQ(j["windings"].size(), j["edges"].size());
}

TEST(ReduceAnnular, CancellingPairMatchesIdentity) {
  const StrandDiagram A = fixtures::element(fixtures::A).diagram();
  const auto r = reduce_annular(close(compose(A, invert(A))));
  EXPECT_EQ(r.reduced, reduce_annular(close(StrandDiagram::identity(two, 1))).reduced);
  EXPECT_FALSE(r.trace.empty());
}

TEST(ReduceAnnular, AGivesOneMergeAndOneSplitLoop) {
  const auto cycles = reduced_cycles(fixtures::element(fixtures::A).diagram());
  EXPECT_EQ(cycles.size(), 2u);
  EXPECT_EQ(count_kind(cycles, CycleKind::merge), 1);
  EXPECT_EQ(count_kind(cycles, CycleKind::split), 1);
}

TEST(ReduceAnnular, XGivesOneMergeAndOneSplitLoop) {
  const auto cycles = reduced_cycles(fixtures::element(fixtures::X).diagram());
  EXPECT_EQ(count_kind(cycles, CycleKind::merge), 1);
  EXPECT_EQ(count_kind(cycles, CycleKind::split), 1);
  for (const auto& c : cycles) EXPECT_GT(c.winding, 0);
}

TEST(ReduceAnnular, ConjugatorLiftsToOriginal) {
  for (const auto& g : random_elements(5, 50, 6)) {
    const auto r = reduce_annular(close(g.diagram()));
    const StrandDiagram& Y = r.conjugator;
    EXPECT_EQ(reduce(compose(compose(Y, r.reduced.body()), invert(Y))), g.diagram());
  }
}

TEST(ClassifyCycles, RandomReducedClosures) {
  for (const auto& g : random_elements(6, 50, 6)) {
    std::vector<DirectedCycle> cycles;
    ASSERT_NO_THROW(cycles = reduced_cycles(g.diagram()));
    EXPECT_FALSE(cycles.empty());
    std::vector<int> seen;
    for (const auto& c : cycles) {
      EXPECT_GT(c.winding, 0);
      if (c.kind == CycleKind::free) {
        EXPECT_TRUE(c.vertices.empty());
      }
      for (int v : c.vertices) {
        EXPECT_EQ(std::count(seen.begin(), seen.end(), v), 0);
        seen.push_back(v);
      }
    }
  }
}

TEST(Essential, Identity) {
  const auto ed = essential_decomposition(GroupElement::identity(two));
  EXPECT_EQ(ed.m, 1);
  EXPECT_EQ(ed.E, StrandDiagram::identity(two, 1));
  EXPECT_EQ(ed.S.vertex_count(), 0);
}

TEST(Essential, AHasTwoVertexCore) {
  const GroupElement A = fixtures::element(fixtures::A);
  const auto ed = essential_decomposition(A);
  EXPECT_EQ(ed.E.vertex_count(), 2);
  EXPECT_EQ(ed.E.split_count(), 1);
  std::vector<int> counts;
  for (int k = 1; k <= 8; ++k) counts.push_back(group_power(A, k).diagram().vertex_count());
  expect_affine(counts);
  EXPECT_EQ(counts[1] - counts[0], 2);
}

TEST(Essential, ConjugatorOfNIsNotATree) {
  const auto ed = essential_decomposition(fixtures::element(fixtures::N));
  EXPECT_EQ(ed.E.vertex_count(), 2);
  EXPECT_GT(ed.S.merge_count(), 0);
  EXPECT_EQ(ed.S.sources(), 1);
  EXPECT_EQ(ed.S.sinks(), ed.m);
}

TEST(Essential, InvariantsOnRandomElements) {
  for (const auto& g : random_elements(8, 50, 6)) {
    const auto ed = essential_decomposition(g);
    EXPECT_EQ(reduce(compose(compose(ed.S, ed.E), invert(ed.S))), g.diagram());
    EXPECT_TRUE(is_reduced(compose(ed.E, ed.E)));
    EXPECT_EQ(reduce_annular(close(ed.E)).reduced.body().vertex_count(), ed.E.vertex_count());
  }
}

TEST(PowerFormTest, FixturesStabiliseEarly) {
  const GroupElement e = GroupElement::identity(two);
  for (const auto& s : {fixtures::A, fixtures::N, fixtures::X}) {
    const PowerForm pf = power_form(e, fixtures::element(s), e);
    EXPECT_LE(pf.k0, 2) << s;
    EXPECT_EQ(pf.E_tilde.vertex_count(), 2) << s;
  }
}

TEST(PowerFormTest, XIsThreeBlocks) {
  const GroupElement e = GroupElement::identity(two);
  const GroupElement X = fixtures::element(fixtures::X);
  const PowerForm pf = power_form(e, X, e);
  for (long p = pf.k0; p <= 6; ++p) {
    const StrandDiagram blocks = pf.expand(p);
    EXPECT_TRUE(is_reduced(blocks));
    EXPECT_EQ(blocks.vertex_count(),
              pf.S_plus.vertex_count() + (p - pf.k0 + 1) * pf.E_tilde.vertex_count() + pf.S_minus.vertex_count());
    EXPECT_EQ(blocks, group_power(X, p).diagram());
  }
}

TEST(PowerFormTest, RandomPowersMatchDirectReduction) {
  for (const auto& g : random_elements(9, 30, 6)) {
    const GroupElement id = GroupElement::identity(g.arity());
    const PowerForm pf = power_form(id, g, id);
    std::vector<int> counts;
    for (long p = pf.k0; p <= pf.k0 + 4; ++p) {
      const StrandDiagram direct = group_power(g, p).diagram();
      EXPECT_EQ(direct.encode(), pf.expand(p).encode());
      counts.push_back(direct.vertex_count());
    }
    expect_affine(counts);
    EXPECT_EQ(counts[1] - counts[0], pf.E_tilde.vertex_count());
  }
}

TEST(PowerFormTest, SandwichedPowersAreAffine) {
  std::mt19937 rng(10);
  for (const auto& g : random_elements(10, 20, 5)) {
    const Arity a = g.arity();
    const GroupElement h = parse_element(fixtures::random_word(rng, 4), a);
    const GroupElement ht = parse_element(fixtures::random_word(rng, 4), a);
    const PowerForm pf = power_form(h, g, ht);
    std::vector<int> counts;
    for (long p = pf.k0; p <= pf.k0 + 4; ++p) {
      const StrandDiagram direct = group_compose(group_compose(h, group_power(g, p)), ht).diagram();
      EXPECT_EQ(direct, pf.expand(p));
      counts.push_back(direct.vertex_count());
    }
    expect_affine(counts);
  }
}

TEST(PowerFormTest, BelowThresholdRejected) {
  const GroupElement e = GroupElement::identity(two);
  const PowerForm pf = power_form(e, fixtures::element(fixtures::A), e);
  EXPECT_THROW(pf.expand(pf.k0 - 1), ArgumentError);
}
