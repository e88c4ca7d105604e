#include <gtest/gtest.h>

#include "locality_lab/catalog.hpp"
#include "oracle.hpp"

using namespace llab;

namespace {

std::string catalog_file(const std::string& name) { return std::string(LOCALITY_LAB_CATALOG) + "/" + name; }

std::size_t delta_size(const RegularBuild& R) {
  std::size_t n = 0;
  for (char c : R.delta.delta) n += c != 0;
  return n;
}

Bits view_set(const SubLocality& L, const oracle::ElemSet& X) {
  Bits b(L.size());
  for (Elem x : X) b.set(L.from_ambient(x));
  return b;
}

// Regular locality of S4 with S = <(1 2 3 4), (1 3)>.
struct S4Regular {
  FiniteGroup G = oracle::s4();
  Bits S = oracle::to_bits(G, oracle::s4_sylow(G));
  std::unique_ptr<RegularBuild> R = build_regular(G, 2, {}, &S);

  Bits cyclic(const std::vector<std::vector<int>>& c) const {
    return view_set(*R->L, oracle::closure(G, {oracle::elem(G, c)}));
  }
};

}  // namespace

TEST(Regular, S4IsConstrainedModel) {
  S4Regular s;
  const RegularBuild& R = *s.R;
  EXPECT_TRUE(R.constrained());
  EXPECT_EQ(R.classes.subcentric.size(), 10u);
  EXPECT_EQ(R.classes.radical_centric.size(), 2u);
  EXPECT_EQ(delta_size(R), 10u);
  EXPECT_EQ(R.L->size(), 24u);
  EXPECT_EQ(R.st->subnormals.size(), 7u);
  EXPECT_TRUE(R.st->components.empty());
  EXPECT_EQ(R.st->E.count(), 1u);
  EXPECT_EQ(R.LS->order(R.st->tildeT), 1u);
  EXPECT_EQ(R.Gstar.count(), 24u);
  EXPECT_EQ(oracle::to_set(R.L->to_ambient(R.st->Fstar)), oracle::O_p(s.G, oracle::all_elements(s.G), 2));
  EXPECT_FALSE(R.EF.has_value());
  const RegularReport rr = is_regular_locality(*R.L, *R.st);
  EXPECT_TRUE(rr.ok) << rr.witness;
}

TEST(Regular, SmallerObjectSetIsLinkingButNotRegular) {
  S4Regular s;
  const RegularBuild& R = *s.R;
  const PLattice& LS = *R.LS;
  std::vector<char> d(LS.num_subgroups(), 0);
  for (SubId P : R.classes.radical_centric)
    for (SubId Q : LS.overgroups_in(P, LS.top())) d[Q] = 1;
  PartialHost host(s.G, LS, d);
  SubLocality L(host);
  // V4 is normal in S4, so every S_g contains V4 and L is still all of S4.
  EXPECT_EQ(L.size(), 24u);
  EXPECT_TRUE(is_linking_locality(L).ok);
  const LocalityStructure st = analyze_structure(L);
  const RegularReport rr = is_regular_locality(L, st);
  EXPECT_FALSE(rr.ok);
  EXPECT_FALSE(rr.delta_matches);
}

TEST(Regular, NormalizerAndCentralizerOfC2Pair) {
  S4Regular s;
  const RegularBuild& R = *s.R;
  const auto c = make_context(R, s.cyclic({{1, 2}, {3, 4}}));
  EXPECT_EQ(R.LS->order(c->NSH), 4u);
  EXPECT_EQ(R.LS->order(c->CSH), 4u);
  EXPECT_EQ(c->bN.count(), 8u);
  const FusionSystem N = normalizer_subsystem(R, *c);
  EXPECT_EQ(N.base(), c->NSH);
  EXPECT_EQ(N.aut_order(N.base()), 2u);

  const auto cc = make_context(R, s.cyclic({{1, 3}, {2, 4}}));
  EXPECT_EQ(R.LS->order(cc->NSH), 8u);
  EXPECT_EQ(R.LS->order(cc->CSH), 8u);
  EXPECT_EQ(normalizer_subsystem(R, *cc), inner_system(*R.LS, R.LS->top()));
  EXPECT_EQ(centralizer_subsystem(R, *cc), inner_system(*R.LS, R.LS->top()));

  Bits one(R.L->size());
  one.set(R.L->one());
  const auto c1 = make_context(R, one);
  EXPECT_EQ(c1->bN, R.L->all());
  EXPECT_EQ(c1->CSH, R.LS->top());
  EXPECT_EQ(centralizer_subsystem(R, *c1), *R.F);
}

TEST(Regular, ConjugateFamilyOfC2) {
  S4Regular s;
  const RegularBuild& R = *s.R;
  const auto c = make_context(R, s.cyclic({{1, 2}, {3, 4}}));
  const ConjugateFamily fam = conjugate_family(R, *c);
  EXPECT_EQ(fam.via_G.size(), 3u);
  EXPECT_EQ(fam.via_F.size(), 3u);
  EXPECT_TRUE(fam.agree);
  EXPECT_TRUE(fam.conj_formula);
  bool nse_eq = false;
  const auto rows = fully_normalized_rows(R, fam, &nse_eq);
  EXPECT_TRUE(nse_eq);
  std::size_t fully = 0;
  for (const EquivRow& r : rows) {
    EXPECT_TRUE(r.consistent());
    fully += r.i;
  }
  // Only the conjugate central in S is fully normalized.
  EXPECT_EQ(fully, 1u);
  for (const EquivRow& r : fully_centralized_rows(R, fam)) EXPECT_TRUE(r.consistent());
}

TEST(Regular, S4SubnormalsSatisfyTheoremItems) {
  S4Regular s;
  const RegularBuild& R = *s.R;
  for (const SubnormalEntry& e : R.st->subnormals) {
    const auto c = make_context(R, e.set);
    for (const CheckItem& it : verify_main_theorem_A(R, *c).items) EXPECT_TRUE(it.ok) << it.name << " " << it.detail;
  }
}

TEST(Regular, PSL27LocalityIsQuasisimple) {
  const FiniteGroup G = load_group(read_file(catalog_file("psl2_7.grp")));
  auto R = build_regular(G, 2);
  EXPECT_FALSE(R->constrained());
  EXPECT_EQ(R->L->size(), 104u);
  EXPECT_EQ(delta_size(*R), 9u);
  EXPECT_FALSE(R->delta.delta[R->LS->trivial()]);
  EXPECT_EQ(R->st->subnormals.size(), 2u);
  ASSERT_EQ(R->st->components.size(), 1u);
  EXPECT_EQ(R->st->E.count(), 104u);
  EXPECT_EQ(R->LS->order(R->st->tildeT), 8u);
  EXPECT_EQ(R->Gstar.count(), 8u);
  EXPECT_TRUE(is_regular_locality(*R->L, *R->st).ok);
}

TEST(Regular, FlagshipStructure) {
  const FiniteGroup G = load_group(read_file(catalog_file("psl2_7xs4.grp")));
  BuildOptions bo;
  bo.locality_cap = 4096;
  auto R = build_regular(G, 2, bo);
  EXPECT_EQ(G.order(), 4032u);
  EXPECT_EQ(R->LS->num_subgroups(), 389u);
  EXPECT_EQ(R->classes.subcentric.size(), 379u);
  EXPECT_EQ(delta_size(*R), 354u);
  EXPECT_EQ(R->L->size(), 2496u);
  EXPECT_EQ(R->st->subnormals.size(), 14u);
  EXPECT_EQ(R->st->components.size(), 1u);
  EXPECT_EQ(R->st->E.count(), 104u);
  EXPECT_EQ(R->LS->order(R->st->tildeT), 8u);
  EXPECT_EQ(R->Gstar.count(), 192u);
}

TEST(Regular, LocalityCapIsEnforced) {
  const FiniteGroup G = load_group(read_file(catalog_file("psl2_7xs4.grp")));
  BuildOptions bo;
  bo.locality_cap = 1000;
  try {
    build_regular(G, 2, bo);
    FAIL() << "cap not enforced";
  } catch (const LabError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
}

TEST(Regular, DicyclicGroupIsNotLinking) {
  const FiniteGroup G = load_group(read_file(catalog_file("c3c4.grp")));
  EXPECT_FALSE(is_characteristic_p(G, whole(G), 2));
  auto R = build_regular(G, 2);
  const LinkingReport r = is_linking_locality(*R->L);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.char_p);
}

TEST(Regular, BijectionOnS4AndPSL) {
  for (const char* name : {"s4.grp", "psl2_7.grp"}) {
    const FiniteGroup G = load_group(read_file(catalog_file(name)));
    InstanceState S(G, 2, build_regular(G, 2));
    for (const CheckRecord& r : suite_bijection(S)) EXPECT_TRUE(r.ok) << name << " " << r.id;
    const FusionSubnormals fs = fusion_side_subnormals(S);
    EXPECT_EQ(fs.members.size(), S.build().st->subnormals.size()) << name;
  }
}
