#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "locality_lab/fusion_products.hpp"
#include "locality_lab/fusion_props.hpp"
#include "locality_lab/group_io.hpp"
#include "oracle.hpp"

using namespace llab;

namespace {

// F_{D8}(S4) at p = 2 with S = <(1 2 3 4), (1 3)>.
struct S4Fixture {
  FiniteGroup G = oracle::s4();
  oracle::ElemSet Sset = oracle::s4_sylow(G);
  PLattice LS{G, oracle::to_bits(G, Sset), 2};
  FusionSystem F = fusion_from_conjugators(LS, LS.top(), whole(G));
  oracle::ElemSet V4set = oracle::O_p(G, oracle::all_elements(G), 2);
  oracle::ElemSet A4set = oracle::O_upper_p(G, oracle::all_elements(G), 2);
  SubId V4 = LS.from_ambient(oracle::to_bits(G, V4set));

  SubId cyclic(const std::vector<std::vector<int>>& c) const {
    return LS.from_ambient(closure_from_gens(G, {oracle::elem(G, c)}));
  }
};

bool group_is_abelian(const FiniteGroup& A) {
  for (Elem a = 0; a < A.order(); ++a)
    for (Elem b = 0; b < A.order(); ++b)
      if (A.mul(a, b) != A.mul(b, a)) return false;
  return true;
}

// Automorphisms of S counted over all bijections fixing the identity.
std::size_t brute_aut_count(const PLattice& L) {
  std::vector<unsigned> perm(L.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::size_t n = 0;
  do {
    if (perm[0] != 0) continue;
    bool hom = true;
    for (unsigned a = 0; a < L.size() && hom; ++a)
      for (unsigned b = 0; b < L.size() && hom; ++b) hom = perm[L.mul(a, b)] == L.mul(perm[a], perm[b]);
    n += hom;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return n;
}

}  // namespace

TEST(FusionOfGroup, S4MorphismSetMatchesBruteForce) {
  S4Fixture f;
  ASSERT_EQ(f.LS.size(), 8u);
  EXPECT_EQ(f.LS.num_subgroups(), 10u);
  const auto expected = oracle::conjugation_morphisms(f.G, f.Sset, oracle::all_elements(f.G));
  EXPECT_EQ(expected.size(), 28u);
  EXPECT_EQ(oracle::morphisms_of(f.F), expected);
  EXPECT_EQ(f.F.num_morphisms(), 28u);
}

TEST(FusionOfGroup, AutOfV4IsS3) {
  S4Fixture f;
  ASSERT_EQ(f.LS.order(f.V4), 4u);
  EXPECT_EQ(f.F.aut_order(f.V4), 6u);
  const FiniteGroup A = aut_as_group(f.LS, f.V4, f.F.aut_generators(f.V4));
  EXPECT_EQ(A.order(), 6u);
  EXPECT_FALSE(group_is_abelian(A));
}

TEST(FusionOfGroup, A4OverV4HasCyclicAut) {
  const FiniteGroup G = oracle::s4();
  const oracle::ElemSet A4 = oracle::O_upper_p(G, oracle::all_elements(G), 2);
  const oracle::ElemSet V4 = oracle::O_p(G, oracle::all_elements(G), 2);
  PLattice LV(G, oracle::to_bits(G, V4), 2);
  const FusionSystem E = fusion_from_conjugators(LV, LV.top(), oracle::to_bits(G, A4));
  EXPECT_EQ(E.aut_order(LV.top()), 3u);
  EXPECT_EQ(oracle::morphisms_of(E), oracle::conjugation_morphisms(G, V4, A4));
  EXPECT_EQ(E.num_morphisms(), 13u);
}

TEST(FusionOfGroup, InnerSystemOfPGroup) {
  S4Fixture f;
  const FusionSystem I = inner_system(f.LS, f.LS.top());
  EXPECT_EQ(oracle::morphisms_of(I), oracle::conjugation_morphisms(f.G, f.Sset, f.Sset));
  EXPECT_EQ(I.num_morphisms(), 20u);
  EXPECT_EQ(fusion_from_conjugators(f.LS, f.LS.top(), oracle::to_bits(f.G, f.Sset)), I);
  EXPECT_TRUE(is_saturated(I));
  const SubgroupClasses c = subgroup_classes(I);
  ASSERT_EQ(c.radical_centric.size(), 1u);
  EXPECT_EQ(c.radical_centric[0], f.LS.top());
  EXPECT_EQ(c.subcentric.size(), f.LS.num_subgroups());
}

TEST(FusionGenerate, EmptyAndInnerGenerators) {
  S4Fixture f;
  const FusionSystem I = inner_system(f.LS, f.LS.top());
  EXPECT_EQ(FusionSystem::generate(f.LS, f.LS.top(), {}), I);
  std::vector<Hom> inner;
  for (unsigned s = 0; s < f.LS.size(); ++s) inner.push_back(hom_conj_local(f.LS, f.LS.top(), s));
  EXPECT_EQ(FusionSystem::generate(f.LS, f.LS.top(), inner), I);
}

TEST(FusionGenerate, OrderThreeAutomorphismGivesA4Fusion) {
  const FiniteGroup G = oracle::s4();
  const oracle::ElemSet V4 = oracle::O_p(G, oracle::all_elements(G), 2);
  PLattice LV(G, oracle::to_bits(G, V4), 2);
  const Hom c = hom_conj_ambient(LV, LV.top(), oracle::elem(G, {{1, 2, 3}}));
  const FusionSystem E = FusionSystem::generate(LV, LV.top(), {c});
  const oracle::ElemSet A4 = oracle::O_upper_p(G, oracle::all_elements(G), 2);
  EXPECT_EQ(oracle::morphisms_of(E), oracle::conjugation_morphisms(G, V4, A4));
}

TEST(FusionSystem, RestrictionToV4) {
  S4Fixture f;
  EXPECT_EQ(f.F.restrict_to(f.LS.top()), f.F);
  const FusionSystem R = f.F.restrict_to(f.V4);
  EXPECT_EQ(R.base(), f.V4);
  EXPECT_EQ(R.aut_order(f.V4), 6u);
  const FusionSystem T = f.F.restrict_to(f.LS.trivial());
  EXPECT_EQ(T.num_morphisms(), 1u);
}

TEST(FusionSystem, ConjugateSystem) {
  S4Fixture f;
  const SubId T = f.cyclic({{1, 2}, {3, 4}});
  const SubId Tc = f.cyclic({{1, 3}, {2, 4}});
  const FusionSystem E = inner_system(f.LS, T);
  EXPECT_EQ(conjugate_system(E, hom_identity(f.LS, T)), E);
  const Hom phi = hom_conj_into(f.LS, T, f.LS.top(), oracle::elem(f.G, {{2, 3}}));
  ASSERT_EQ(phi.img, Tc);
  const FusionSystem Ec = conjugate_system(E, phi);
  EXPECT_EQ(Ec.base(), Tc);
  EXPECT_EQ(Ec, inner_system(f.LS, Tc));
  EXPECT_EQ(conjugate_system(Ec, hom_inverse(f.LS, phi)), E);
}

TEST(FusionSystem, DigestRoundTrip) {
  S4Fixture f;
  const FusionSystem back = FusionSystem::from_digest(f.LS, f.F.digest());
  EXPECT_EQ(back.digest(), f.F.digest());
  EXPECT_EQ(fusion_diff(back, f.F), "");
  EXPECT_NE(fusion_diff(inner_system(f.LS, f.LS.top()), f.F), "");
  EXPECT_THROW(FusionSystem::from_digest(f.LS, "garbage"), LabError);
}

TEST(FusionProps, SaturationOfCatalogSystems) {
  S4Fixture f;
  EXPECT_TRUE(is_saturated(f.F));
  // Aut_F(V4) = S3 has no Sylow 2-subgroup inside Aut_{V4}(V4) = 1.
  EXPECT_FALSE(is_saturated(f.F.restrict_to(f.V4)));
  const FiniteGroup C2 = FiniteGroup::generate(2, {perm_from_cycles(2, {{1, 2}})});
  PLattice L2(C2, whole(C2), 2);
  EXPECT_TRUE(is_saturated(inner_system(L2, L2.top())));
}

TEST(FusionProps, FocalAndHyperfocal) {
  S4Fixture f;
  EXPECT_EQ(focal_subgroup(f.F), f.V4);
  EXPECT_EQ(hyperfocal_subgroup(f.F), f.V4);
  oracle::ElemSet foc_gens;
  for (const auto& m : oracle::morphisms_of(f.F))
    for (const auto& [x, y] : m) foc_gens.insert(f.G.mul(f.G.inv(x), y));
  EXPECT_EQ(oracle::closure_of_set(f.G, foc_gens), f.V4set);
  oracle::ElemSet SA4;
  for (Elem x : f.Sset)
    if (f.A4set.count(x)) SA4.insert(x);
  EXPECT_EQ(oracle::to_set(f.LS, hyperfocal_subgroup(f.F)), SA4);
}

TEST(FusionProps, OUpperPIsA4Fusion) {
  S4Fixture f;
  const FusionSystem Op = O_upper_p_system(f.F);
  EXPECT_EQ(Op.base(), f.V4);
  EXPECT_EQ(oracle::morphisms_of(Op), oracle::conjugation_morphisms(f.G, f.V4set, f.A4set));
  EXPECT_EQ(p_power_index_subsystem(f.F, f.LS.top()), f.F);
  EXPECT_EQ(p_power_index_subsystem(f.F, f.V4), Op);
}

TEST(FusionProps, InvarianceAndNormality) {
  S4Fixture f;
  const FusionSystem E = O_upper_p_system(f.F);
  EXPECT_TRUE(is_invariant(f.F, f.F));
  EXPECT_TRUE(is_normal_subsystem(f.F, f.F));
  EXPECT_TRUE(is_strongly_closed(f.F, f.V4));
  EXPECT_TRUE(is_invariant(f.F, E));
  EXPECT_TRUE(is_normal_subsystem(f.F, E));
  const SubId T = f.cyclic({{1, 2}, {3, 4}});
  EXPECT_FALSE(is_strongly_closed(f.F, T));
  EXPECT_FALSE(is_invariant(f.F, inner_system(f.LS, T)));
}

TEST(FusionProps, SubnormalChainThroughV4) {
  S4Fixture f;
  const SubId T = f.cyclic({{1, 2}, {3, 4}});
  const FusionSystem V = inner_system(f.LS, f.V4);
  NormalityOracle no;
  const FusionSystem E = inner_system(f.LS, T);
  const SubnormalResult r = subnormal_chain(f.F, E, {&V, &E}, no);
  EXPECT_TRUE(r.subnormal);
  // E, then V.
  EXPECT_EQ(r.chain, (std::vector<std::size_t>{1, 0}));
  EXPECT_FALSE(subnormal_chain(f.F, E, {&E}, no).subnormal);
}

TEST(FusionProps, ConstrainedAndSubcentric) {
  S4Fixture f;
  EXPECT_EQ(O_p_system(f.F), f.V4);
  EXPECT_TRUE(is_constrained(f.F));
  const SubgroupClasses c = subgroup_classes(f.F);
  EXPECT_TRUE(c.constrained);
  EXPECT_EQ(c.subcentric.size(), 10u);
  EXPECT_TRUE(in_list(c.subcentric, f.LS.trivial()));

  const FiniteGroup P = load_group(read_file(std::string(LOCALITY_LAB_CATALOG) + "/psl2_7.grp"));
  PLattice LP(P, sylow(P, 2), 2);
  const FusionSystem FP = fusion_from_conjugators(LP, LP.top(), whole(P));
  EXPECT_EQ(oracle::morphisms_of(FP).size(), 44u);
  EXPECT_FALSE(is_constrained(FP));
  const SubgroupClasses cp = subgroup_classes(FP);
  EXPECT_EQ(cp.subcentric.size(), 9u);
  EXPECT_FALSE(in_list(cp.subcentric, LP.trivial()));
}

TEST(FusionProps, AutOfInnerSystemIsAutS) {
  S4Fixture f;
  const std::size_t brute = brute_aut_count(f.LS);
  EXPECT_EQ(brute, 8u);
  EXPECT_EQ(aut_of_system(inner_system(f.LS, f.LS.top())).size(), brute);
}

TEST(FusionProps, NSOfTrivialSystem) {
  S4Fixture f;
  const SubId T = f.cyclic({{1, 2}, {3, 4}});
  const SubId N = N_S_of(f.F, inner_system(f.LS, T));
  EXPECT_EQ(f.LS.order(N), 4u);
  EXPECT_EQ(N, f.LS.centralizer(T, f.LS.top()));
  EXPECT_EQ(N_S_of(f.F, O_upper_p_system(f.F)), f.LS.top());
}

TEST(FusionProducts, CentralProductOfCommutingC2s) {
  S4Fixture f;
  const SubId T1 = f.cyclic({{1, 2}, {3, 4}});
  const SubId T2 = f.cyclic({{1, 3}, {2, 4}});
  const FusionSystem E1 = inner_system(f.LS, T1), E2 = inner_system(f.LS, T2);
  EXPECT_TRUE(commutes(f.F, E1, E2));
  EXPECT_EQ(central_product(f.F, E1, E2), inner_system(f.LS, f.V4));
  EXPECT_EQ(central_product(f.F, E1, inner_system(f.LS, f.LS.trivial())), E1);
  for (const CheckItem& it : verify_central_product(f.F, E1, E2)) EXPECT_TRUE(it.ok) << it.name;
}

TEST(FusionProducts, A4FusionDoesNotCommuteWithItself) {
  S4Fixture f;
  const FusionSystem E = O_upper_p_system(f.F);
  EXPECT_EQ(center_system(E), f.LS.trivial());
  EXPECT_FALSE(commutes(f.F, E, E));
}

TEST(FusionProducts, AcOfV4IsCyclicOfOrderThree) {
  S4Fixture f;
  const FusionSystem E = O_upper_p_system(f.F);
  EXPECT_EQ(Ac(f.F, E, f.V4).order(), 3u);
  const SubId T = f.cyclic({{1, 3}, {2, 4}});
  const FusionSystem Et = inner_system(f.LS, T);
  const SubId P = f.cyclic({{1, 3}});
  EXPECT_EQ(Ac(f.F, Et, P).order(), 1u);
}

TEST(FusionProducts, ProductER) {
  S4Fixture f;
  const FusionSystem E = O_upper_p_system(f.F);
  EXPECT_EQ(product_ER(f.F, E, f.LS.top()), f.F);
  EXPECT_EQ(product_ER(f.F, E, f.V4), E);
  const SubId T = f.cyclic({{1, 3}, {2, 4}});
  const SubId R = f.cyclic({{1, 3}});
  const FusionSystem ER = product_ER(f.F, inner_system(f.LS, T), R);
  const SubId TR = f.LS.join(T, R);
  EXPECT_EQ(f.LS.order(TR), 4u);
  EXPECT_EQ(ER, inner_system(f.LS, TR));
}

TEST(FusionProducts, NormalizerOfTE) {
  S4Fixture f;
  EXPECT_EQ(N_F_T_E(f.F, f.F), normalizer_system(f.F, f.LS.top()));
  EXPECT_EQ(N_F_T_E(f.F, O_upper_p_system(f.F)), f.F);
  const SubId T = f.cyclic({{1, 2}, {3, 4}});
  const FusionSystem N = N_F_T_E(f.F, inner_system(f.LS, T));
  EXPECT_EQ(f.LS.order(N.base()), 4u);
}

TEST(FusionProducts, FrattiniFactorization) {
  S4Fixture f;
  const FusionSystem E = O_upper_p_system(f.F);
  const SubId P = f.cyclic({{1, 2}, {3, 4}});
  const Hom phi = hom_conj_into(f.LS, P, f.LS.top(), oracle::elem(f.G, {{1, 2, 3}}));
  ASSERT_TRUE(f.F.contains(phi));
  const FrattiniFactor r = frattini_factorize(f.F, E, phi);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(hom_compose(f.LS, r.psi, r.alpha), phi);
  EXPECT_TRUE(normalizer_system(f.F, f.V4).contains(r.alpha));
  const Hom a = f.F.aut(f.V4).back();
  const FrattiniFactor s = frattini_factorize(f.F, E, hom_identity(f.LS, P));
  ASSERT_TRUE(s.found);
  EXPECT_TRUE(hom_is_identity(f.LS, hom_compose(f.LS, s.psi, s.alpha)));
  EXPECT_TRUE(f.F.contains(a));
}
