#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fusion_props.hpp"

namespace llab {

// Every morphism of E extends in F to a map on P·Q fixing Q pointwise.
inline bool centralizes(const FusionSystem& F, const FusionSystem& E, SubId Q) {
  const PLattice& L = F.lattice();
  const uint64_t qm = L.mask(Q);
  for (SubId P : L.subgroups_of(E.base())) {
    if (!E.over(P)) continue;
    const SubId PQ = L.join(P, Q);
    if (L.order(PQ) * L.order(L.meet(P, Q)) != L.order(P) * L.order(Q)) return false;
    std::vector<Hom> ext;
    for (const Hom& h : F.homs(PQ, F.base()))
      if (fixes_pointwise(L, h, qm)) ext.push_back(h);
    for (const Hom& phi : E.homs(P, E.base())) {
      bool ok = false;
      for (const Hom& h : ext)
        if (hom_agrees_on(L, h, phi, L.mask(P))) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
  }
  return true;
}

inline bool commutes(const FusionSystem& F, const FusionSystem& F1, const FusionSystem& F2) {
  const PLattice& L = F.lattice();
  const SubId S1 = F1.base(), S2 = F2.base();
  // [S1,S2] = 1
  bool comm = true;
  for_each_bit(L.mask(S1), [&](unsigned a) {
    for_each_bit(L.mask(S2), [&](unsigned b) {
      if (L.mul(a, b) != L.mul(b, a)) comm = false;
    });
  });
  if (!comm) return false;
  const uint64_t inter = L.mask(S1) & L.mask(S2);
  const uint64_t z = L.mask(center_system(F1)) & L.mask(center_system(F2));
  if (inter & ~z) return false;
  return centralizes(F, F1, S2) && centralizes(F, F2, S1);
}

// F1 * F2: maps on P1P2 into S1S2 restricting to F_i-maps on P_i.
inline FusionSystem central_product(const FusionSystem& F, const FusionSystem& F1, const FusionSystem& F2) {
  if (!commutes(F, F1, F2)) throw LabError(ErrorKind::InvalidInput, "subsystems do not commute");
  const PLattice& L = F.lattice();
  const SubId S1 = F1.base(), S2 = F2.base();
  const SubId S12 = L.join(S1, S2);
  std::vector<Hom> gens;
  std::unordered_set<Hom, HomHash> seen;
  for (SubId P1 : L.subgroups_of(S1))
    for (SubId P2 : L.subgroups_of(S2)) {
      const SubId P = L.join(P1, P2);
      for (const Hom& phi : F.homs(P, S12)) {
        if (seen.count(phi)) continue;
        Hom r1 = hom_restrict(L, phi, P1), r2 = hom_restrict(L, phi, P2);
        if (r1.img == kNoSub || r2.img == kNoSub || !L.le(r1.img, S1) || !L.le(r2.img, S2)) continue;
        if (!F1.contains(r1) || !F2.contains(r2)) continue;
        seen.insert(phi);
        gens.push_back(phi);
      }
    }
  return FusionSystem::generate(L, S12, gens);
}

struct CheckItem {
  std::string name;
  bool ok = false;
  std::string detail;
};

inline std::vector<CheckItem> verify_central_product(const FusionSystem& F, const FusionSystem& F1,
                                                     const FusionSystem& F2) {
  FusionSystem D = central_product(F, F1, F2);
  std::vector<CheckItem> out;
  out.push_back({"D|S1 = F1", D.restrict_to(F1.base()) == F1});
  out.push_back({"D|S2 = F2", D.restrict_to(F2.base()) == F2});
  out.push_back({"F1, F2 normal in D", is_normal_subsystem(D, F1) && is_normal_subsystem(D, F2)});
  out.push_back({"F_i in C_D(S_j)", centralizes(D, F1, F2.base()) && centralizes(D, F2, F1.base())});
  out.push_back({"D saturated", is_saturated(D)});
  return out;
}

// Order of an automorphism of its domain.
inline std::size_t aut_order_of(const PLattice& L, const Hom& a) {
  Hom x = a;
  std::size_t k = 1;
  while (!hom_is_identity(L, x)) {
    x = hom_compose(L, x, a);
    ++k;
  }
  return k;
}

// p'-elements of Aut_F(P) with [P,phi] <= P∩T and phi|_{P∩T} in Aut_E(P∩T).
inline std::vector<Hom> ac_generators(const FusionSystem& F, const FusionSystem& E, SubId P) {
  const PLattice& L = F.lattice();
  const SubId PT = L.meet(P, E.base());
  const uint64_t ptm = L.mask(PT);
  std::vector<Hom> out;
  for (const Hom& phi : F.aut(P)) {
    if (aut_order_of(L, phi) % static_cast<std::size_t>(L.prime()) == 0) continue;
    if (commutator_mask(L, phi) & ~ptm) continue;
    if (!E.contains(hom_restrict(L, phi, PT))) continue;
    out.push_back(phi);
  }
  return out;
}

inline AutGroup Ac(const FusionSystem& F, const FusionSystem& E, SubId P) {
  return aut_closure(F.lattice(), P, ac_generators(F, E, P));
}

enum class ERVariant { RadicalCentric, Centric };

// (E R)_F over TR.
inline FusionSystem product_ER(const FusionSystem& F, const FusionSystem& E, SubId R,
                               ERVariant variant = ERVariant::RadicalCentric) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  if (!L.le(R, N_S_of(F, E))) throw LabError(ErrorKind::InvalidInput, "R is not contained in N_S(E)");
  const SubId TR = L.join(T, R);
  SubgroupClasses ec = subgroup_classes(E, false);
  const std::vector<SubId>& objs = variant == ERVariant::RadicalCentric ? ec.radical_centric : ec.centric;
  std::vector<Hom> gens;
  for (SubId P : L.subgroups_of(TR)) {
    if (!in_list(objs, L.meet(P, T))) continue;
    for (Hom& a : ac_generators(F, E, P))
      if (!hom_is_identity(L, a)) gens.push_back(std::move(a));
  }
  return FusionSystem::generate(L, TR, gens);
}

// N_F(T,E): F-maps between overgroups of T inside N_S(E) restricting to Aut(E) on T.
inline FusionSystem N_F_T_E(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  const SubId N = N_S_of(F, E);
  AutOfSystem A(E);
  std::vector<Hom> gens;
  for (SubId X : L.overgroups_in(T, N))
    for (const Hom& phi : F.homs(X, N)) {
      Hom r = hom_restrict(L, phi, T);
      if (r.img != T || !A.contains(r)) continue;
      gens.push_back(phi);
    }
  return FusionSystem::generate(L, N, gens);
}

struct FrattiniFactor {
  bool found = false;
  Hom psi, alpha;
};

// phi = psi·alpha with psi in Hom_{(E P)_F}(P, TP) and alpha in N_F(T).
inline FrattiniFactor frattini_factorize(const FusionSystem& F, const FusionSystem& E, const Hom& phi) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  const SubId P = phi.dom;
  FusionSystem EP = product_ER(F, E, P);
  FusionSystem NT = normalizer_system(F, T);
  std::vector<Hom> cands = EP.homs(P, L.join(T, P));
  std::sort(cands.begin(), cands.end());
  FrattiniFactor r;
  for (const Hom& psi : cands) {
    Hom alpha = hom_compose(L, hom_inverse(L, psi), phi);
    if (NT.contains(alpha)) {
      r = {true, psi, alpha};
      return r;
    }
  }
  return r;
}

}  // namespace llab
