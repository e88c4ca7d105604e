#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fusion.hpp"

namespace llab {

// ---------------------------------------------------------------------------
// Small helpers over a system's lattice.

inline std::vector<Hom> inner_auts(const PLattice& L, SubId P, SubId W) {
  std::vector<Hom> out;
  std::unordered_set<Hom, HomHash> seen;
  for_each_bit(L.mask(L.normalizer(P, W)), [&](unsigned s) {
    Hom c = hom_conj_local(L, P, s);
    if (seen.insert(c).second) out.push_back(c);
  });
  return out;
}

inline std::string hom_str(const PLattice& L, const Hom& h) {
  std::string s;
  for_each_bit(L.mask(h.dom), [&](unsigned x) {
    if (!s.empty()) s += ' ';
    s += std::to_string(L.ambient(x)) + "->" + std::to_string(L.ambient(h.map[x]));
  });
  return "[" + s + "]";
}

// A morphism generating one system but missing from the other, or "" if equal.
inline std::string fusion_diff(const FusionSystem& A, const FusionSystem& B) {
  const PLattice& L = A.lattice();
  if (A.base() != B.base()) return "bases differ: " + mask_str(L, A.base()) + " vs " + mask_str(L, B.base());
  for (const Hom& h : A.generators())
    if (!B.contains(h)) return "only in first: " + hom_str(L, h);
  for (const Hom& h : B.generators())
    if (!A.contains(h)) return "only in second: " + hom_str(L, h);
  return "";
}

// x^-1 (x phi) for all x in dom.
inline uint64_t commutator_mask(const PLattice& L, const Hom& h) {
  uint64_t m = 0;
  for_each_bit(L.mask(h.dom), [&](unsigned x) { m |= mask_bit(L.mul(L.inv(x), h.map[x])); });
  return m;
}

inline bool fixes_pointwise(const PLattice& L, const Hom& h, uint64_t m) {
  bool ok = true;
  for_each_bit(m, [&](unsigned x) {
    if (h.map[x] != x) ok = false;
  });
  return ok;
}

// Elements of Aut_F(P) whose order is prime to p.
inline std::vector<Hom> p_prime_elements(const PLattice& L, const std::vector<Hom>& auts) {
  std::vector<Hom> out;
  const int p = L.prime();
  for (const Hom& a : auts) {
    Hom x = a;
    std::size_t k = 1;
    while (!hom_is_identity(L, x)) {
      x = hom_compose(L, x, a);
      ++k;
    }
    if (k % p != 0) out.push_back(a);
  }
  return out;
}

inline AutGroup aut_closure(const PLattice& L, SubId P, const std::vector<Hom>& gens) {
  AutGroup A(L, P);
  for (const Hom& g : gens) A.add(L, g);
  A.finalize();
  return A;
}

// ---------------------------------------------------------------------------
// Saturation.

struct ClassFlags {
  SubId rep = 0;
  SubId checked = 0;  // fully normalized member examined
  bool fully_automized = false;
  bool receptive = false;
  std::string witness;
};

struct SaturationReport {
  bool saturated = true;
  std::vector<ClassFlags> classes;
  std::string witness;
};

// A saturated system has every fully normalized member fully automized and
// receptive; conversely one such member per class suffices. So the least
// fully normalized member decides each class.
inline SaturationReport saturation_report(const FusionSystem& F, bool stop_early = true) {
  const PLattice& L = F.lattice();
  const SubId S = F.base();
  const int p = L.prime();
  SaturationReport rep;
  for (const FClass& c : F.classes()) {
    ClassFlags fl;
    fl.rep = c.rep;
    SubId P = c.members[0];
    unsigned best = 0;
    for (SubId m : c.members) {
      unsigned n = L.order(L.normalizer(m, S));
      if (n > best) {
        best = n;
        P = m;
      }
    }
    fl.checked = P;
    std::vector<Hom> autS = inner_auts(L, P, S);
    std::unordered_set<Hom, HomHash> autS_set(autS.begin(), autS.end());
    fl.fully_automized = autS.size() == p_part(c.aut.order(), p);
    if (!fl.fully_automized) fl.witness = "Aut_S(P) not Sylow in Aut_F(P), P=" + mask_str(L, P);
    fl.receptive = true;
    if (fl.fully_automized) {
      for (SubId Q : c.members) {
        SubId NQ = L.normalizer(Q, S);
        std::vector<unsigned> nq;
        for_each_bit(L.mask(NQ), [&](unsigned g) { nq.push_back(g); });
        for (const Hom& phi : F.isos(Q, P)) {
          Hom phinv = hom_inverse(L, phi);
          uint64_t nphi = 0;
          for (unsigned g : nq) {
            Hom cg = hom_conj_local(L, Q, g);
            Hom t = hom_compose(L, hom_compose(L, phinv, cg), phi);
            if (autS_set.count(t)) nphi |= mask_bit(g);
          }
          SubId N = L.id_of(nphi);
          if (N == Q) continue;
          bool found = false;
          for (const Hom& psi : F.homs(N, S))
            if (hom_agrees_on(L, psi, phi, L.mask(Q))) {
              found = true;
              break;
            }
          if (!found) {
            fl.receptive = false;
            fl.witness = "no extension of " + hom_str(L, phi) + " to N_phi=" + mask_str(L, N);
            break;
          }
        }
        if (!fl.receptive) break;
      }
    }
    bool ok = fl.fully_automized && fl.receptive;
    if (!ok && rep.saturated) {
      rep.saturated = false;
      rep.witness = fl.witness;
    }
    rep.classes.push_back(std::move(fl));
    if (!ok && stop_early) break;
  }
  return rep;
}

inline bool is_saturated(const FusionSystem& F) { return saturation_report(F).saturated; }

// ---------------------------------------------------------------------------
// Closure properties.

inline bool strongly_closed(const FusionSystem& F, SubId T) {
  const PLattice& L = F.lattice();
  for (SubId C : L.cyclic()) {
    if (!L.le(C, T) || !F.over(C)) continue;
    for (SubId D : F.conjugates(C))
      if (!L.le(D, T)) return false;
  }
  return true;
}

inline bool is_strongly_closed(const FusionSystem& F, SubId T) { return strongly_closed(F, T); }

inline bool aut_stable(const FusionSystem& F, const FusionSystem& E) {
  for (const Hom& a : F.aut_generators(E.base()))
    if (conjugate_system(E, a) != E) return false;
  return true;
}

inline bool is_invariant(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  if (!E.is_subsystem_of(F) || !strongly_closed(F, T) || !aut_stable(F, E)) return false;
  std::vector<Hom> autT = F.aut(T);
  std::vector<Hom> autT_inv;
  for (const Hom& a : autT) autT_inv.push_back(hom_inverse(L, a));
  for (SubId P : L.subgroups_of(T)) {
    for (const Hom& phi : F.homs(P, T)) {
      if (E.contains(phi)) continue;
      bool ok = false;
      for (const Hom& ai : autT_inv) {
        Hom phi0 = hom_compose(L, phi, hom_restrict(L, ai, phi.img));
        if (E.contains(phi0)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
  }
  return true;
}

inline bool is_weakly_invariant(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  if (!E.is_subsystem_of(F) || !strongly_closed(F, T)) return false;
  for (SubId P : L.subgroups_of(T)) {
    for (const Hom& phi : E.homs(P, T)) {
      SubId Q = L.join(P, phi.img);
      for (const Hom& al : F.homs(Q, T)) {
        Hom a1 = hom_restrict(L, al, P);
        Hom a2 = hom_restrict(L, al, phi.img);
        Hom conj = hom_compose(L, hom_compose(L, hom_inverse(L, a1), phi), a2);
        if (!E.contains(conj)) return false;
      }
    }
  }
  return true;
}

// Extension condition: each alpha in Aut_E(T) extends to Aut_F(T C_S(T))
// with [alpha-bar, C_S(T)] <= Z(T).
inline bool extension_condition(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  const SubId C = L.centralizer(T, F.base());
  const SubId TC = L.join(T, C);
  const uint64_t zt = L.mask(L.center(T));
  std::unordered_set<Hom, HomHash> ok;
  for (const Hom& b : F.aut(TC)) {
    Hom bc = hom_restrict(L, b, C);
    if ((commutator_mask(L, bc) & ~zt) != 0) continue;
    ok.insert(hom_restrict(L, b, T));
  }
  for (const Hom& a : E.cls(T).aut.elements())
    if (!ok.count(a)) return false;
  return true;
}

inline bool same_lattice_within(const FusionSystem& F, const FusionSystem& E) {
  return &F.lattice() == &E.lattice() && F.lattice().le(E.base(), F.base());
}

inline bool is_normal_subsystem(const FusionSystem& F, const FusionSystem& E) {
  if (!same_lattice_within(F, E)) return false;
  return is_saturated(E) && is_invariant(F, E) && extension_condition(F, E);
}

// Chain search E = E_0 ⊴ E_1 ⊴ ... ⊴ F through pooled systems.
struct SubnormalResult {
  bool subnormal = false;
  std::vector<std::size_t> chain;  // pool indices from E upwards; F is implicit at the end
  bool cap_hit = false;
};

class NormalityOracle {
 public:
  bool normal(const FusionSystem& big, const FusionSystem& small) {
    auto key = std::make_pair(&big, &small);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r = small.is_subsystem_of(big) && is_normal_subsystem(big, small);
    memo_.emplace(key, r);
    return r;
  }

 private:
  std::map<std::pair<const FusionSystem*, const FusionSystem*>, bool> memo_;
};

inline SubnormalResult subnormal_chain(const FusionSystem& F, const FusionSystem& E,
                                       const std::vector<const FusionSystem*>& pool, NormalityOracle& oracle,
                                       std::size_t cap = 100000) {
  SubnormalResult res;
  if (E == F) {
    res.subnormal = true;
    return res;
  }
  // BFS downward from F: a node is reached once a chain to F is known.
  const std::size_t n = pool.size();
  std::vector<int> parent(n, -2);  // -1: parent is F
  std::deque<std::size_t> q;
  std::size_t steps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (*pool[i] == F) continue;
    if (!E.is_subsystem_of(*pool[i])) continue;
    if (++steps > cap) {
      res.cap_hit = true;
      return res;
    }
    if (oracle.normal(F, *pool[i])) {
      parent[i] = -1;
      q.push_back(i);
    }
  }
  auto finish = [&](std::size_t i) {
    for (long j = static_cast<long>(i); j >= 0; j = parent[j]) res.chain.push_back(static_cast<std::size_t>(j));
    res.subnormal = true;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (parent[i] != -2 && *pool[i] == E) {
      finish(i);
      return res;
    }
  while (!q.empty()) {
    std::size_t cur = q.front();
    q.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      if (parent[i] != -2 || *pool[i] == F) continue;
      if (!E.is_subsystem_of(*pool[i]) || !pool[i]->is_subsystem_of(*pool[cur]) || *pool[i] == *pool[cur]) continue;
      if (++steps > cap) {
        res.cap_hit = true;
        return res;
      }
      if (oracle.normal(*pool[cur], *pool[i])) {
        parent[i] = static_cast<int>(cur);
        if (*pool[i] == E) {
          finish(i);
          return res;
        }
        q.push_back(i);
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Normalizer and centralizer subsystems of a subgroup.

inline FusionSystem normalizer_system(const FusionSystem& F, SubId Q) {
  const PLattice& L = F.lattice();
  const SubId N = L.normalizer(Q, F.base());
  const uint64_t qm = L.mask(Q);
  std::vector<Hom> gens;
  for (SubId A : L.overgroups_in(Q, N))
    for (const Hom& h : F.homs(A, N))
      if (hom_image_mask(L, h, qm) == qm) gens.push_back(h);
  return FusionSystem::generate(L, N, gens);
}

inline FusionSystem centralizer_system(const FusionSystem& F, SubId Q) {
  const PLattice& L = F.lattice();
  const SubId C = L.centralizer(Q, F.base());
  const SubId QC = L.join(Q, C);
  const uint64_t qm = L.mask(Q);
  std::vector<Hom> gens;
  for (SubId A : L.overgroups_in(Q, QC))
    for (const Hom& h : F.homs(A, QC))
      if (fixes_pointwise(L, h, qm)) gens.push_back(hom_restrict(L, h, L.meet(A, C)));
  return FusionSystem::generate(L, C, gens);
}

// Largest normal subgroup of F.
inline SubId O_p_system(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  const SubId S = F.base();
  std::vector<SubId> subs = L.subgroups_of(S);
  std::sort(subs.begin(), subs.end(), [&](SubId a, SubId b) {
    unsigned oa = L.order(a), ob = L.order(b);
    return oa != ob ? oa > ob : a < b;
  });
  for (SubId R : subs) {
    if (!L.is_normal(R, S) || !strongly_closed(F, R)) continue;
    if (F.conjugates(R).size() != 1) continue;
    if (normalizer_system(F, R) == F) return R;
  }
  return L.trivial();
}

inline SubId center_system(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  const SubId Z = L.center(F.base());
  std::vector<SubId> subs = L.subgroups_of(Z);
  std::sort(subs.begin(), subs.end(), [&](SubId a, SubId b) {
    unsigned oa = L.order(a), ob = L.order(b);
    return oa != ob ? oa > ob : a < b;
  });
  for (SubId Q : subs)
    if (centralizer_system(F, Q) == F) return Q;
  return L.trivial();
}

inline bool is_constrained(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  SubId O = O_p_system(F);
  return L.le(L.centralizer(O, F.base()), O);
}

inline bool is_centric(const FusionSystem& F, SubId P) {
  const PLattice& L = F.lattice();
  for (SubId Q : F.conjugates(P))
    if (!L.le(L.centralizer(Q, F.base()), Q)) return false;
  return true;
}

inline bool is_radical(const FusionSystem& F, SubId P) {
  const PLattice& L = F.lattice();
  std::vector<Hom> A = F.aut(P);
  FiniteGroup G = aut_as_group(L, P, F.aut_generators(P));
  Bits O = O_p(G, whole(G), L.prime());
  std::size_t inn = inner_auts(L, P, P).size();
  return O.count() == inn;
}

struct SubgroupClasses {
  std::vector<SubId> centric, radical_centric, subcentric;
  bool constrained = false;
  SubId O_p = 0;
  SubId Z = 0;
};

inline bool in_list(const std::vector<SubId>& v, SubId x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Fully normalized members of P's class.
inline std::vector<SubId> fully_normalized_members(const FusionSystem& F, SubId P) {
  const PLattice& L = F.lattice();
  unsigned best = 0;
  std::vector<SubId> out;
  for (SubId Q : F.conjugates(P)) {
    unsigned n = L.order(L.normalizer(Q, F.base()));
    if (n > best) {
      best = n;
      out.clear();
    }
    if (n == best) out.push_back(Q);
  }
  return out;
}

inline std::vector<SubId> subcentric_set(const FusionSystem& F) {
  std::vector<SubId> out;
  for (const FClass& c : F.classes()) {
    bool ok = true;
    for (SubId Q : fully_normalized_members(F, c.rep))
      if (!is_constrained(normalizer_system(F, Q))) {
        ok = false;
        break;
      }
    if (ok)
      for (SubId m : c.members) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline SubgroupClasses subgroup_classes(const FusionSystem& F, bool with_subcentric = true) {
  const PLattice& L = F.lattice();
  SubgroupClasses r;
  for (const FClass& c : F.classes()) {
    if (!is_centric(F, c.rep)) continue;
    for (SubId m : c.members) r.centric.push_back(m);
    if (is_radical(F, c.rep))
      for (SubId m : c.members) r.radical_centric.push_back(m);
  }
  std::sort(r.centric.begin(), r.centric.end());
  std::sort(r.radical_centric.begin(), r.radical_centric.end());
  r.O_p = O_p_system(F);
  r.constrained = L.le(L.centralizer(r.O_p, F.base()), r.O_p);
  r.Z = center_system(F);
  if (with_subcentric) r.subcentric = subcentric_set(F);
  return r;
}

// ---------------------------------------------------------------------------
// Focal and hyperfocal subgroups, subsystems of p-power index.

inline SubId focal_subgroup(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  uint64_t m = 1;
  for (SubId C : L.cyclic()) {
    if (!F.over(C)) continue;
    for (const Hom& h : F.isos_from(C)) m |= commutator_mask(L, h);
  }
  return L.generated(m);
}

inline std::vector<Hom> O_upper_p_aut(const FusionSystem& F, SubId P) {
  const PLattice& L = F.lattice();
  AutGroup A = aut_closure(L, P, p_prime_elements(L, F.aut(P)));
  return A.elements();
}

inline SubId hyperfocal_subgroup(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  uint64_t m = 1;
  for (const FClass& c : F.classes()) {
    std::vector<Hom> op = O_upper_p_aut(F, c.rep);
    if (op.size() == 1) continue;
    for (std::size_t j = 0; j < c.members.size(); ++j) {
      Hom ti = hom_inverse(L, c.tau[j]);
      for (const Hom& a : op) m |= commutator_mask(L, hom_compose(L, hom_compose(L, ti, a), c.tau[j]));
    }
  }
  return L.generated(m);
}

// F_R = <O^p(Aut_F(P)) : P <= R>_R.
inline FusionSystem p_power_index_subsystem(const FusionSystem& F, SubId R) {
  const PLattice& L = F.lattice();
  SubId h = hyperfocal_subgroup(F);
  if (!L.le(h, R)) throw LabError(ErrorKind::InvalidInput, "hyperfocal subgroup not contained in R");
  std::vector<Hom> gens;
  for (SubId P : L.subgroups_of(R)) {
    for (const Hom& a : p_prime_elements(L, F.aut(P))) gens.push_back(a);
  }
  return FusionSystem::generate(L, R, gens);
}

inline FusionSystem O_upper_p_system(const FusionSystem& F) {
  return p_power_index_subsystem(F, hyperfocal_subgroup(F));
}

// ---------------------------------------------------------------------------
// Isomorphisms between p-groups on two lattices, found by backtracking on
// generator images filtered by element order.

inline unsigned local_order(const PLattice& L, unsigned x) {
  unsigned k = 1;
  for (unsigned y = x; y != 0; y = L.mul(y, x)) ++k;
  return k;
}

// Calls cb(map) for each isomorphism A -> B (map: local index of A -> local of B);
// stops when cb returns true.
inline bool for_each_isomorphism(const PLattice& LA, SubId A, const PLattice& LB, SubId B,
                                 const std::function<bool(const std::array<uint8_t, 64>&)>& cb) {
  if (LA.order(A) != LB.order(B)) return false;
  std::vector<unsigned> ga = LA.gens(A);
  std::vector<unsigned> bm;
  for_each_bit(LB.mask(B), [&](unsigned x) { bm.push_back(x); });
  std::vector<unsigned> img(ga.size());
  std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
    if (k == ga.size()) {
      // extend via BFS over words in the generators
      std::array<uint8_t, 64> mp;
      mp.fill(0xFF);
      mp[0] = 0;
      std::vector<unsigned> q{0};
      for (std::size_t h = 0; h < q.size(); ++h)
        for (std::size_t i = 0; i < ga.size(); ++i) {
          unsigned y = LA.mul(q[h], ga[i]);
          unsigned iy = LB.mul(mp[q[h]], img[i]);
          if (mp[y] == 0xFF) {
            mp[y] = static_cast<uint8_t>(iy);
            q.push_back(y);
          } else if (mp[y] != iy) {
            return false;
          }
        }
      uint64_t seen = 0;
      for (unsigned x : q) seen |= mask_bit(mp[x]);
      if (static_cast<unsigned>(std::popcount(seen)) != q.size()) return false;
      // verify homomorphism on all pairs
      for (unsigned x : q)
        for (unsigned y : q)
          if (mp[LA.mul(x, y)] != LB.mul(mp[x], mp[y])) return false;
      return cb(mp);
    }
    unsigned o = local_order(LA, ga[k]);
    for (unsigned b : bm) {
      if (local_order(LB, b) != o) continue;
      img[k] = b;
      if (rec(k + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

// Aut(F): automorphisms alpha of S with F^alpha = F.
inline std::vector<Hom> aut_of_system(const FusionSystem& F) {
  const PLattice& L = F.lattice();
  const SubId S = F.base();
  std::vector<Hom> out;
  for_each_isomorphism(L, S, L, S, [&](const std::array<uint8_t, 64>& mp) {
    Hom a;
    a.dom = a.img = S;
    a.map = mp;
    for (unsigned x = 0; x < 64; ++x)
      if (!(L.mask(S) & mask_bit(x))) a.map[x] = 0xFF;
    if (conjugate_system(F, a) == F) out.push_back(a);
    return false;
  });
  std::sort(out.begin(), out.end());
  return out;
}

// Aut(E) membership for automorphisms of T, cached.
class AutOfSystem {
 public:
  explicit AutOfSystem(const FusionSystem& E) : E_(&E) {}
  bool contains(const Hom& a) {
    auto it = memo_.find(a);
    if (it != memo_.end()) return it->second;
    bool r = conjugate_system(*E_, a) == *E_;
    memo_.emplace(a, r);
    return r;
  }

 private:
  const FusionSystem* E_;
  std::unordered_map<Hom, bool, HomHash> memo_;
};

// N_S(E) = {s in N_S(T) : c_s|_T in Aut(E)}.
inline SubId N_S_of(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  AutOfSystem A(E);
  uint64_t m = 0;
  for_each_bit(L.mask(L.normalizer(T, F.base())), [&](unsigned s) {
    if (A.contains(hom_conj_local(L, T, s))) m |= mask_bit(s);
  });
  SubId r = L.id_of(m);
  if (r == kNoSub) throw LabError(ErrorKind::Violation, "N_S(E) is not a subgroup");
  return r;
}

}  // namespace llab
