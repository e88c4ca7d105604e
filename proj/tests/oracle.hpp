#pragma once

// Brute-force reference computations used to derive and cross-check the
// frozen expected values in the tests. They only use the multiplication and
// inversion of FiniteGroup and plain std containers.

#include <map>
#include <set>
#include <vector>

#include "locality_lab/fusion.hpp"
#include "locality_lab/group_io.hpp"

namespace oracle {

using llab::Elem;
using llab::FiniteGroup;
using ElemSet = std::set<Elem>;
using Map = std::map<Elem, Elem>;
using MorphismSet = std::set<Map>;

inline ElemSet closure(const FiniteGroup& G, const std::vector<Elem>& gens) {
  ElemSet out{G.identity()};
  std::vector<Elem> todo{G.identity()};
  while (!todo.empty()) {
    Elem x = todo.back();
    todo.pop_back();
    for (Elem g : gens) {
      Elem y = G.mul(x, g);
      if (out.insert(y).second) todo.push_back(y);
    }
  }
  return out;
}

inline ElemSet closure_of_set(const FiniteGroup& G, const ElemSet& seed) { return closure(G, std::vector<Elem>(seed.begin(), seed.end())); }

inline ElemSet all_elements(const FiniteGroup& G) {
  ElemSet s;
  for (Elem g = 0; g < G.order(); ++g) s.insert(g);
  return s;
}

// Subgroups of K: closures of pairs, then joins until nothing new appears.
inline std::set<ElemSet> subgroups(const FiniteGroup& G, const ElemSet& K) {
  std::set<ElemSet> all;
  for (Elem a : K)
    for (Elem b : K) all.insert(closure(G, std::vector<Elem>{a, b}));
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<ElemSet> v(all.begin(), all.end());
    for (const auto& A : v)
      for (const auto& B : v) {
        ElemSet U = A;
        U.insert(B.begin(), B.end());
        if (all.insert(closure_of_set(G, U)).second) grew = true;
      }
  }
  return all;
}

inline ElemSet conjugate(const FiniteGroup& G, const ElemSet& X, Elem g) {
  ElemSet out;
  for (Elem x : X) out.insert(G.conj(x, g));
  return out;
}

inline ElemSet normalizer(const FiniteGroup& G, const ElemSet& X, const ElemSet& within) {
  ElemSet out;
  for (Elem g : within)
    if (conjugate(G, X, g) == X) out.insert(g);
  return out;
}

inline ElemSet centralizer(const FiniteGroup& G, const ElemSet& X, const ElemSet& within) {
  ElemSet out;
  for (Elem g : within) {
    bool c = true;
    for (Elem x : X) c = c && G.mul(x, g) == G.mul(g, x);
    if (c) out.insert(g);
  }
  return out;
}

inline bool is_normal(const FiniteGroup& G, const ElemSet& N, const ElemSet& K) { return normalizer(G, N, K) == K; }

inline bool subset(const ElemSet& A, const ElemSet& B) {
  for (Elem a : A)
    if (!B.count(a)) return false;
  return true;
}

// Subgroups reachable from K by chains of normal subgroups.
inline std::set<ElemSet> subnormal_subgroups(const FiniteGroup& G, const ElemSet& K) {
  std::set<ElemSet> out{K};
  std::vector<ElemSet> todo{K};
  const auto subs = subgroups(G, K);
  while (!todo.empty()) {
    ElemSet X = todo.back();
    todo.pop_back();
    for (const auto& N : subs)
      if (subset(N, X) && is_normal(G, N, X) && out.insert(N).second) todo.push_back(N);
  }
  return out;
}

// Subgroup generated by elements of order prime to p.
inline ElemSet O_upper_p(const FiniteGroup& G, const ElemSet& K, int p) {
  std::vector<Elem> gens;
  for (Elem g : K)
    if (G.elem_order(g) % p != 0) gens.push_back(g);
  return closure(G, gens);
}

// Largest normal p-subgroup of K.
inline ElemSet O_p(const FiniteGroup& G, const ElemSet& K, int p) {
  ElemSet best{G.identity()};
  for (const auto& N : subgroups(G, K)) {
    std::size_t n = N.size();
    while (n % p == 0) n /= p;
    if (n == 1 && is_normal(G, N, K) && N.size() > best.size()) best = N;
  }
  return best;
}

// Morphisms P -> S given by conjugation with elements of X, for all P <= S.
inline MorphismSet conjugation_morphisms(const FiniteGroup& G, const ElemSet& S, const ElemSet& X) {
  MorphismSet out;
  for (const auto& P : subgroups(G, S))
    for (Elem g : X) {
      Map m;
      bool inside = true;
      for (Elem x : P) {
        Elem y = G.conj(x, g);
        inside = inside && S.count(y);
        m[x] = y;
      }
      if (inside) out.insert(m);
    }
  return out;
}

// Morphism set of a library fusion system, in ambient elements.
inline MorphismSet morphisms_of(const llab::FusionSystem& F) {
  const llab::PLattice& L = F.lattice();
  MorphismSet out;
  for (llab::SubId P = 0; P < L.num_subgroups(); ++P) {
    if (!L.le(P, F.base()) || !F.over(P)) continue;
    for (const llab::Hom& h : F.homs(P, F.base())) {
      Map m;
      llab::for_each_bit(L.mask(P), [&](unsigned x) { m[L.ambient(x)] = L.ambient(h.map[x]); });
      out.insert(m);
    }
  }
  return out;
}

inline ElemSet to_set(const llab::Bits& b) {
  ElemSet s;
  for (auto x : b.members()) s.insert(static_cast<Elem>(x));
  return s;
}

inline ElemSet to_set(const llab::PLattice& L, llab::SubId P) {
  ElemSet s;
  llab::for_each_bit(L.mask(P), [&](unsigned x) { s.insert(L.ambient(x)); });
  return s;
}

inline Elem elem(const FiniteGroup& G, const std::vector<std::vector<int>>& cycles) { return llab::elem_cycles(G, cycles); }

inline FiniteGroup s4() {
  return FiniteGroup::generate(4, {llab::perm_from_cycles(4, {{1, 2, 3, 4}}), llab::perm_from_cycles(4, {{1, 2}})});
}

// Sylow 2-subgroup of S4 containing (1 2 3 4) and (1 3).
inline ElemSet s4_sylow(const FiniteGroup& G) { return closure(G, {elem(G, {{1, 2, 3, 4}}), elem(G, {{1, 3}})}); }

inline llab::Bits to_bits(const FiniteGroup& G, const ElemSet& X) {
  llab::Bits b(G.order());
  for (Elem x : X) b.set(x);
  return b;
}

}  // namespace oracle
