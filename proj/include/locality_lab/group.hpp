#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"

namespace llab {

using Elem = uint32_t;
using Perm = std::vector<uint8_t>;  // 0-based images of 0..degree-1

struct GroupCaps {
  std::size_t order = 5040;
  std::size_t table = 2048;  // build a multiplication table up to this order
};

// Permutation group with all elements listed in lexicographic order of their
// image tuples. Products act on the right: (a*b)(i) = b(a(i)).
class FiniteGroup {
 public:
  static FiniteGroup generate(int degree, const std::vector<Perm>& gens, GroupCaps caps = {}) {
    if (degree < 1) throw LabError(ErrorKind::InvalidInput, "degree must be positive");
    if (degree > 64) throw LabError(ErrorKind::DegreeOverflow, "degree " + std::to_string(degree) + " > 64");
    for (const auto& g : gens) {
      if (static_cast<int>(g.size()) != degree)
        throw LabError(ErrorKind::InvalidInput, "generator length differs from degree");
      std::vector<char> hit(degree, 0);
      for (auto v : g) {
        if (v >= degree || hit[v]) throw LabError(ErrorKind::InvalidInput, "generator is not a permutation");
        hit[v] = 1;
      }
    }
    FiniteGroup G;
    G.degree_ = degree;
    std::unordered_set<std::string> seen;
    std::vector<std::string> order;
    std::string id(degree, '\0');
    for (int i = 0; i < degree; ++i) id[i] = static_cast<char>(i);
    seen.insert(id);
    order.push_back(id);
    for (std::size_t head = 0; head < order.size(); ++head) {
      for (const auto& g : gens) {
        std::string nx(degree, '\0');
        const std::string& cur = order[head];
        for (int i = 0; i < degree; ++i) nx[i] = static_cast<char>(g[static_cast<uint8_t>(cur[i])]);
        if (seen.insert(nx).second) {
          if (order.size() >= caps.order)
            throw LabError(ErrorKind::OrderOverflow, "group order exceeds cap " + std::to_string(caps.order));
          order.push_back(std::move(nx));
        }
      }
    }
    std::sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                          [](char x, char y) { return static_cast<uint8_t>(x) < static_cast<uint8_t>(y); });
    });
    const std::size_t n = order.size();
    G.images_.resize(n * degree);
    for (std::size_t e = 0; e < n; ++e)
      for (int i = 0; i < degree; ++i) G.images_[e * degree + i] = static_cast<uint8_t>(order[e][i]);
    G.build_index();
    G.inv_.resize(n);
    std::vector<uint8_t> tmp(degree);
    for (std::size_t e = 0; e < n; ++e) {
      const uint8_t* a = G.images(static_cast<Elem>(e));
      for (int i = 0; i < degree; ++i) tmp[a[i]] = static_cast<uint8_t>(i);
      G.inv_[e] = G.lookup(tmp.data());
    }
    for (const auto& g : gens) G.gens_.push_back(G.lookup(g.data()));
    if (n <= caps.table) {
      G.table_.resize(n * n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          G.table_[a * n + b] = static_cast<uint16_t>(G.compose(static_cast<Elem>(a), static_cast<Elem>(b)));
    }
    return G;
  }

  int degree() const { return degree_; }
  std::size_t order() const { return inv_.size(); }
  Elem identity() const { return 0; }
  const std::vector<Elem>& generators() const { return gens_; }
  bool has_table() const { return !table_.empty(); }

  const uint8_t* images(Elem a) const { return images_.data() + static_cast<std::size_t>(a) * degree_; }

  Elem mul(Elem a, Elem b) const {
    if (!table_.empty()) return table_[static_cast<std::size_t>(a) * order() + b];
    return compose(a, b);
  }
  Elem inv(Elem a) const { return inv_[a]; }
  Elem conj(Elem x, Elem g) const { return mul(mul(inv(g), x), g); }
  Elem commutator(Elem a, Elem b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
  Elem pow(Elem a, long k) const {
    if (k < 0) return pow(inv(a), -k);
    Elem r = identity();
    for (long i = 0; i < k; ++i) r = mul(r, a);
    return r;
  }
  std::size_t elem_order(Elem a) const {
    std::size_t k = 1;
    for (Elem x = a; x != identity(); x = mul(x, a)) ++k;
    return k;
  }

  std::optional<Elem> find(const uint8_t* imgs) const {
    auto it = index_.find(std::string_view(reinterpret_cast<const char*>(imgs), degree_));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::string cycles(Elem a) const {
    const uint8_t* im = images(a);
    std::vector<char> done(degree_, 0);
    std::ostringstream os;
    bool any = false;
    for (int i = 0; i < degree_; ++i) {
      if (done[i] || im[i] == i) continue;
      os << '(';
      int j = i;
      bool first = true;
      while (!done[j]) {
        done[j] = 1;
        if (!first) os << ' ';
        os << (j + 1);
        first = false;
        j = im[j];
      }
      os << ')';
      any = true;
    }
    return any ? os.str() : "()";
  }

 private:
  Elem lookup(const uint8_t* imgs) const {
    auto r = find(imgs);
    if (!r) throw LabError(ErrorKind::Violation, "product left the group");
    return *r;
  }
  Elem compose(Elem a, Elem b) const {
    uint8_t buf[64];
    const uint8_t* x = images(a);
    const uint8_t* y = images(b);
    for (int i = 0; i < degree_; ++i) buf[i] = y[x[i]];
    return lookup(buf);
  }
  void build_index() {
    index_.reserve(order_hint());
    const std::size_t n = images_.size() / degree_;
    for (std::size_t e = 0; e < n; ++e)
      index_.emplace(std::string_view(reinterpret_cast<const char*>(images_.data() + e * degree_), degree_),
                     static_cast<Elem>(e));
  }
  std::size_t order_hint() const { return images_.size() / degree_ + 1; }

  int degree_ = 0;
  std::vector<uint8_t> images_;
  std::unordered_map<std::string_view, Elem> index_;
  std::vector<Elem> inv_;
  std::vector<Elem> gens_;
  std::vector<uint16_t> table_;
};

// ---------------------------------------------------------------------------
// Subgroups are bitsets over the element indices of the ambient group.

inline Bits whole(const FiniteGroup& G) {
  Bits b(G.order());
  for (std::size_t i = 0; i < G.order(); ++i) b.set(i);
  return b;
}

inline Bits trivial_subgroup(const FiniteGroup& G) {
  Bits b(G.order());
  b.set(G.identity());
  return b;
}

inline Bits closure_from_gens(const FiniteGroup& G, const std::vector<Elem>& gens) {
  Bits out(G.order());
  std::vector<Elem> q{G.identity()};
  out.set(G.identity());
  for (std::size_t h = 0; h < q.size(); ++h)
    for (Elem g : gens) {
      Elem y = G.mul(q[h], g);
      if (!out.test(y)) {
        out.set(y);
        q.push_back(y);
      }
    }
  return out;
}

// Greedy generating set, deterministic (scans elements in canonical order).
inline std::vector<Elem> generators_of(const FiniteGroup& G, const Bits& H) {
  std::vector<Elem> gens;
  Bits cur = trivial_subgroup(G);
  const std::size_t target = H.count();
  std::size_t have = 1;
  H.for_each([&](std::size_t x) {
    if (have == target || cur.test(x)) return;
    gens.push_back(static_cast<Elem>(x));
    cur = closure_from_gens(G, gens);
    have = cur.count();
  });
  return gens;
}

inline Bits subgroup_generated(const FiniteGroup& G, const Bits& seed) {
  std::vector<Elem> gens;
  Bits cur = trivial_subgroup(G);
  seed.for_each([&](std::size_t x) {
    if (cur.test(x)) return;
    gens.push_back(static_cast<Elem>(x));
    cur = closure_from_gens(G, gens);
  });
  return cur;
}

inline Bits join(const FiniteGroup& G, const Bits& A, const Bits& B) { return subgroup_generated(G, A | B); }

inline bool is_subgroup(const FiniteGroup& G, const Bits& H) {
  if (!H.test(G.identity())) return false;
  bool ok = true;
  auto m = H.members();
  for (Elem a : m) {
    if (!H.test(G.inv(a))) return false;
    for (Elem b : m)
      if (!H.test(G.mul(a, b))) return false;
  }
  return ok;
}

inline Bits conjugate_set(const FiniteGroup& G, const Bits& X, Elem g) {
  Bits out(G.order());
  X.for_each([&](std::size_t x) { out.set(G.conj(static_cast<Elem>(x), g)); });
  return out;
}

inline Bits normalizer(const FiniteGroup& G, const Bits& X, const Bits& within) {
  Bits out(G.order());
  auto xs = X.members();
  within.for_each([&](std::size_t g) {
    for (Elem x : xs)
      if (!X.test(G.conj(x, static_cast<Elem>(g)))) return;
    out.set(g);
  });
  return out;
}
inline Bits normalizer(const FiniteGroup& G, const Bits& X) { return normalizer(G, X, whole(G)); }

inline Bits centralizer(const FiniteGroup& G, const Bits& X, const Bits& within) {
  Bits out(G.order());
  auto xs = X.members();
  within.for_each([&](std::size_t g) {
    for (Elem x : xs)
      if (G.mul(x, static_cast<Elem>(g)) != G.mul(static_cast<Elem>(g), x)) return;
    out.set(g);
  });
  return out;
}
inline Bits centralizer(const FiniteGroup& G, const Bits& X) { return centralizer(G, X, whole(G)); }

inline Bits center(const FiniteGroup& G, const Bits& K) { return centralizer(G, K, K); }

inline bool is_p_power(std::size_t n, int p) {
  if (n == 0) return false;
  while (n % p == 0) n /= p;
  return n == 1;
}
inline std::size_t p_part(std::size_t n, int p) {
  std::size_t r = 1;
  while (n % p == 0) {
    n /= p;
    r *= p;
  }
  return r;
}
inline bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Grow P0 inside H to a Sylow p-subgroup by adjoining least elements x of
// N_H(P) with x^p in P.
inline Bits sylow_extend(const FiniteGroup& G, int p, const Bits& H, const Bits& P0) {
  Bits P = P0;
  const std::size_t target = p_part(H.count(), p);
  while (P.count() < target) {
    Bits N = normalizer(G, P, H);
    bool grown = false;
    for (std::size_t x = N.first(); x < N.universe(); x = N.next(x)) {
      if (P.test(x)) continue;
      if (!P.test(G.pow(static_cast<Elem>(x), p))) continue;
      Bits add(G.order());
      add.set(x);
      P = join(G, P, add);
      grown = true;
      break;
    }
    if (!grown) throw LabError(ErrorKind::Violation, "Sylow growth stalled");
  }
  return P;
}

// Least canonical Sylow p-subgroup of H among those containing P0.
inline Bits sylow_containing(const FiniteGroup& G, int p, const Bits& H, const Bits& P0) {
  Bits P = sylow_extend(G, p, H, P0);
  Bits best = P;
  std::unordered_set<Bits, BitsHash> seen{P};
  H.for_each([&](std::size_t h) {
    Bits Q = conjugate_set(G, P, static_cast<Elem>(h));
    if (!seen.insert(Q).second) return;
    if (P0.subset_of(Q) && Q.canon_less(best)) best = Q;
  });
  return best;
}
inline Bits sylow(const FiniteGroup& G, int p, const Bits& H) { return sylow_containing(G, p, H, trivial_subgroup(G)); }
inline Bits sylow(const FiniteGroup& G, int p) { return sylow(G, p, whole(G)); }

// Conjugacy classes of K acting on the set X (X closed under K-conjugation).
inline std::vector<Bits> conjugacy_classes(const FiniteGroup& G, const Bits& K, const Bits& X) {
  auto kg = generators_of(G, K);
  Bits done(G.order());
  std::vector<Bits> out;
  X.for_each([&](std::size_t x) {
    if (done.test(x)) return;
    Bits cls(G.order());
    std::vector<Elem> q{static_cast<Elem>(x)};
    cls.set(x);
    for (std::size_t h = 0; h < q.size(); ++h)
      for (Elem g : kg) {
        Elem y = G.conj(q[h], g);
        if (!cls.test(y)) {
          cls.set(y);
          q.push_back(y);
        }
      }
    done |= cls;
    out.push_back(std::move(cls));
  });
  return out;
}

inline Bits normal_closure(const FiniteGroup& G, const Bits& seed, const Bits& K) {
  auto kg = generators_of(G, K);
  Bits orb = seed;
  std::vector<Elem> q = seed.members();
  for (std::size_t h = 0; h < q.size(); ++h)
    for (Elem g : kg) {
      Elem y = G.conj(q[h], g);
      if (!orb.test(y)) {
        orb.set(y);
        q.push_back(y);
      }
    }
  return subgroup_generated(G, orb);
}

inline bool is_normal(const FiniteGroup& G, const Bits& N, const Bits& K) {
  for (Elem g : generators_of(G, K))
    if (conjugate_set(G, N, g) != N) return false;
  return true;
}

inline void sort_canonical(std::vector<Bits>& v) {
  std::sort(v.begin(), v.end(), [](const Bits& a, const Bits& b) {
    std::size_t ca = a.count(), cb = b.count();
    if (ca != cb) return ca < cb;
    return a.canon_less(b);
  });
}

// Normal subgroups of K: joins of normal closures of conjugacy classes.
inline std::vector<Bits> normal_subgroups(const FiniteGroup& G, const Bits& K) {
  std::vector<Bits> base;
  std::unordered_set<Bits, BitsHash> seen;
  base.push_back(trivial_subgroup(G));
  seen.insert(base.back());
  for (const Bits& c : conjugacy_classes(G, K, K)) {
    Bits n = normal_closure(G, c, K);
    if (seen.insert(n).second) base.push_back(n);
  }
  std::vector<Bits> all = base;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (base[j].subset_of(all[i])) continue;
      Bits u = join(G, all[i], base[j]);
      if (seen.insert(u).second) all.push_back(u);
    }
  sort_canonical(all);
  return all;
}

// Subnormal subgroups of K: fixpoint of "normal in an already subnormal group".
inline std::vector<Bits> subnormal_subgroups(const FiniteGroup& G, const Bits& K) {
  std::vector<Bits> all{K};
  std::unordered_set<Bits, BitsHash> seen{K};
  for (std::size_t i = 0; i < all.size(); ++i) {
    Bits cur = all[i];
    for (Bits& n : normal_subgroups(G, cur))
      if (seen.insert(n).second) all.push_back(std::move(n));
  }
  sort_canonical(all);
  return all;
}
inline std::vector<Bits> subnormal_subgroups(const FiniteGroup& G) { return subnormal_subgroups(G, whole(G)); }

// All subgroups by repeated cyclic extension (joins with cyclic subgroups).
inline std::vector<Bits> all_subgroups(const FiniteGroup& G, const Bits& K, std::size_t cap = 5040) {
  if (K.count() > cap) throw LabError(ErrorKind::CapExceeded, "all_subgroups: order above cap");
  std::vector<Bits> cyc;
  std::vector<Elem> cyc_gen;
  std::unordered_set<Bits, BitsHash> seen;
  K.for_each([&](std::size_t x) {
    Bits c = closure_from_gens(G, {static_cast<Elem>(x)});
    if (seen.insert(c).second) {
      cyc.push_back(c);
      cyc_gen.push_back(static_cast<Elem>(x));
    }
  });
  std::vector<Bits> all = cyc;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < cyc.size(); ++j) {
      if (all[i].test(cyc_gen[j])) continue;
      Bits u = join(G, all[i], cyc[j]);
      if (seen.insert(u).second) all.push_back(std::move(u));
    }
  }
  sort_canonical(all);
  return all;
}
inline std::vector<Bits> all_subgroups(const FiniteGroup& G, std::size_t cap = 5040) {
  return all_subgroups(G, whole(G), cap);
}

inline Bits O_p(const FiniteGroup& G, const Bits& K, int p) {
  Bits P = sylow_extend(G, p, K, trivial_subgroup(G));
  Bits out = P;
  K.for_each([&](std::size_t k) { out &= conjugate_set(G, P, static_cast<Elem>(k)); });
  return out;
}

inline Bits O_upper_p(const FiniteGroup& G, const Bits& H, int p) {
  Bits seed(G.order());
  H.for_each([&](std::size_t x) {
    if (G.elem_order(static_cast<Elem>(x)) % p != 0) seed.set(x);
  });
  return subgroup_generated(G, seed);
}

inline bool is_characteristic_p(const FiniteGroup& G, const Bits& K, int p) {
  Bits O = O_p(G, K, p);
  return centralizer(G, O, K).subset_of(O);
}

inline Bits derived_subgroup(const FiniteGroup& G, const Bits& K) {
  auto kg = generators_of(G, K);
  Bits seed(G.order());
  for (Elem a : kg)
    for (Elem b : kg) seed.set(G.commutator(a, b));
  return normal_closure(G, seed, K);
}

inline bool is_quasisimple(const FiniteGroup& G, const Bits& K) {
  if (derived_subgroup(G, K) != K) return false;
  Bits Z = center(G, K);
  if (Z == K) return false;
  int above = 0;
  for (const Bits& N : normal_subgroups(G, K))
    if (Z.subset_of(N)) ++above;
  return above == 2;
}

inline std::vector<Bits> components_grp(const FiniteGroup& G, const Bits& K) {
  std::vector<Bits> out;
  for (const Bits& H : subnormal_subgroups(G, K))
    if (is_quasisimple(G, H)) out.push_back(H);
  return out;
}
inline std::vector<Bits> components_grp(const FiniteGroup& G) { return components_grp(G, whole(G)); }

inline std::vector<int> prime_divisors(std::size_t n) {
  std::vector<int> out;
  for (int d = 2; static_cast<std::size_t>(d) * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) out.push_back(static_cast<int>(n));
  return out;
}

inline Bits fitting_subgroup(const FiniteGroup& G, const Bits& K) {
  Bits F = trivial_subgroup(G);
  for (int q : prime_divisors(K.count())) F = join(G, F, O_p(G, K, q));
  return F;
}

inline Bits fitting_star_grp(const FiniteGroup& G, const Bits& K) {
  Bits E = trivial_subgroup(G);
  for (const Bits& C : components_grp(G, K)) E = join(G, E, C);
  return join(G, E, fitting_subgroup(G, K));
}
inline Bits fitting_star_grp(const FiniteGroup& G) { return fitting_star_grp(G, whole(G)); }

// p-subgroups of K: conjugates of subgroups of a Sylow.
inline std::vector<Bits> p_subgroups(const FiniteGroup& G, const Bits& K, int p) {
  Bits S = sylow(G, p, K);
  std::vector<Bits> out;
  std::unordered_set<Bits, BitsHash> seen;
  for (const Bits& P : all_subgroups(G, S)) {
    K.for_each([&](std::size_t k) {
      Bits Q = conjugate_set(G, P, static_cast<Elem>(k));
      if (seen.insert(Q).second) out.push_back(std::move(Q));
    });
  }
  sort_canonical(out);
  return out;
}

}  // namespace llab
