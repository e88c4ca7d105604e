#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fusion.hpp"
#include "partial_group.hpp"

namespace llab {

// L_Delta(G) = {g in G : S_g in Delta} with precomputed pair domain, pair
// products and conjugation.
class PartialHost {
 public:
  PartialHost(const FiniteGroup& G, const PLattice& LS, const std::vector<char>& delta, std::size_t cap = 2000)
      : G_(&G), LS_(&LS), delta_(delta) {
    const unsigned ns = LS.size();
    std::vector<uint64_t> sf_all(G.order());
    for (Elem g = 0; g < G.order(); ++g) {
      uint64_t m = 0;
      for (unsigned x = 0; x < ns; ++x)
        if (LS.local(G.conj(LS.ambient(x), g)) >= 0) m |= mask_bit(x);
      sf_all[g] = m;
      SubId id = LS.id_of(m);
      if (id != kNoSub && delta_[id]) elems_.push_back(g);
    }
    if (elems_.size() > cap)
      throw LabError(ErrorKind::CapExceeded, "locality has " + std::to_string(elems_.size()) + " elements, cap " + std::to_string(cap));
    const std::size_t n = elems_.size();
    pos_.assign(G.order(), kUndef);
    for (std::size_t i = 0; i < n; ++i) pos_[elems_[i]] = static_cast<uint32_t>(i);
    inv_.resize(n);
    sf_.resize(n);
    cs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Elem g = elems_[i];
      inv_[i] = pos_[G.inv(g)];
      sf_[i] = sf_all[g];
      cs_[i].fill(0xFF);
      for_each_bit(sf_[i], [&](unsigned x) { cs_[i][x] = static_cast<uint8_t>(LS.local(G.conj(LS.ambient(x), g))); });
    }
    s_idx_.resize(ns);
    for (unsigned x = 0; x < ns; ++x) s_idx_[x] = pos_[LS.ambient(x)];
    pd_.assign((n * n + 63) / 64, 0);
    pp_.assign(n * n, 0xFFFF);
    cj_.assign(n * n, 0xFFFF);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        uint64_t X = pre(b, LS.full_mask());
        X = pre(a, X);
        if (delta_ok(X)) {
          pd_[(a * n + b) >> 6] |= mask_bit((a * n + b) & 63);
          pp_[a * n + b] = static_cast<uint16_t>(pos_[G.mul(elems_[a], elems_[b])]);
        }
      }
    // x^f for x in D(f): word (f^-1, x, f)
    for (std::size_t f = 0; f < n; ++f) {
      uint64_t X1 = pre(f, LS.full_mask());
      for (std::size_t x = 0; x < n; ++x) {
        uint64_t X = pre(inv_[f], pre(x, X1));
        if (delta_ok(X)) cj_[f * n + x] = static_cast<uint16_t>(pos_[G.conj(elems_[x], elems_[f])]);
      }
    }
  }

  const FiniteGroup& group() const { return *G_; }
  const PLattice& s_lattice() const { return *LS_; }
  bool in_delta(SubId P) const { return delta_[P]; }
  const std::vector<char>& delta() const { return delta_; }
  std::size_t size() const { return elems_.size(); }
  uint32_t one() const { return 0; }
  Elem ambient(uint32_t i) const { return elems_[i]; }
  uint32_t index_of(Elem g) const { return pos_[g]; }
  uint32_t inv(uint32_t i) const { return inv_[i]; }
  uint64_t S_f(uint32_t i) const { return sf_[i]; }
  uint8_t s_conj(uint32_t i, unsigned x) const { return cs_[i][x]; }
  uint32_t s_elem(unsigned x) const { return s_idx_[x]; }

  bool pair_in_domain(uint32_t a, uint32_t b) const {
    std::size_t k = static_cast<std::size_t>(a) * size() + b;
    return (pd_[k >> 6] >> (k & 63)) & 1u;
  }
  uint32_t pair_product(uint32_t a, uint32_t b) const {
    uint16_t v = pp_[static_cast<std::size_t>(a) * size() + b];
    return v == 0xFFFF ? kUndef : v;
  }
  uint32_t conj(uint32_t x, uint32_t f) const {
    uint16_t v = cj_[static_cast<std::size_t>(f) * size() + x];
    return v == 0xFFFF ? kUndef : v;
  }
  uint64_t S_w(std::span<const uint32_t> w) const {
    uint64_t X = LS_->full_mask();
    for (std::size_t i = w.size(); i-- > 0;) X = pre(w[i], X);
    return X;
  }
  bool in_domain(std::span<const uint32_t> w) const { return delta_ok(S_w(w)); }
  uint32_t product(std::span<const uint32_t> w) const {
    Elem g = G_->identity();
    for (uint32_t f : w) g = G_->mul(g, elems_[f]);
    return pos_[g];
  }

 private:
  // {x in S_f : x^f in X}
  uint64_t pre(std::size_t f, uint64_t X) const {
    uint64_t out = 0;
    const auto& c = cs_[f];
    for_each_bit(sf_[f], [&](unsigned x) {
      if (X & mask_bit(c[x])) out |= mask_bit(x);
    });
    return out;
  }
  bool delta_ok(uint64_t m) const {
    SubId id = LS_->id_of(m);
    return id != kNoSub && delta_[id];
  }

  const FiniteGroup* G_;
  const PLattice* LS_;
  std::vector<char> delta_;
  std::vector<Elem> elems_;
  std::vector<uint32_t> pos_;
  std::vector<uint32_t> inv_;
  std::vector<uint64_t> sf_;
  std::vector<std::array<uint8_t, 64>> cs_;
  std::vector<uint32_t> s_idx_;
  std::vector<uint64_t> pd_;
  std::vector<uint16_t> pp_;
  std::vector<uint16_t> cj_;
};

// A locality structure on a partial subgroup of a host: element subset,
// its own p-subgroup frame Y and object set.
class SubLocality : public LocalityView {
 public:
  // Whole host with the host's S and Delta.
  explicit SubLocality(const PartialHost& host) : h_(&host), Y_(&host.s_lattice()), delta_(host.delta()) {
    elems_.resize(host.size());
    std::iota(elems_.begin(), elems_.end(), 0u);
    init();
  }
  SubLocality(const PartialHost& host, const Bits& universe, const PLattice& Y, std::vector<char> delta)
      : h_(&host), Y_(&Y), delta_(std::move(delta)) {
    for (uint32_t x : universe.members()) elems_.push_back(x);
    init();
  }

  const PartialHost& host() const { return *h_; }
  std::size_t size() const override { return elems_.size(); }
  uint32_t one() const override { return pos_[h_->one()]; }
  uint32_t inv(uint32_t f) const override { return pos_[h_->inv(elems_[f])]; }
  bool in_domain(std::span<const uint32_t> w) const override {
    buf_.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) buf_[i] = elems_[w[i]];
    return h_->in_domain(buf_);
  }
  uint32_t product(std::span<const uint32_t> w) const override {
    buf_.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) buf_[i] = elems_[w[i]];
    uint32_t r = h_->product(buf_);
    return r == kUndef ? kUndef : pos_[r];
  }
  bool pair_in_domain(uint32_t a, uint32_t b) const override { return h_->pair_in_domain(elems_[a], elems_[b]); }
  uint32_t pair_product(uint32_t a, uint32_t b) const override {
    uint32_t r = h_->pair_product(elems_[a], elems_[b]);
    return r == kUndef ? kUndef : pos_[r];
  }
  uint32_t conj(uint32_t x, uint32_t f) const override {
    uint32_t r = h_->conj(elems_[x], elems_[f]);
    return r == kUndef ? kUndef : pos_[r];
  }
  std::string name(uint32_t f) const override { return h_->group().cycles(h_->ambient(elems_[f])); }

  const PLattice& s_lattice() const override { return *Y_; }
  uint32_t s_elem(unsigned x) const override { return y_idx_[x]; }
  int s_local(uint32_t f) const override { return Y_->local(h_->ambient(elems_[f])); }
  bool in_delta(SubId P) const override { return delta_[P]; }
  const std::vector<char>& delta() const { return delta_; }
  uint64_t S_f(uint32_t f) const override { return yf_[f]; }
  unsigned s_conj(unsigned x, uint32_t f) const override { return ym_[f][x]; }
  uint64_t S_w(std::span<const uint32_t> w) const override {
    uint64_t X = Y_->full_mask();
    for (std::size_t i = w.size(); i-- > 0;) {
      uint64_t nx = 0;
      const auto& c = ym_[w[i]];
      for_each_bit(yf_[w[i]], [&](unsigned x) {
        if (X & mask_bit(c[x])) nx |= mask_bit(x);
      });
      X = nx;
    }
    return X;
  }

  uint32_t host_index(uint32_t f) const { return elems_[f]; }
  uint32_t view_index(uint32_t host_idx) const { return pos_[host_idx]; }
  Elem ambient(uint32_t f) const { return h_->ambient(elems_[f]); }
  uint32_t from_ambient(Elem g) const {
    uint32_t hi = h_->index_of(g);
    return hi == kUndef ? kUndef : pos_[hi];
  }
  Bits all() const {
    Bits b(size());
    for (uint32_t i = 0; i < size(); ++i) b.set(i);
    return b;
  }
  // View-index set of a lattice subgroup.
  Bits sub_set(SubId P) const {
    Bits b(size());
    for_each_bit(Y_->mask(P), [&](unsigned x) { b.set(y_idx_[x]); });
    return b;
  }
  // Lattice mask of H ∩ Y.
  uint64_t meet_mask(const Bits& H) const {
    uint64_t m = 0;
    for (unsigned x = 0; x < Y_->size(); ++x)
      if (H.test(y_idx_[x])) m |= mask_bit(x);
    return m;
  }
  Bits to_host(const Bits& H) const {
    Bits b(h_->size());
    H.for_each([&](std::size_t i) { b.set(elems_[i]); });
    return b;
  }
  Bits from_host(const Bits& Hh) const {
    Bits b(size());
    Hh.for_each([&](std::size_t i) {
      if (pos_[i] != kUndef) b.set(pos_[i]);
    });
    return b;
  }
  Bits to_ambient(const Bits& H) const {
    Bits b(h_->group().order());
    H.for_each([&](std::size_t i) { b.set(ambient(static_cast<uint32_t>(i))); });
    return b;
  }

 private:
  void init() {
    pos_.assign(h_->size(), kUndef);
    for (std::size_t i = 0; i < elems_.size(); ++i) pos_[elems_[i]] = static_cast<uint32_t>(i);
    y_idx_.resize(Y_->size());
    for (unsigned x = 0; x < Y_->size(); ++x) {
      uint32_t hi = h_->index_of(Y_->ambient(x));
      if (hi == kUndef || pos_[hi] == kUndef) throw LabError(ErrorKind::InvalidInput, "frame p-subgroup not inside the universe");
      y_idx_[x] = pos_[hi];
    }
    ym_.resize(elems_.size());
    yf_.resize(elems_.size());
    for (uint32_t f = 0; f < elems_.size(); ++f) {
      ym_[f].fill(0xFF);
      uint64_t m = 0;
      for (unsigned x = 0; x < Y_->size(); ++x) {
        uint32_t r = h_->conj(elems_[y_idx_[x]], elems_[f]);
        if (r == kUndef) continue;
        int l = Y_->local(h_->ambient(r));
        if (l < 0) continue;
        ym_[f][x] = static_cast<uint8_t>(l);
        m |= mask_bit(x);
      }
      yf_[f] = m;
    }
  }

  const PartialHost* h_;
  const PLattice* Y_;
  std::vector<char> delta_;
  std::vector<uint32_t> elems_;
  std::vector<uint32_t> pos_;
  std::vector<uint32_t> y_idx_;
  std::vector<std::array<uint8_t, 64>> ym_;
  std::vector<uint64_t> yf_;
  mutable std::vector<uint32_t> buf_;
};

// ---------------------------------------------------------------------------
// Object sets.

// Checks Delta for overgroup closure in S and closure under G-fusion.
inline std::optional<std::string> delta_closure_violation(const FiniteGroup& G, const PLattice& LS,
                                                          const std::vector<char>& delta) {
  for (SubId P = 0; P < LS.num_subgroups(); ++P) {
    if (!delta[P]) continue;
    for (SubId Q = 0; Q < LS.num_subgroups(); ++Q)
      if (LS.le(P, Q) && !delta[Q]) return "overgroup " + mask_str(LS, Q) + " of " + mask_str(LS, P) + " missing";
  }
  for (SubId P = 0; P < LS.num_subgroups(); ++P) {
    if (!delta[P]) continue;
    auto mem = LS.ambient_members(P);
    for (Elem g = 0; g < G.order(); ++g) {
      uint64_t m = 0;
      bool inside = true;
      for (Elem x : mem) {
        int l = LS.local(G.conj(x, g));
        if (l < 0) {
          inside = false;
          break;
        }
        m |= mask_bit(static_cast<unsigned>(l));
      }
      if (inside && !delta[LS.id_of(m)]) return "conjugate of " + mask_str(LS, P) + " by " + G.cycles(g) + " missing";
    }
  }
  return std::nullopt;
}

inline std::vector<char> delta_from_list(const PLattice& LS, const std::vector<SubId>& subs) {
  std::vector<char> d(LS.num_subgroups(), 0);
  for (SubId s : subs) d[s] = 1;
  return d;
}

inline std::vector<char> delta_all(const PLattice& LS) { return std::vector<char>(LS.num_subgroups(), 1); }

// ---------------------------------------------------------------------------
// Subset operations on a locality view. Subsets are Bits over view indices.

inline Bits partial_closure(const LocalityView& L, const Bits& seed, const Bits* conj_by = nullptr) {
  Bits N(L.size());
  std::vector<uint32_t> list;
  auto add = [&](uint32_t x) {
    if (x == kUndef || N.test(x)) return;
    N.set(x);
    list.push_back(x);
  };
  add(L.one());
  seed.for_each([&](std::size_t x) { add(static_cast<uint32_t>(x)); });
  std::vector<uint32_t> kf;
  if (conj_by) kf = conj_by->members();
  for (std::size_t h = 0; h < list.size(); ++h) {
    uint32_t x = list[h];
    add(L.inv(x));
    for (uint32_t f : kf) add(L.conj(x, f));
    for (std::size_t j = 0; j <= h; ++j) {
      uint32_t y = list[j];
      if (L.pair_in_domain(x, y)) add(L.pair_product(x, y));
      if (L.pair_in_domain(y, x)) add(L.pair_product(y, x));
    }
  }
  return N;
}

inline bool is_partial_subgroup(const LocalityView& L, const Bits& H) {
  if (!H.test(L.one())) return false;
  auto m = H.members();
  for (uint32_t a : m) {
    if (!H.test(L.inv(a))) return false;
    for (uint32_t b : m)
      if (L.pair_in_domain(a, b) && !H.test(L.pair_product(a, b))) return false;
  }
  return true;
}

// W(H) ⊆ D: all pairs multiply inside H and S_H lies in Delta.
inline bool is_subgroup(const LocalityView& L, const Bits& H) {
  auto m = H.members();
  for (uint32_t a : m)
    for (uint32_t b : m)
      if (!L.pair_in_domain(a, b) || !H.test(L.pair_product(a, b))) return false;
  if (!H.test(L.one())) return false;
  uint64_t X = L.s_lattice().full_mask();
  for (uint32_t h : m) X &= L.S_f(h);
  return L.delta_mask(X);
}

inline bool is_partial_normal(const LocalityView& L, const Bits& N, const Bits& K) {
  if (!N.subset_of(K) || !is_partial_subgroup(L, N)) return false;
  auto nm = N.members();
  bool ok = true;
  K.for_each([&](std::size_t f) {
    if (!ok) return;
    for (uint32_t x : nm) {
      uint32_t y = L.conj(x, static_cast<uint32_t>(f));
      if (y != kUndef && !N.test(y)) {
        ok = false;
        return;
      }
    }
  });
  return ok;
}

inline Bits partial_normal_closure(const LocalityView& L, const Bits& seed, const Bits& K) {
  return partial_closure(L, seed, &K);
}

inline void sort_sets(std::vector<Bits>& v) { sort_canonical(v); }

// Partial normal subgroups of the partial subgroup K: joins of normal
// closures of conjugation classes.
inline std::vector<Bits> enumerate_partial_normals(const LocalityView& L, const Bits& K) {
  const std::vector<uint32_t> km = K.members();
  // union-find over conjugation inside K
  std::unordered_map<uint32_t, uint32_t> parent;
  for (uint32_t x : km) parent[x] = x;
  std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (uint32_t f : km)
    for (uint32_t x : km) {
      uint32_t y = L.conj(x, f);
      if (y == kUndef || !K.test(y)) continue;
      uint32_t a = find(x), b = find(y);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<Bits> base;
  std::unordered_set<Bits, BitsHash> seen;
  Bits one(L.size());
  one.set(L.one());
  base.push_back(one);
  seen.insert(one);
  for (uint32_t x : km) {
    if (find(x) != x || x == L.one()) continue;
    Bits s(L.size());
    s.set(x);
    Bits n = partial_normal_closure(L, s, K);
    if (seen.insert(n).second) base.push_back(n);
  }
  std::vector<Bits> all = base;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 1; j < base.size(); ++j) {
      if (base[j].subset_of(all[i])) continue;
      Bits u = partial_normal_closure(L, all[i] | base[j], K);
      if (seen.insert(u).second) all.push_back(u);
    }
  sort_sets(all);
  return all;
}

struct SubnormalEntry {
  Bits set;
  int parent = -1;  // index of the set it is partial normal in; -1 for the top
  std::vector<Bits> normals;  // partial normal subgroups of `set`
};

inline std::vector<SubnormalEntry> enumerate_partial_subnormals(const LocalityView& L, const Bits& K,
                                                               std::size_t cap = 4096) {
  std::vector<SubnormalEntry> out{{K, -1, {}}};
  std::unordered_map<Bits, std::size_t, BitsHash> idx{{K, 0}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<Bits> ns = enumerate_partial_normals(L, out[i].set);
    for (const Bits& n : ns)
      if (!idx.count(n)) {
        if (out.size() >= cap) throw LabError(ErrorKind::CapExceeded, "more than " + std::to_string(cap) + " partial subnormal subgroups");
        idx.emplace(n, out.size());
        out.push_back({n, static_cast<int>(i), {}});
      }
    out[i].normals = std::move(ns);
  }
  return out;
}

inline std::vector<Bits> subnormal_sets(const std::vector<SubnormalEntry>& e) {
  std::vector<Bits> v;
  for (const auto& x : e) v.push_back(x.set);
  sort_sets(v);
  return v;
}

// Chain H = H_0 ⊴ ... ⊴ H_k = top, empty when H is not listed.
inline std::vector<Bits> subnormal_chain_of(const std::vector<SubnormalEntry>& e, const Bits& H) {
  std::vector<Bits> chain;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i].set == H) {
      for (int j = static_cast<int>(i); j >= 0; j = e[j].parent) chain.push_back(e[j].set);
      break;
    }
  return chain;
}

inline Bits N_L(const LocalityView& L, const Bits& X, const Bits* within = nullptr) {
  Bits out(L.size());
  auto xm = X.members();
  for (uint32_t f = 0; f < L.size(); ++f) {
    if (within && !within->test(f)) continue;
    Bits img(L.size());
    bool ok = true;
    for (uint32_t x : xm) {
      uint32_t y = L.conj(x, f);
      if (y == kUndef) {
        ok = false;
        break;
      }
      img.set(y);
    }
    if (ok && img == X) out.set(f);
  }
  return out;
}

inline Bits C_L(const LocalityView& L, const Bits& X, const Bits* within = nullptr) {
  Bits out(L.size());
  auto xm = X.members();
  for (uint32_t f = 0; f < L.size(); ++f) {
    if (within && !within->test(f)) continue;
    bool ok = true;
    for (uint32_t x : xm)
      if (L.conj(x, f) != x) {
        ok = false;
        break;
      }
    if (ok) out.set(f);
  }
  return out;
}

inline Bits Z_of(const LocalityView& L, const Bits& K) { return C_L(L, K, &K); }

inline Bits product_sets(const LocalityView& L, const Bits& X, const Bits& Y) {
  Bits out(L.size());
  auto ym = Y.members();
  X.for_each([&](std::size_t x) {
    for (uint32_t y : ym)
      if (L.pair_in_domain(static_cast<uint32_t>(x), y)) out.set(L.pair_product(static_cast<uint32_t>(x), y));
  });
  return out;
}

// Largest p-subgroup of the frame that is partial normal in K.
inline SubId O_p_of(const SubLocality& L, const Bits& K) {
  const PLattice& Y = L.s_lattice();
  std::vector<SubId> subs = Y.subgroups_of(Y.top());
  std::sort(subs.begin(), subs.end(), [&](SubId a, SubId b) {
    unsigned oa = Y.order(a), ob = Y.order(b);
    return oa != ob ? oa > ob : a < b;
  });
  for (SubId R : subs) {
    Bits r = L.sub_set(R);
    if (r.subset_of(K) && is_partial_normal(L, r, K)) return R;
  }
  return Y.trivial();
}

// F_{T}(H) with T = Y ∩ H.
inline FusionSystem fusion_of_partial_subgroup(const SubLocality& L, const Bits& H) {
  const PLattice& Y = L.s_lattice();
  SubId T = Y.id_of(L.meet_mask(H));
  if (T == kNoSub) throw LabError(ErrorKind::InvalidInput, "S ∩ H is not a subgroup");
  const uint64_t tm = Y.mask(T);
  std::vector<Hom> gens;
  std::unordered_set<Hom, HomHash> seen;
  H.for_each([&](std::size_t h) {
    Hom c;
    c.map.fill(0xFF);
    uint64_t dm = 0, im = 0;
    for_each_bit(tm, [&](unsigned x) {
      unsigned y = L.s_conj(x, static_cast<uint32_t>(h));
      if (y == 0xFF || !(tm & mask_bit(y))) return;
      c.map[x] = static_cast<uint8_t>(y);
      dm |= mask_bit(x);
      im |= mask_bit(y);
    });
    c.dom = Y.id_of(dm);
    c.img = Y.id_of(im);
    if (c.dom == kNoSub || c.img == kNoSub) throw LabError(ErrorKind::Violation, "conjugation domain is not a subgroup");
    if (c.dom == 0 || hom_is_identity(Y, c)) return;
    if (seen.insert(c).second) gens.push_back(c);
  });
  return FusionSystem::generate(Y, T, gens);
}

inline FusionSystem fusion_of_locality(const SubLocality& L) { return fusion_of_partial_subgroup(L, L.all()); }

struct FrattiniSplit {
  bool found = false;
  uint32_t n = 0, f = 0;
};

// g = nf with n in N, f in N_L(T), (n,f) in D and S_g = S_(n,f).
inline FrattiniSplit frattini_split(const SubLocality& L, const Bits& N, uint32_t g) {
  FrattiniSplit r;
  Bits T = L.sub_set(L.s_lattice().id_of(L.meet_mask(N)));
  Bits NT = N_L(L, T);
  const uint64_t sg = L.S_f(g);
  for (uint32_t n : N.members()) {
    NT.for_each([&](std::size_t f) {
      if (r.found) return;
      uint32_t w[2] = {n, static_cast<uint32_t>(f)};
      if (!L.pair_in_domain(n, w[1]) || L.pair_product(n, w[1]) != g) return;
      if (L.S_w(w) != sg) return;
      r = {true, n, w[1]};
    });
    if (r.found) break;
  }
  return r;
}

}  // namespace llab
