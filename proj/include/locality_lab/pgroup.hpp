#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "group.hpp"

namespace llab {

using SubId = uint32_t;
constexpr SubId kNoSub = 0xFFFFFFFFu;

// Subgroup lattice of a p-subgroup X of an ambient group, |X| <= 64.
// Local element indices follow ambient order, so local 0 is the identity.
// Subgroups are 64-bit masks over local indices, numbered by (order, mask).
class PLattice {
 public:
  PLattice(const FiniteGroup& G, const Bits& X, int p) : G_(&G), p_(p), ambient_mask_(X) {
    if (X.count() > 64) throw LabError(ErrorKind::CapExceeded, "p-subgroup larger than 64");
    if (!is_p_power(X.count(), p)) throw LabError(ErrorKind::InvalidInput, "lattice base is not a p-group");
    amb_ = X.members();
    n_ = static_cast<unsigned>(amb_.size());
    for (unsigned i = 0; i < n_; ++i) local_.emplace(amb_[i], i);
    mul_.assign(n_ * n_, 0);
    inv_.assign(n_, 0);
    for (unsigned a = 0; a < n_; ++a) {
      inv_[a] = local_.at(G.inv(amb_[a]));
      for (unsigned b = 0; b < n_; ++b) mul_[a * n_ + b] = static_cast<uint8_t>(local_.at(G.mul(amb_[a], amb_[b])));
    }
    enumerate();
  }

  const FiniteGroup& group() const { return *G_; }
  int prime() const { return p_; }
  unsigned size() const { return n_; }
  const Bits& ambient_set() const { return ambient_mask_; }
  Elem ambient(unsigned x) const { return amb_[x]; }
  int local(Elem g) const {
    auto it = local_.find(g);
    return it == local_.end() ? -1 : static_cast<int>(it->second);
  }
  unsigned mul(unsigned a, unsigned b) const { return mul_[a * n_ + b]; }
  unsigned inv(unsigned a) const { return inv_[a]; }
  unsigned conj(unsigned x, unsigned g) const { return mul(mul(inv(g), x), g); }
  uint64_t full_mask() const { return n_ == 64 ? ~uint64_t{0} : (uint64_t{1} << n_) - 1; }

  std::size_t num_subgroups() const { return masks_.size(); }
  SubId trivial() const { return 0; }
  SubId top() const { return static_cast<SubId>(masks_.size() - 1); }
  uint64_t mask(SubId s) const { return masks_[s]; }
  unsigned order(SubId s) const { return static_cast<unsigned>(std::popcount(masks_[s])); }
  bool le(SubId a, SubId b) const { return (masks_[a] & ~masks_[b]) == 0; }
  SubId id_of(uint64_t m) const {
    auto it = ids_.find(m);
    return it == ids_.end() ? kNoSub : it->second;
  }

  uint64_t closure(uint64_t gens) const {
    uint64_t out = 1;
    std::vector<unsigned> q{0};
    std::vector<unsigned> gl;
    for_each_bit(gens, [&](unsigned g) { gl.push_back(g); });
    for (std::size_t h = 0; h < q.size(); ++h)
      for (unsigned g : gl) {
        unsigned y = mul(q[h], g);
        if (!(out & mask_bit(y))) {
          out |= mask_bit(y);
          q.push_back(y);
        }
      }
    return out;
  }
  SubId generated(uint64_t gens) const { return id_of(closure(gens)); }
  SubId join(SubId a, SubId b) const {
    if (le(a, b)) return b;
    if (le(b, a)) return a;
    return generated(masks_[a] | masks_[b]);
  }
  SubId meet(SubId a, SubId b) const { return id_of(masks_[a] & masks_[b]); }

  // Greedy generating set of a subgroup (local indices).
  std::vector<unsigned> gens(SubId s) const {
    std::vector<unsigned> out;
    uint64_t cur = 1, target = masks_[s];
    for_each_bit(target, [&](unsigned x) {
      if (cur == target || (cur & mask_bit(x))) return;
      out.push_back(x);
      uint64_t m = 0;
      for (unsigned g : out) m |= mask_bit(g);
      cur = closure(m);
    });
    return out;
  }

  uint64_t conj_mask(uint64_t m, unsigned g) const {
    uint64_t out = 0;
    for_each_bit(m, [&](unsigned x) { out |= mask_bit(conj(x, g)); });
    return out;
  }
  SubId conj_sub(SubId s, unsigned g) const { return id_of(conj_mask(masks_[s], g)); }

  // N_W(Q) and C_W(Q) for Q, W in the lattice.
  SubId normalizer(SubId Q, SubId W) const {
    uint64_t out = 0;
    auto qg = gens(Q);
    for_each_bit(masks_[W], [&](unsigned g) {
      for (unsigned x : qg)
        if (!(masks_[Q] & mask_bit(conj(x, g)))) return;
      out |= mask_bit(g);
    });
    return id_of(out);
  }
  SubId centralizer_mask(uint64_t Qm, SubId W) const {
    uint64_t out = 0;
    std::vector<unsigned> xs;
    for_each_bit(Qm, [&](unsigned x) { xs.push_back(x); });
    for_each_bit(masks_[W], [&](unsigned g) {
      for (unsigned x : xs)
        if (mul(x, g) != mul(g, x)) return;
      out |= mask_bit(g);
    });
    return id_of(out);
  }
  SubId centralizer(SubId Q, SubId W) const { return centralizer_mask(mask_bit(0) | gens_mask(Q), W); }
  SubId center(SubId Q) const { return centralizer(Q, Q); }
  bool is_normal(SubId Q, SubId W) const { return le(W, normalizer(Q, W)); }

  std::vector<SubId> subgroups_of(SubId W) const {
    std::vector<SubId> out;
    for (SubId s = 0; s < masks_.size(); ++s)
      if (le(s, W)) out.push_back(s);
    return out;
  }
  std::vector<SubId> overgroups_in(SubId P, SubId W) const {
    std::vector<SubId> out;
    for (SubId s = 0; s < masks_.size(); ++s)
      if (le(P, s) && le(s, W)) out.push_back(s);
    return out;
  }
  // Subgroups of W that are cyclic.
  const std::vector<SubId>& cyclic() const { return cyclic_; }
  unsigned cyclic_gen(SubId c) const { return cyc_gen_.at(c); }

  uint64_t to_mask(const Bits& amb) const {
    uint64_t m = 0;
    amb.for_each([&](std::size_t g) {
      int l = local(static_cast<Elem>(g));
      if (l < 0) throw LabError(ErrorKind::InvalidInput, "element outside lattice base");
      m |= mask_bit(static_cast<unsigned>(l));
    });
    return m;
  }
  SubId from_ambient(const Bits& amb) const { return id_of(to_mask(amb)); }
  Bits to_ambient(SubId s) const {
    Bits b(G_->order());
    for_each_bit(masks_[s], [&](unsigned x) { b.set(amb_[x]); });
    return b;
  }
  std::vector<Elem> ambient_members(SubId s) const {
    std::vector<Elem> out;
    for_each_bit(masks_[s], [&](unsigned x) { out.push_back(amb_[x]); });
    return out;
  }

 private:
  uint64_t gens_mask(SubId Q) const {
    uint64_t m = 0;
    for (unsigned g : gens(Q)) m |= mask_bit(g);
    return m;
  }

  void enumerate() {
    std::unordered_map<uint64_t, char> seen;
    std::vector<uint64_t> all{1};
    seen.emplace(1, 1);
    for (std::size_t h = 0; h < all.size(); ++h) {
      uint64_t P = all[h];
      uint64_t N = 0;
      for (unsigned g = 0; g < n_; ++g)
        if (conj_mask(P, g) == P) N |= mask_bit(g);
      for_each_bit(N & ~P, [&](unsigned x) {
        unsigned xp = x;
        for (int k = 1; k < p_; ++k) xp = mul(xp, x);
        if (!(P & mask_bit(xp))) return;
        uint64_t Q = closure(P | mask_bit(x));
        if (seen.emplace(Q, 1).second) all.push_back(Q);
      });
    }
    std::sort(all.begin(), all.end(), [](uint64_t a, uint64_t b) {
      int ca = std::popcount(a), cb = std::popcount(b);
      return ca != cb ? ca < cb : a < b;
    });
    masks_ = all;
    for (SubId i = 0; i < masks_.size(); ++i) ids_.emplace(masks_[i], i);
    for (unsigned x = 0; x < n_; ++x) {
      SubId c = generated(mask_bit(x));
      if (!cyc_gen_.count(c)) {
        cyc_gen_.emplace(c, x);
        cyclic_.push_back(c);
      }
    }
    std::sort(cyclic_.begin(), cyclic_.end());
  }

  const FiniteGroup* G_;
  int p_;
  Bits ambient_mask_;
  std::vector<Elem> amb_;
  unsigned n_ = 0;
  std::unordered_map<Elem, unsigned> local_;
  std::vector<uint8_t> mul_;
  std::vector<unsigned> inv_;
  std::vector<uint64_t> masks_;
  std::unordered_map<uint64_t, SubId> ids_;
  std::vector<SubId> cyclic_;
  std::unordered_map<SubId, unsigned> cyc_gen_;
};

// Injective homomorphism between two lattice subgroups, as an element map.
struct Hom {
  SubId dom = 0;
  SubId img = 0;
  std::array<uint8_t, 64> map{};

  uint8_t operator()(unsigned x) const { return map[x]; }
  bool operator==(const Hom& o) const { return dom == o.dom && map == o.map; }
  bool operator!=(const Hom& o) const { return !(*this == o); }
  bool operator<(const Hom& o) const { return dom != o.dom ? dom < o.dom : map < o.map; }
};

struct HomHash {
  std::size_t operator()(const Hom& h) const {
    uint64_t x = 1469598103934665603ull ^ h.dom;
    for (uint8_t b : h.map) x = (x ^ b) * 1099511628211ull;
    return static_cast<std::size_t>(x);
  }
};

inline Hom hom_identity(const PLattice& L, SubId P) {
  Hom h;
  h.dom = h.img = P;
  h.map.fill(0xFF);
  for_each_bit(L.mask(P), [&](unsigned x) { h.map[x] = static_cast<uint8_t>(x); });
  return h;
}

inline uint64_t hom_image_mask(const PLattice& L, const Hom& h, uint64_t m) {
  uint64_t out = 0;
  for_each_bit(m & L.mask(h.dom), [&](unsigned x) { out |= mask_bit(h.map[x]); });
  return out;
}

inline Hom hom_restrict(const PLattice& L, const Hom& h, SubId P) {
  Hom r;
  r.dom = P;
  r.map.fill(0xFF);
  uint64_t im = 0;
  for_each_bit(L.mask(P), [&](unsigned x) {
    r.map[x] = h.map[x];
    im |= mask_bit(h.map[x]);
  });
  r.img = L.id_of(im);
  return r;
}

// a then b; requires a's image inside b's domain.
inline Hom hom_compose(const PLattice& L, const Hom& a, const Hom& b) {
  Hom r;
  r.dom = a.dom;
  r.map.fill(0xFF);
  uint64_t im = 0;
  for_each_bit(L.mask(a.dom), [&](unsigned x) {
    uint8_t y = b.map[a.map[x]];
    r.map[x] = y;
    im |= mask_bit(y);
  });
  r.img = L.id_of(im);
  return r;
}

inline Hom hom_inverse(const PLattice& L, const Hom& a) {
  Hom r;
  r.dom = a.img;
  r.img = a.dom;
  r.map.fill(0xFF);
  for_each_bit(L.mask(a.dom), [&](unsigned x) { r.map[a.map[x]] = static_cast<uint8_t>(x); });
  return r;
}

inline bool hom_is_identity(const PLattice& L, const Hom& a) {
  bool ok = true;
  for_each_bit(L.mask(a.dom), [&](unsigned x) {
    if (a.map[x] != x) ok = false;
  });
  return ok;
}

inline bool hom_agrees_on(const PLattice& L, const Hom& a, const Hom& b, uint64_t m) {
  bool ok = true;
  for_each_bit(m, [&](unsigned x) {
    if (a.map[x] != b.map[x]) ok = false;
  });
  return ok;
}

// Conjugation by an ambient element h, restricted to {x in P : x^h in lattice base}.
inline Hom hom_conj_ambient(const PLattice& L, SubId P, Elem h) {
  const FiniteGroup& G = L.group();
  Hom r;
  r.map.fill(0xFF);
  uint64_t dm = 0, im = 0;
  for_each_bit(L.mask(P), [&](unsigned x) {
    int y = L.local(G.conj(L.ambient(x), h));
    if (y < 0) return;
    r.map[x] = static_cast<uint8_t>(y);
    dm |= mask_bit(x);
    im |= mask_bit(static_cast<unsigned>(y));
  });
  r.dom = L.id_of(dm);
  r.img = L.id_of(im);
  return r;
}

// Conjugation by a local element, as a map P -> P^g.
inline Hom hom_conj_local(const PLattice& L, SubId P, unsigned g) {
  Hom r;
  r.dom = P;
  r.map.fill(0xFF);
  uint64_t im = 0;
  for_each_bit(L.mask(P), [&](unsigned x) {
    unsigned y = L.conj(x, g);
    r.map[x] = static_cast<uint8_t>(y);
    im |= mask_bit(y);
  });
  r.img = L.id_of(im);
  return r;
}

inline bool hom_is_injective_hom(const PLattice& L, const Hom& a) {
  uint64_t im = 0;
  bool ok = true;
  uint64_t dm = L.mask(a.dom);
  for_each_bit(dm, [&](unsigned x) {
    if (a.map[x] >= L.size()) {
      ok = false;
      return;
    }
    if (im & mask_bit(a.map[x])) ok = false;
    im |= mask_bit(a.map[x]);
    for_each_bit(dm, [&](unsigned y) {
      if (ok && a.map[L.mul(x, y)] != L.mul(a.map[x], a.map[y])) ok = false;
    });
  });
  return ok;
}

// Move a hom between lattices through ambient elements.
inline std::optional<Hom> hom_transport(const PLattice& from, const PLattice& to, const Hom& h) {
  Hom r;
  r.map.fill(0xFF);
  uint64_t dm = 0, im = 0;
  bool ok = true;
  for_each_bit(from.mask(h.dom), [&](unsigned x) {
    int a = to.local(from.ambient(x)), b = to.local(from.ambient(h.map[x]));
    if (a < 0 || b < 0) {
      ok = false;
      return;
    }
    r.map[a] = static_cast<uint8_t>(b);
    dm |= mask_bit(static_cast<unsigned>(a));
    im |= mask_bit(static_cast<unsigned>(b));
  });
  if (!ok) return std::nullopt;
  r.dom = to.id_of(dm);
  r.img = to.id_of(im);
  return r;
}

inline std::string mask_str(const PLattice& L, SubId P) {
  std::string s = "{";
  bool first = true;
  for_each_bit(L.mask(P), [&](unsigned x) {
    if (!first) s += ',';
    s += std::to_string(L.ambient(x));
    first = false;
  });
  return s + "}";
}

}  // namespace llab
