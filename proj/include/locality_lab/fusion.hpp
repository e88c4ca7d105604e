#pragma once

#include <algorithm>
#include <cstdio>
#include <deque>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "pgroup.hpp"

namespace llab {

// Group of automorphisms of one lattice subgroup, kept closed.
class AutGroup {
 public:
  AutGroup() = default;
  AutGroup(const PLattice& L, SubId P) : P_(P) {
    Hom id = hom_identity(L, P);
    set_.insert(id);
    elems_.push_back(id);
  }

  SubId subgroup() const { return P_; }
  std::size_t order() const { return elems_.size(); }
  bool contains(const Hom& a) const { return set_.count(a) != 0; }
  const std::vector<Hom>& elements() const { return elems_; }
  const std::vector<Hom>& generators() const { return gens_; }

  bool add(const PLattice& L, const Hom& a) {
    if (contains(a)) return false;
    gens_.push_back(a);
    std::size_t old = elems_.size();
    std::vector<Hom> q;
    for (std::size_t i = 0; i < old; ++i) {
      Hom y = hom_compose(L, elems_[i], a);
      if (set_.insert(y).second) {
        elems_.push_back(y);
        q.push_back(y);
      }
    }
    for (std::size_t h = 0; h < q.size(); ++h)
      for (const Hom& g : gens_) {
        Hom y = hom_compose(L, q[h], g);
        if (set_.insert(y).second) {
          elems_.push_back(y);
          q.push_back(y);
        }
      }
    return true;
  }
  void finalize() { std::sort(elems_.begin(), elems_.end()); }

 private:
  SubId P_ = 0;
  std::unordered_set<Hom, HomHash> set_;
  std::vector<Hom> elems_;
  std::vector<Hom> gens_;
};

struct FClass {
  SubId rep = 0;
  std::vector<SubId> members;
  std::vector<Hom> tau;  // rep -> member
  AutGroup aut;
};

// Fusion system over a subgroup `base` of a lattice, stored as its
// conjugacy classes with transversal isomorphisms and Aut of each rep.
class FusionSystem {
 public:
  FusionSystem() = default;

  const PLattice& lattice() const { return *L_; }
  SubId base() const { return base_; }
  const std::vector<FClass>& classes() const { return cls_; }
  int class_of(SubId P) const { return cls_of_[P]; }
  bool over(SubId P) const { return cls_of_[P] >= 0; }
  const FClass& cls(SubId P) const { return cls_[cls_of_[P]]; }
  const Hom& tau(SubId P) const { return cls(P).tau[pos_[P]]; }
  const Hom& tau_inv(SubId P) const { return tau_inv_[P]; }
  const std::vector<SubId>& conjugates(SubId P) const { return cls(P).members; }
  std::size_t aut_order(SubId P) const { return cls(P).aut.order(); }

  bool contains(const Hom& phi) const {
    if (!over(phi.dom) || phi.img == kNoSub || !over(phi.img)) return false;
    if (cls_of_[phi.dom] != cls_of_[phi.img]) return false;
    Hom a = hom_compose(*L_, hom_compose(*L_, tau(phi.dom), phi), tau_inv(phi.img));
    return cls(phi.dom).aut.contains(a);
  }

  std::vector<Hom> aut(SubId P) const {
    std::vector<Hom> out;
    for (const Hom& a : cls(P).aut.elements())
      out.push_back(hom_compose(*L_, hom_compose(*L_, tau_inv(P), a), tau(P)));
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<Hom> aut_generators(SubId P) const {
    std::vector<Hom> out;
    for (const Hom& a : cls(P).aut.generators())
      out.push_back(hom_compose(*L_, hom_compose(*L_, tau_inv(P), a), tau(P)));
    return out;
  }
  std::vector<Hom> isos(SubId P, SubId Q) const {
    std::vector<Hom> out;
    if (!over(P) || !over(Q) || cls_of_[P] != cls_of_[Q]) return out;
    for (const Hom& a : cls(P).aut.elements())
      out.push_back(hom_compose(*L_, hom_compose(*L_, tau_inv(P), a), tau(Q)));
    return out;
  }
  // Hom_F(P, Q): isomorphisms onto conjugates of P inside Q.
  std::vector<Hom> homs(SubId P, SubId Q) const {
    std::vector<Hom> out;
    if (!over(P)) return out;
    for (SubId R : conjugates(P))
      if (L_->le(R, Q))
        for (Hom& h : isos(P, R)) out.push_back(std::move(h));
    return out;
  }
  std::vector<Hom> isos_from(SubId P) const { return homs(P, base_); }

  // Morphisms generating the system (together with inclusions/restrictions).
  std::vector<Hom> generators() const {
    std::vector<Hom> out;
    for (const FClass& c : cls_) {
      for (std::size_t i = 1; i < c.tau.size(); ++i) out.push_back(c.tau[i]);
      for (const Hom& a : c.aut.generators()) out.push_back(a);
    }
    return out;
  }

  bool operator==(const FusionSystem& o) const {
    if (base_ != o.base_ || cls_.size() != o.cls_.size()) return false;
    for (std::size_t i = 0; i < cls_.size(); ++i) {
      const FClass &a = cls_[i], &b = o.cls_[i];
      if (a.members != b.members || a.aut.order() != b.aut.order()) return false;
      for (const Hom& x : b.aut.generators())
        if (!a.aut.contains(x)) return false;
      for (std::size_t j = 0; j < a.members.size(); ++j) {
        Hom d = hom_compose(*L_, b.tau[j], hom_inverse(*L_, a.tau[j]));
        if (!a.aut.contains(d)) return false;
      }
    }
    return true;
  }
  bool operator!=(const FusionSystem& o) const { return !(*this == o); }

  bool is_subsystem_of(const FusionSystem& F) const {
    if (!L_->le(base_, F.base_)) return false;
    for (const Hom& g : generators())
      if (!F.contains(g)) return false;
    return true;
  }

  std::size_t num_morphisms() const {
    std::size_t n = 0;
    for (const FClass& c : cls_) n += c.members.size() * c.members.size() * c.aut.order();
    return n;
  }

  // Canonical text: per class the members, Aut of the rep and the least
  // element of each coset Aut*tau.
  std::string digest() const {
    std::ostringstream os;
    os << "base " << base_ << " p " << L_->prime() << "\n";
    auto put = [&](const Hom& h) {
      char buf[4];
      for_each_bit(L_->mask(h.dom), [&](unsigned x) {
        std::snprintf(buf, sizeof buf, "%02x", h.map[x]);
        os << buf;
      });
    };
    for (const FClass& c : cls_) {
      os << "class";
      for (SubId m : c.members) os << ' ' << m;
      os << "\n aut";
      for (const Hom& a : c.aut.elements()) {
        os << ' ';
        put(a);
      }
      os << "\n tau";
      for (std::size_t j = 0; j < c.members.size(); ++j) {
        Hom best;
        bool have = false;
        for (const Hom& a : c.aut.elements()) {
          Hom h = hom_compose(*L_, a, c.tau[j]);
          if (!have || h < best) {
            best = h;
            have = true;
          }
        }
        os << ' ';
        put(best);
      }
      os << "\n";
    }
    return os.str();
  }

  // Inverse of digest() on the same lattice.
  static FusionSystem from_digest(const PLattice& L, const std::string& text) {
    auto bad = [](const std::string& why) { return LabError(ErrorKind::Parse, "fusion digest: " + why); };
    std::istringstream in(text);
    std::string word;
    long base = -1, p = -1;
    if (!(in >> word) || word != "base" || !(in >> base) || !(in >> word) || word != "p" || !(in >> p))
      throw bad("missing header");
    if (base < 0 || static_cast<std::size_t>(base) >= L.num_subgroups() || p != L.prime()) throw bad("header mismatch");
    FusionSystem F;
    F.L_ = &L;
    F.base_ = static_cast<SubId>(base);
    const std::size_t n = L.num_subgroups();
    F.cls_of_.assign(n, -1);
    F.pos_.assign(n, 0);
    F.tau_inv_.assign(n, Hom{});
    auto read_hom = [&](const std::string& tok, SubId dom) {
      Hom h;
      h.dom = dom;
      h.map.fill(0xFF);
      std::size_t k = 0;
      uint64_t im = 0;
      bool ok = true;
      for_each_bit(L.mask(dom), [&](unsigned x) {
        if (k + 2 > tok.size()) {
          ok = false;
          return;
        }
        unsigned v = static_cast<unsigned>(std::stoul(tok.substr(k, 2), nullptr, 16));
        k += 2;
        if (v >= L.size()) {
          ok = false;
          return;
        }
        h.map[x] = static_cast<uint8_t>(v);
        im |= mask_bit(v);
      });
      if (!ok || k != tok.size()) throw bad("malformed morphism");
      h.img = L.id_of(im);
      if (h.img == kNoSub || !hom_is_injective_hom(L, h)) throw bad("not an injective homomorphism");
      return h;
    };
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream cl(line);
      if (!(cl >> word) || word != "class") throw bad("expected class line");
      FClass c;
      for (long m; cl >> m;) {
        if (m < 0 || static_cast<std::size_t>(m) >= n || F.cls_of_[m] >= 0 || !L.le(static_cast<SubId>(m), F.base_))
          throw bad("bad class member");
        c.members.push_back(static_cast<SubId>(m));
      }
      if (c.members.empty()) throw bad("empty class");
      c.rep = c.members[0];
      std::string al, tl;
      if (!std::getline(in, al) || !std::getline(in, tl)) throw bad("truncated class");
      std::istringstream as(al), ts(tl);
      if (!(as >> word) || word != "aut" || !(ts >> word) || word != "tau") throw bad("expected aut and tau lines");
      c.aut = AutGroup(L, c.rep);
      for (std::string tok; as >> tok;) {
        Hom a = read_hom(tok, c.rep);
        if (a.img != c.rep) throw bad("aut element does not fix the representative");
        c.aut.add(L, a);
      }
      std::size_t j = 0;
      for (std::string tok; ts >> tok; ++j) {
        if (j >= c.members.size()) throw bad("too many tau entries");
        Hom t = j == 0 ? hom_identity(L, c.rep) : read_hom(tok, c.rep);
        if (t.img != c.members[j]) throw bad("tau entry lands on the wrong member");
        c.tau.push_back(t);
      }
      if (j != c.members.size()) throw bad("missing tau entries");
      c.aut.finalize();
      const int ci = static_cast<int>(F.cls_.size());
      for (std::size_t k = 0; k < c.members.size(); ++k) {
        F.cls_of_[c.members[k]] = ci;
        F.pos_[c.members[k]] = static_cast<uint32_t>(k);
      }
      F.cls_.push_back(std::move(c));
    }
    for (SubId P = 0; P < n; ++P)
      if (L.le(P, F.base_) && F.cls_of_[P] < 0) throw bad("subgroup missing from every class");
    F.fill_inverses();
    return F;
  }

  // Smallest fusion system over `base` containing `gens` and all inner maps.
  static FusionSystem generate(const PLattice& L, SubId base, const std::vector<Hom>& gens_in) {
    std::vector<Hom> gens;
    std::unordered_set<Hom, HomHash> seen;
    auto push = [&](const Hom& h) {
      if (h.dom == kNoSub || h.img == kNoSub) throw LabError(ErrorKind::InvalidInput, "hom between non-subgroups");
      if (!L.le(h.dom, base) || !L.le(h.img, base))
        throw LabError(ErrorKind::InvalidInput, "generator leaves the base subgroup");
      if (hom_is_identity(L, h)) return;
      if (seen.insert(h).second) gens.push_back(h);
    };
    for (unsigned s : L.gens(base)) push(hom_conj_local(L, base, s));
    for (const Hom& h : gens_in) {
      push(h);
      push(hom_inverse(L, h));
    }
    FusionSystem F;
    F.L_ = &L;
    F.base_ = base;
    const std::size_t n = L.num_subgroups();
    F.cls_of_.assign(n, -1);
    F.pos_.assign(n, 0);
    F.tau_inv_.assign(n, Hom{});
    std::vector<uint64_t> gdom(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) gdom[i] = L.mask(gens[i].dom);
    for (SubId P = 0; P < n; ++P) {
      if (!L.le(P, base) || F.cls_of_[P] >= 0) continue;
      FClass c;
      c.rep = P;
      c.aut = AutGroup(L, P);
      int ci = static_cast<int>(F.cls_.size());
      std::vector<SubId> order{P};
      std::vector<Hom> taus{hom_identity(L, P)};
      F.cls_of_[P] = ci;
      F.pos_[P] = 0;
      for (std::size_t h = 0; h < order.size(); ++h) {
        SubId Q = order[h];
        const uint64_t qm = L.mask(Q);
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
          if (qm & ~gdom[gi]) continue;
          Hom e = hom_restrict(L, gens[gi], Q);
          SubId Q2 = e.img;
          Hom path = hom_compose(L, taus[h], e);
          if (F.cls_of_[Q2] < 0) {
            F.cls_of_[Q2] = ci;
            F.pos_[Q2] = static_cast<uint32_t>(order.size());
            order.push_back(Q2);
            taus.push_back(path);
          } else {
            Hom back = hom_inverse(L, taus[F.pos_[Q2]]);
            c.aut.add(L, hom_compose(L, path, back));
          }
        }
      }
      // sort members by id; keep tau aligned
      std::vector<std::size_t> idx(order.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
      for (std::size_t k = 0; k < idx.size(); ++k) {
        c.members.push_back(order[idx[k]]);
        c.tau.push_back(taus[idx[k]]);
        F.pos_[order[idx[k]]] = static_cast<uint32_t>(k);
      }
      c.aut.finalize();
      F.cls_.push_back(std::move(c));
    }
    F.fill_inverses();
    return F;
  }

  // F|_T: classes cut down to subgroups of T, re-rooted at their least member.
  FusionSystem restrict_to(SubId T) const {
    const PLattice& L = *L_;
    if (!L.le(T, base_)) throw LabError(ErrorKind::InvalidInput, "restriction target not in base");
    FusionSystem R;
    R.L_ = L_;
    R.base_ = T;
    const std::size_t n = L.num_subgroups();
    R.cls_of_.assign(n, -1);
    R.pos_.assign(n, 0);
    R.tau_inv_.assign(n, Hom{});
    for (const FClass& c : cls_) {
      std::vector<std::size_t> keep;
      for (std::size_t j = 0; j < c.members.size(); ++j)
        if (L.le(c.members[j], T)) keep.push_back(j);
      if (keep.empty()) continue;
      FClass d;
      const Hom& t0 = c.tau[keep[0]];
      Hom t0i = hom_inverse(L, t0);
      d.rep = c.members[keep[0]];
      d.aut = AutGroup(L, d.rep);
      for (const Hom& a : c.aut.generators()) d.aut.add(L, hom_compose(L, hom_compose(L, t0i, a), t0));
      int ci = static_cast<int>(R.cls_.size());
      for (std::size_t j : keep) {
        R.cls_of_[c.members[j]] = ci;
        R.pos_[c.members[j]] = static_cast<uint32_t>(d.members.size());
        d.members.push_back(c.members[j]);
        d.tau.push_back(hom_compose(L, t0i, c.tau[j]));
      }
      d.aut.finalize();
      R.cls_.push_back(std::move(d));
    }
    std::sort(R.cls_.begin(), R.cls_.end(), [](const FClass& a, const FClass& b) { return a.rep < b.rep; });
    for (std::size_t i = 0; i < R.cls_.size(); ++i)
      for (SubId m : R.cls_[i].members) R.cls_of_[m] = static_cast<int>(i);
    R.fill_inverses();
    return R;
  }

 private:
  void fill_inverses() {
    for (const FClass& c : cls_)
      for (std::size_t j = 0; j < c.members.size(); ++j) tau_inv_[c.members[j]] = hom_inverse(*L_, c.tau[j]);
  }

  const PLattice* L_ = nullptr;
  SubId base_ = 0;
  std::vector<FClass> cls_;
  std::vector<int> cls_of_;
  std::vector<uint32_t> pos_;
  std::vector<Hom> tau_inv_;
};

// ---------------------------------------------------------------------------

// c_h restricted to {x in P : x^h in Q}, h an ambient element.
inline Hom hom_conj_into(const PLattice& L, SubId P, SubId Q, Elem h) {
  const FiniteGroup& G = L.group();
  Hom r;
  r.map.fill(0xFF);
  uint64_t dm = 0, im = 0;
  const uint64_t qm = L.mask(Q);
  for_each_bit(L.mask(P), [&](unsigned x) {
    int y = L.local(G.conj(L.ambient(x), h));
    if (y < 0 || !(qm & mask_bit(static_cast<unsigned>(y)))) return;
    r.map[x] = static_cast<uint8_t>(y);
    dm |= mask_bit(x);
    im |= mask_bit(static_cast<unsigned>(y));
  });
  r.dom = L.id_of(dm);
  r.img = L.id_of(im);
  return r;
}

// F_T(H) for a set H of ambient elements: generated by c_h on T ∩ T^{h^-1}.
inline FusionSystem fusion_from_conjugators(const PLattice& L, SubId T, const std::vector<Elem>& hs) {
  std::vector<Hom> gens;
  std::unordered_set<Hom, HomHash> seen;
  for (Elem h : hs) {
    Hom c = hom_conj_into(L, T, T, h);
    if (c.dom == 0 || hom_is_identity(L, c)) continue;
    if (seen.insert(c).second) gens.push_back(c);
  }
  return FusionSystem::generate(L, T, gens);
}

inline FusionSystem fusion_from_conjugators(const PLattice& L, SubId T, const Bits& H) {
  return fusion_from_conjugators(L, T, H.members());
}

inline FusionSystem inner_system(const PLattice& L, SubId T) { return FusionSystem::generate(L, T, {}); }

// E^phi for E over R and phi injective on R.
inline FusionSystem conjugate_system(const FusionSystem& E, const Hom& phi) {
  const PLattice& L = E.lattice();
  if (phi.dom != E.base()) throw LabError(ErrorKind::InvalidInput, "conjugating map must be defined on the base");
  Hom pinv = hom_inverse(L, phi);
  std::vector<Hom> gens;
  for (const Hom& g : E.generators()) {
    Hom a = hom_restrict(L, pinv, L.id_of(hom_image_mask(L, phi, L.mask(g.dom))));
    gens.push_back(hom_compose(L, hom_compose(L, a, g), hom_restrict(L, phi, g.img)));
  }
  return FusionSystem::generate(L, phi.img, gens);
}

// Rebuild a system on another lattice sharing the ambient group.
inline FusionSystem transport_system(const FusionSystem& E, const PLattice& to) {
  const PLattice& L = E.lattice();
  SubId nb = to.from_ambient(L.to_ambient(E.base()));
  if (nb == kNoSub) throw LabError(ErrorKind::InvalidInput, "base not a subgroup of the target lattice");
  std::vector<Hom> gens;
  for (const Hom& g : E.generators()) {
    auto t = hom_transport(L, to, g);
    if (!t) throw LabError(ErrorKind::InvalidInput, "transport left the target lattice");
    gens.push_back(*t);
  }
  return FusionSystem::generate(to, nb, gens);
}

// Aut group generators as permutations of the members of P.
inline FiniteGroup aut_as_group(const PLattice& L, SubId P, const std::vector<Hom>& gens) {
  std::vector<unsigned> mem;
  for_each_bit(L.mask(P), [&](unsigned x) { mem.push_back(x); });
  std::vector<int> pos(L.size(), -1);
  for (std::size_t i = 0; i < mem.size(); ++i) pos[mem[i]] = static_cast<int>(i);
  std::vector<Perm> perms;
  for (const Hom& g : gens) {
    Perm pm(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) pm[i] = static_cast<uint8_t>(pos[g.map[mem[i]]]);
    perms.push_back(pm);
  }
  GroupCaps caps;
  caps.order = 1u << 22;
  caps.table = 1024;
  return FiniteGroup::generate(static_cast<int>(mem.size()), perms, caps);
}

inline Hom hom_from_perm(const PLattice& L, SubId P, const uint8_t* images) {
  std::vector<unsigned> mem;
  for_each_bit(L.mask(P), [&](unsigned x) { mem.push_back(x); });
  Hom h;
  h.dom = h.img = P;
  h.map.fill(0xFF);
  for (std::size_t i = 0; i < mem.size(); ++i) h.map[mem[i]] = static_cast<uint8_t>(mem[images[i]]);
  return h;
}

}  // namespace llab
