#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fusion_products.hpp"
#include "locality.hpp"

namespace llab {

// ---------------------------------------------------------------------------
// Components, E(L), F*(L).

struct LocalityStructure {
  std::vector<SubnormalEntry> subnormals;  // entry 0 is the whole locality
  std::vector<Bits> components;
  Bits E, Fstar;
  SubId Op = 0;
  SubId tildeT = 0;
  bool E_order_independent = true;

  const std::vector<Bits>& partial_normals() const { return subnormals[0].normals; }
};

// Quasisimple partial subnormal: K != N(K ∩ S) for proper partial normals N,
// and exactly two partial normals of K contain Z(K).
inline bool is_component(const SubLocality& L, const SubnormalEntry& e) {
  const Bits& K = e.set;
  if (K.count() <= 1) return false;
  SubId ks = L.s_lattice().id_of(L.meet_mask(K));
  if (ks == kNoSub) throw LabError(ErrorKind::Violation, "K ∩ S is not a subgroup");
  Bits KS = L.sub_set(ks);
  for (const Bits& N : e.normals)
    if (N != K && product_sets(L, N, KS) == K) return false;
  Bits Z = Z_of(L, K);
  std::size_t c = 0;
  for (const Bits& N : e.normals)
    if (Z.subset_of(N)) ++c;
  return c == 2;
}

inline Bits product_of(const SubLocality& L, const std::vector<Bits>& parts, bool reverse = false) {
  Bits out(L.size());
  out.set(L.one());
  for (std::size_t i = 0; i < parts.size(); ++i) out = product_sets(L, out, parts[reverse ? parts.size() - 1 - i : i]);
  return out;
}

inline LocalityStructure analyze_structure(const SubLocality& L, std::size_t cap = 4096) {
  LocalityStructure st;
  st.subnormals = enumerate_partial_subnormals(L, L.all(), cap);
  for (const SubnormalEntry& e : st.subnormals)
    if (is_component(L, e)) st.components.push_back(e.set);
  sort_sets(st.components);
  st.E = product_of(L, st.components);
  st.E_order_independent = product_of(L, st.components, true) == st.E;
  st.Op = O_p_of(L, L.all());
  st.Fstar = product_sets(L, st.E, L.sub_set(st.Op));
  st.tildeT = L.s_lattice().id_of(L.meet_mask(st.E));
  if (st.tildeT == kNoSub) throw LabError(ErrorKind::Violation, "E(L) ∩ S is not a subgroup");
  return st;
}

// Components of the partial subnormal H: components of L inside H.
inline std::vector<Bits> components_in(const LocalityStructure& st, const Bits& H) {
  std::vector<Bits> out;
  for (const Bits& K : st.components)
    if (K.subset_of(H)) out.push_back(K);
  return out;
}

// ---------------------------------------------------------------------------
// delta(F).

struct DeltaResult {
  std::vector<char> delta;
  bool valid = true;
  bool from_subcentric = false;
  std::string witness;
};

// F^s when E(F) = 1, else {P : (P O_p(F)) ∩ T~ in E(F)^s}; then validated
// against F^cr ⊆ delta ⊆ F^s and P in delta iff P ∩ T* in delta.
inline DeltaResult compute_delta(const FusionSystem& F, const std::vector<SubId>& fs, SubId Op, SubId tT,
                                 const FusionSystem* EF) {
  const PLattice& L = F.lattice();
  const SubId S = F.base();
  DeltaResult r;
  r.delta.assign(L.num_subgroups(), 0);
  if (tT == L.trivial()) {
    r.from_subcentric = true;
    for (SubId P : fs) r.delta[P] = 1;
  } else {
    if (!EF || EF->base() != tT) throw LabError(ErrorKind::InvalidInput, "E(F) unavailable");
    std::vector<SubId> efs = subcentric_set(*EF);
    for (SubId P : L.subgroups_of(S))
      if (in_list(efs, L.meet(L.join(P, Op), tT))) r.delta[P] = 1;
  }
  std::vector<char> fsv(L.num_subgroups(), 0);
  for (SubId P : fs) fsv[P] = 1;
  SubgroupClasses cls = subgroup_classes(F, false);
  for (SubId P : cls.radical_centric)
    if (!r.delta[P]) {
      r.valid = false;
      r.witness = "radical centric " + mask_str(L, P) + " not in delta";
      return r;
    }
  const SubId Tstar = L.join(tT, Op);
  for (SubId P : L.subgroups_of(S)) {
    if (r.delta[P] && !fsv[P]) {
      r.valid = false;
      r.witness = mask_str(L, P) + " in delta but not subcentric";
      return r;
    }
    if (r.delta[P] != r.delta[L.meet(P, Tstar)]) {
      r.valid = false;
      r.witness = "membership of " + mask_str(L, P) + " differs from its meet with T*";
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Linking and regular localities.

// N_L(P) for P in the frame, P ⊆ S_f and P^f = P.
inline Bits N_L_of(const SubLocality& L, SubId P) {
  const PLattice& Y = L.s_lattice();
  const uint64_t pm = Y.mask(P);
  Bits out(L.size());
  for (uint32_t f = 0; f < L.size(); ++f) {
    if (pm & ~L.S_f(f)) continue;
    uint64_t im = 0;
    for_each_bit(pm, [&](unsigned x) { im |= mask_bit(L.s_conj(x, f)); });
    if (im == pm) out.set(f);
  }
  return out;
}

struct LinkingReport {
  bool ok = false;
  bool saturated = false;
  bool cr_in_delta = false;
  bool char_p = false;
  std::string witness;
};

inline LinkingReport is_linking_locality(const SubLocality& L) {
  LinkingReport r;
  const PLattice& Y = L.s_lattice();
  FusionSystem F = fusion_of_locality(L);
  SaturationReport sat = saturation_report(F);
  r.saturated = sat.saturated;
  if (!r.saturated) r.witness = "not saturated: " + sat.witness;
  r.cr_in_delta = true;
  for (SubId P : subgroup_classes(F, false).radical_centric)
    if (!L.in_delta(P)) {
      r.cr_in_delta = false;
      if (r.witness.empty()) r.witness = "radical centric " + mask_str(Y, P) + " not in Delta";
      break;
    }
  r.char_p = true;
  const FiniteGroup& G = L.host().group();
  for (SubId P = 0; P < Y.num_subgroups(); ++P) {
    if (!L.in_delta(P)) continue;
    Bits N = L.to_ambient(N_L_of(L, P));
    if (!is_characteristic_p(G, N, Y.prime())) {
      r.char_p = false;
      if (r.witness.empty()) r.witness = "N_L(" + mask_str(Y, P) + ") not of characteristic p";
      break;
    }
  }
  r.ok = r.saturated && r.cr_in_delta && r.char_p;
  return r;
}

inline std::optional<FusionSystem> E_system(const SubLocality& L, const LocalityStructure& st) {
  if (st.tildeT == L.s_lattice().trivial()) return std::nullopt;
  return fusion_of_partial_subgroup(L, st.E);
}

inline DeltaResult delta_of_locality(const SubLocality& L, const LocalityStructure& st, const FusionSystem& F) {
  auto EF = E_system(L, st);
  return compute_delta(F, subcentric_set(F), O_p_system(F), st.tildeT, EF ? &*EF : nullptr);
}

struct RegularReport {
  bool ok = false;
  LinkingReport linking;
  bool delta_matches = false;
  std::string witness;
};

inline RegularReport is_regular_locality(const SubLocality& L, const LocalityStructure& st) {
  RegularReport r;
  r.linking = is_linking_locality(L);
  FusionSystem F = fusion_of_locality(L);
  DeltaResult d = delta_of_locality(L, st, F);
  r.delta_matches = d.valid && d.delta == L.delta();
  r.ok = r.linking.ok && r.delta_matches;
  if (!r.linking.ok) r.witness = r.linking.witness;
  else if (!d.valid) r.witness = "delta validation: " + d.witness;
  else if (!r.delta_matches) r.witness = "Delta differs from delta(F)";
  return r;
}

// ---------------------------------------------------------------------------
// Bootstrap: G -> S -> F -> F^s -> L_s -> components -> delta(F) -> L.

struct FusionData {
  FusionSystem F;
  SubgroupClasses classes;
};

struct BuildOptions {
  std::size_t locality_cap = 2000;
  std::size_t subnormal_cap = 4096;
  // Optional cache hooks for F_S(G) and its subgroup classes.
  std::function<std::optional<FusionData>(const PLattice&)> load;
  std::function<void(const PLattice&, const FusionData&)> store;
};

struct RegularBuild {
  const FiniteGroup* G = nullptr;
  int p = 2;
  std::unique_ptr<PLattice> LS;
  std::unique_ptr<FusionSystem> F;
  SubgroupClasses classes;
  DeltaResult delta;
  std::unique_ptr<PartialHost> host_s;  // provisional, over F^s
  std::unique_ptr<SubLocality> L_s;
  std::unique_ptr<LocalityStructure> st_s;
  std::unique_ptr<PartialHost> host;
  std::unique_ptr<SubLocality> L;
  std::unique_ptr<LocalityStructure> st;
  std::optional<FusionSystem> EF;  // E(F) over T~, absent when T~ = 1
  std::vector<SubId> EFs;          // E(F)^s
  Bits Gstar;                      // N_L(T~)
  bool provisional_reused = false;

  const FusionSystem& fusion() const { return *F; }
  const PLattice& lattice() const { return *LS; }
  const SubLocality& loc() const { return *L; }
  const LocalityStructure& structure() const { return *st; }
  bool constrained() const { return classes.constrained; }
  Bits amb(const Bits& X) const { return L->to_ambient(X); }
};

inline std::unique_ptr<RegularBuild> build_regular(const FiniteGroup& G, int p, const BuildOptions& opt = {},
                                                   const Bits* S_explicit = nullptr) {
  auto R = std::make_unique<RegularBuild>();
  R->G = &G;
  R->p = p;
  Bits S = S_explicit ? *S_explicit : sylow(G, p);
  if (S.count() != p_part(G.order(), p)) throw LabError(ErrorKind::InvalidInput, "given subgroup is not Sylow");
  R->LS = std::make_unique<PLattice>(G, S, p);
  const PLattice& LS = *R->LS;
  std::optional<FusionData> fd;
  if (opt.load) fd = opt.load(LS);
  if (!fd) {
    fd = FusionData{fusion_from_conjugators(LS, LS.top(), whole(G)), {}};
    fd->classes = subgroup_classes(fd->F, true);
    if (opt.store) opt.store(LS, *fd);
  }
  R->F = std::make_unique<FusionSystem>(std::move(fd->F));
  R->classes = std::move(fd->classes);
  std::vector<char> fs = delta_from_list(LS, R->classes.subcentric);
  if (auto v = delta_closure_violation(G, LS, fs)) throw LabError(ErrorKind::Violation, "F^s: " + *v);
  R->host_s = std::make_unique<PartialHost>(G, LS, fs, opt.locality_cap);
  R->L_s = std::make_unique<SubLocality>(*R->host_s);
  R->st_s = std::make_unique<LocalityStructure>(analyze_structure(*R->L_s, opt.subnormal_cap));
  std::optional<FusionSystem> EFs;
  if (R->st_s->tildeT != LS.trivial()) EFs = fusion_of_partial_subgroup(*R->L_s, R->st_s->E);
  R->delta = compute_delta(*R->F, R->classes.subcentric, R->classes.O_p, R->st_s->tildeT, EFs ? &*EFs : nullptr);
  if (!R->delta.valid) throw LabError(ErrorKind::Violation, "delta(F) validation failed: " + R->delta.witness);
  if (R->delta.delta == fs) {
    R->provisional_reused = true;
    R->host = std::move(R->host_s);
    R->L = std::move(R->L_s);
    R->st = std::move(R->st_s);
  } else {
    if (auto v = delta_closure_violation(G, LS, R->delta.delta)) throw LabError(ErrorKind::Violation, "delta(F): " + *v);
    R->host = std::make_unique<PartialHost>(G, LS, R->delta.delta, opt.locality_cap);
    R->L = std::make_unique<SubLocality>(*R->host);
    R->st = std::make_unique<LocalityStructure>(analyze_structure(*R->L, opt.subnormal_cap));
  }
  if (R->st->tildeT != LS.trivial()) {
    R->EF = fusion_of_partial_subgroup(*R->L, R->st->E);
    R->EFs = subcentric_set(*R->EF);
  }
  R->Gstar = N_L(*R->L, R->L->sub_set(R->st->tildeT));
  return R;
}

// ---------------------------------------------------------------------------
// The group G = N_L(T~) and its action.

inline std::vector<CheckItem> verify_global_action(const RegularBuild& R) {
  const SubLocality& L = *R.L;
  std::vector<CheckItem> out;
  const Bits tt = L.sub_set(R.st->tildeT);
  out.push_back({"T~ in Delta", L.in_delta(R.st->tildeT), mask_str(*R.LS, R.st->tildeT)});
  out.push_back({"G total", is_subgroup(L, R.Gstar), "|G|=" + std::to_string(R.Gstar.count())});
  const auto gm = R.Gstar.members();
  bool defined = true;
  for (uint32_t g : gm)
    for (uint32_t x = 0; x < L.size() && defined; ++x)
      if (L.conj(x, g) == kUndef) defined = false;
  out.push_back({"L ⊆ D(g)", defined, ""});
  bool law = defined;
  if (law)
    for (uint32_t f : gm)
      for (uint32_t g : gm) {
        uint32_t fg = L.pair_product(f, g);
        for (uint32_t x = 0; x < L.size() && law; ++x)
          if (L.conj(L.conj(x, f), g) != L.conj(x, fg)) law = false;
      }
  out.push_back({"action law", law, ""});
  // automorphism on generators; the action law extends it to G
  bool aut = defined;
  const FiniteGroup& G = *R.G;
  if (aut)
    for (Elem ga : generators_of(G, L.to_ambient(R.Gstar))) {
      uint32_t g = L.from_ambient(ga);
      for (uint32_t a = 0; a < L.size() && aut; ++a)
        for (uint32_t b = 0; b < L.size(); ++b) {
          bool d1 = L.pair_in_domain(a, b);
          uint32_t ag = L.conj(a, g), bg = L.conj(b, g);
          if (d1 != L.pair_in_domain(ag, bg) || (d1 && L.conj(L.pair_product(a, b), g) != L.pair_product(ag, bg))) {
            aut = false;
            break;
          }
        }
    }
  out.push_back({"c_g automorphism", aut, ""});
  return out;
}

// ---------------------------------------------------------------------------
// Context for a partial subnormal H.

struct HContext {
  Bits H;
  SubId T = 0;
  std::unique_ptr<FusionSystem> E;
  Bits NGH;        // N_G(H)
  Bits bN;         // E(L) N_G(H)
  SubId NSH = 0;   // N_S(H)
  SubId CSH = 0;   // C_S(H)
  Bits CLH;        // C_L(H)
  Bits S0amb;
  std::unique_ptr<PLattice> LS0;
};

inline Bits N_G_of(const RegularBuild& R, const Bits& X) {
  const SubLocality& L = *R.L;
  Bits out(L.size());
  auto xm = X.members();
  R.Gstar.for_each([&](std::size_t g) {
    Bits img(L.size());
    for (uint32_t x : xm) img.set(L.conj(x, static_cast<uint32_t>(g)));
    if (img == X) out.set(g);
  });
  return out;
}

inline Bits conj_set(const SubLocality& L, const Bits& X, uint32_t g) {
  Bits out(L.size());
  X.for_each([&](std::size_t x) {
    uint32_t y = L.conj(static_cast<uint32_t>(x), g);
    if (y == kUndef) throw LabError(ErrorKind::Violation, "conjugation undefined");
    out.set(y);
  });
  return out;
}

// S0: least canonical Sylow of N_G(H) containing `contain` (default T).
inline std::unique_ptr<HContext> make_context(const RegularBuild& R, const Bits& H, const Bits* contain_amb = nullptr) {
  const SubLocality& L = *R.L;
  const PLattice& LS = *R.LS;
  auto c = std::make_unique<HContext>();
  c->H = H;
  c->T = LS.id_of(L.meet_mask(H));
  c->E = std::make_unique<FusionSystem>(fusion_of_partial_subgroup(L, H));
  c->NGH = N_G_of(R, H);
  c->bN = product_sets(L, R.st->E, c->NGH);
  c->NSH = LS.id_of(L.meet_mask(c->NGH));
  c->CLH = C_L(L, H);
  c->CSH = LS.id_of(L.meet_mask(c->CLH));
  if (c->NSH == kNoSub || c->CSH == kNoSub) throw LabError(ErrorKind::Violation, "N_S(H) or C_S(H) not a subgroup");
  Bits ngh = L.to_ambient(c->NGH);
  Bits base = contain_amb ? *contain_amb : LS.to_ambient(c->T);
  c->S0amb = sylow_containing(*R.G, R.p, ngh, base);
  c->LS0 = std::make_unique<PLattice>(*R.G, c->S0amb, R.p);
  return c;
}

inline FusionSystem normalizer_subsystem(const RegularBuild& R, const HContext& c) {
  return fusion_of_partial_subgroup(*R.L, c.bN);
}
inline SubId centralizer_in_S(const HContext& c) { return c.CSH; }
inline FusionSystem centralizer_subsystem(const RegularBuild& R, const HContext& c) {
  return fusion_of_partial_subgroup(*R.L, c.CLH);
}

// Delta_0 = {P <= S0 : P ∩ T~ in E(F)^s}.
inline std::vector<char> delta0(const RegularBuild& R, const PLattice& Y) {
  std::vector<char> d(Y.num_subgroups(), 0);
  const SubId tt = R.st->tildeT;
  for (SubId P = 0; P < Y.num_subgroups(); ++P) {
    if (tt == R.LS->trivial()) {
      d[P] = 1;
      continue;
    }
    Bits m = Y.to_ambient(P) & R.LS->to_ambient(tt);
    SubId q = R.LS->from_ambient(m);
    d[P] = q != kNoSub && in_list(R.EFs, q);
  }
  return d;
}

inline bool is_subnormal_in_group(const FiniteGroup& G, const Bits& X, const Bits& K) {
  Bits cur = K;
  while (true) {
    if (!X.subset_of(cur)) return false;
    Bits nxt = normal_closure(G, X, cur);
    if (nxt == cur) return cur == X;
    cur = nxt;
  }
}

// ---------------------------------------------------------------------------
// Main theorem A, items (a)-(f).

struct TheoremAResult {
  std::vector<CheckItem> items;
  bool ok() const {
    for (const auto& i : items)
      if (!i.ok) return false;
    return true;
  }
};

inline TheoremAResult verify_main_theorem_A(const RegularBuild& R, const HContext& c, const CheckBudget& budget = {}) {
  TheoremAResult res;
  const SubLocality& L = *R.L;
  const PartialHost& host = L.host();
  const PLattice& Y = *c.LS0;
  auto push = [&](std::string n, bool ok, std::string d = "") { res.items.push_back({std::move(n), ok, std::move(d)}); };

  // (a)
  Bits bn_host = L.to_host(c.bN);
  SubLocality V0(host, bn_host, Y, delta0(R, Y));
  AxiomReport ax0 = check_locality(V0, budget);
  LinkingReport lk0 = is_linking_locality(V0);
  push("a: (bN, Delta0, S0) locality", ax0.ok, ax0.ok ? "" : ax0.axiom + ": " + ax0.witness);
  push("a: (bN, Delta0, S0) linking", lk0.ok, lk0.witness);
  FusionSystem F0 = fusion_of_locality(V0);
  LocalityStructure st0 = analyze_structure(V0);
  DeltaResult d0 = delta_of_locality(V0, st0, F0);
  push("a: delta(F0) validated", d0.valid, d0.witness);
  {
    // anchor: delta(F0) = {P : P O_p(bN) in Delta0}
    std::vector<char> anchor(Y.num_subgroups(), 0);
    for (SubId P = 0; P < Y.num_subgroups(); ++P) anchor[P] = V0.in_delta(Y.join(P, st0.Op));
    push("a: delta(F0) = {P : P O_p(bN) in Delta0}", d0.delta == anchor);
  }
  SubLocality V1(host, bn_host, Y, d0.delta);
  AxiomReport ax1 = check_locality(V1, budget);
  RegularReport rg1 = is_regular_locality(V1, st0);
  push("a: (bN, delta(F0), S0) locality", ax1.ok, ax1.ok ? "" : ax1.axiom + ": " + ax1.witness);
  push("a: (bN, delta(F0), S0) regular", rg1.ok, rg1.witness);

  // (b)
  Bits H0 = V0.from_host(L.to_host(c.H));
  push("b: H partial normal in bN", c.H.subset_of(c.bN) && is_partial_normal(V0, H0, V0.all()));
  Bits T0amb = Y.to_ambient(Y.id_of(V0.meet_mask(H0)));
  push("b: T = S0 ∩ H", T0amb == R.LS->to_ambient(c.T));
  FusionSystem E0 = fusion_of_partial_subgroup(V0, H0);
  push("b: E normal in F0", is_normal_subsystem(F0, E0));

  // (c)
  std::vector<Bits> cl, cb;
  for (const Bits& K : R.st->components) cl.push_back(L.to_host(K));
  for (const Bits& K : st0.components) cb.push_back(V0.to_host(K));
  sort_sets(cl);
  sort_sets(cb);
  push("c: Comp(bN) = Comp(L)", cl == cb, std::to_string(cb.size()) + " components");
  push("c: E(bN) = E(L)", V0.to_host(st0.E) == L.to_host(R.st->E));
  push("c: T~ = E(L) ∩ S0", L.to_ambient(R.st->E) .count() > 0 &&
                               (L.to_ambient(R.st->E) & c.S0amb) == R.LS->to_ambient(R.st->tildeT));

  // (d)
  Bits Sbn = R.LS->ambient_set() & L.to_ambient(c.bN);
  push("d: S ∩ bN = N_S(H)", Sbn == R.LS->to_ambient(c.NSH));

  // (e) pool: partial subnormals and groups N_L(P) in which H is partial normal
  std::size_t pool = 0;
  bool e_ok = true;
  for (const SubnormalEntry& e : R.st->subnormals) {
    if (!c.H.subset_of(e.set) || !is_partial_normal(L, c.H, e.set)) continue;
    ++pool;
    if (!e.set.subset_of(c.bN)) e_ok = false;
  }
  for (SubId P = 0; P < R.LS->num_subgroups(); ++P) {
    if (!L.in_delta(P)) continue;
    Bits X = N_L_of(L, P);
    if (!c.H.subset_of(X) || !is_partial_normal(L, c.H, X)) continue;
    ++pool;
    if (!X.subset_of(c.bN)) e_ok = false;
  }
  push("e: X ⊆ bN over pool", e_ok, std::to_string(pool) + " overgroups");

  // (f)
  Bits CLT = C_L(L, L.sub_set(c.T));
  push("f: C_L(T) ⊆ bN", CLT.subset_of(c.bN));
  push("f: C_L(H) = C_bN(H)", c.CLH.subset_of(c.bN));
  Bits C0 = V0.from_host(L.to_host(c.CLH));
  push("f: C_L(H) partial normal in bN", is_partial_normal(V0, C0, V0.all()));
  return res;
}

// ---------------------------------------------------------------------------
// Conjugates of E.

struct ConjugateEntry {
  Bits Hg;
  SubId Tg = 0;
  uint32_t g = 0;  // view index in G
  std::unique_ptr<FusionSystem> Eg;
};

struct ConjugateFamily {
  std::vector<ConjugateEntry> via_G;  // distinct H^g
  std::vector<std::string> via_F;     // digests of E^phi, phi in Hom_F(T,S)
  bool agree = false;                 // both enumerations give the same set
  bool conj_formula = true;           // E^{c_g|T} = F_{T^g}(H^g)
};

inline ConjugateFamily conjugate_family(const RegularBuild& R, const HContext& c) {
  const SubLocality& L = *R.L;
  const PLattice& LS = *R.LS;
  ConjugateFamily fam;
  std::unordered_map<Bits, std::size_t, BitsHash> seen;
  const uint64_t tm = LS.mask(c.T);
  R.Gstar.for_each([&](std::size_t gi) {
    uint32_t g = static_cast<uint32_t>(gi);
    if (tm & ~L.S_f(g)) return;
    Bits Hg = conj_set(L, c.H, g);
    if (seen.count(Hg)) return;
    seen.emplace(Hg, fam.via_G.size());
    ConjugateEntry e;
    e.Hg = Hg;
    e.g = g;
    e.Tg = LS.id_of(L.meet_mask(Hg));
    e.Eg = std::make_unique<FusionSystem>(fusion_of_partial_subgroup(L, Hg));
    Hom phi = hom_conj_ambient(LS, c.T, L.ambient(g));
    if (!(conjugate_system(*c.E, phi) == *e.Eg)) fam.conj_formula = false;
    fam.via_G.push_back(std::move(e));
  });
  std::set<std::string> a, b;
  for (const Hom& phi : R.F->homs(c.T, LS.top())) a.insert(conjugate_system(*c.E, phi).digest());
  for (const auto& e : fam.via_G) b.insert(e.Eg->digest());
  fam.via_F.assign(a.begin(), a.end());
  fam.agree = a == b && b.size() == fam.via_G.size();
  return fam;
}

// |Aut_S(T) ∩ Aut(E)| and the p-part of |Aut_F(T) ∩ Aut(E)|.
inline bool fully_automized(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  const SubId T = E.base();
  AutOfSystem A(E);
  std::size_t nf = 0;
  for (const Hom& a : F.aut(T))
    if (A.contains(a)) ++nf;
  std::set<Hom> ns;
  for_each_bit(L.mask(L.normalizer(T, F.base())), [&](unsigned s) {
    Hom h = hom_conj_local(L, T, s);
    if (A.contains(h)) ns.insert(h);
  });
  return ns.size() == p_part(nf, L.prime());
}

inline bool fully_centralized_subgroup(const FusionSystem& F, SubId T) {
  const PLattice& L = F.lattice();
  unsigned c = L.order(L.centralizer(T, F.base())), best = 0;
  for (SubId Q : F.conjugates(T)) best = std::max(best, L.order(L.centralizer(Q, F.base())));
  return c == best;
}

struct EquivRow {
  std::size_t index = 0;
  bool i = false, ii = false, iii = false;
  bool consistent() const { return i == ii && ii == iii; }
};

// Fully normalized equivalences over E^F.
inline std::vector<EquivRow> fully_normalized_rows(const RegularBuild& R, const ConjugateFamily& fam, bool* nse_eq = nullptr) {
  const SubLocality& L = *R.L;
  const PLattice& LS = *R.LS;
  const FusionSystem& F = *R.F;
  std::vector<unsigned> ns;
  unsigned best = 0;
  bool eq = true;
  for (const auto& e : fam.via_G) {
    SubId n = N_S_of(F, *e.Eg);
    Bits ngh = N_G_of(R, e.Hg);
    if (LS.id_of(L.meet_mask(ngh)) != n) eq = false;
    ns.push_back(LS.order(n));
    best = std::max(best, LS.order(n));
  }
  if (nse_eq) *nse_eq = eq;
  std::vector<EquivRow> rows;
  for (std::size_t k = 0; k < fam.via_G.size(); ++k) {
    const auto& e = fam.via_G[k];
    EquivRow r;
    r.index = k;
    r.i = ns[k] == best;
    Bits ngh = N_G_of(R, e.Hg);
    r.ii = static_cast<std::size_t>(LS.order(LS.id_of(L.meet_mask(ngh)))) == p_part(ngh.count(), R.p);
    r.iii = fully_automized(F, *e.Eg) && fully_centralized_subgroup(F, e.Tg);
    rows.push_back(r);
  }
  return rows;
}

// p-subgroups of C strictly containing P, if any (P a p-subgroup inside C).
inline bool is_maximal_p_subgroup(const SubLocality& L, const Bits& C, const Bits& P, int p) {
  const FiniteGroup& G = L.host().group();
  Bits Pa = L.to_ambient(P);
  for (uint32_t x : C.members()) {
    if (P.test(x)) continue;
    Elem xa = L.ambient(x);
    if (!is_p_power(G.elem_order(xa), p)) continue;
    if (conjugate_set(G, Pa, xa) != Pa) continue;
    Bits add(G.order());
    add.set(xa);
    Bits Q = join(G, Pa, add);
    if (!is_p_power(Q.count(), p)) continue;
    Bits Qv(L.size());
    bool inside = true;
    Q.for_each([&](std::size_t q) {
      uint32_t v = L.from_ambient(static_cast<Elem>(q));
      if (v == kUndef || !C.test(v)) inside = false;
      else Qv.set(v);
    });
    if (inside && is_subgroup(L, Qv)) return false;
  }
  return true;
}

// Fully centralized equivalences over E^F. C_S of each conjugate is C_S(H^g).
inline std::vector<EquivRow> fully_centralized_rows(const RegularBuild& R, const ConjugateFamily& fam) {
  const SubLocality& L = *R.L;
  const PLattice& LS = *R.LS;
  std::vector<unsigned> cs;
  unsigned best = 0;
  for (const auto& e : fam.via_G) {
    unsigned o = LS.order(LS.id_of(L.meet_mask(C_L(L, e.Hg))));
    cs.push_back(o);
    best = std::max(best, o);
  }
  std::vector<EquivRow> rows;
  for (std::size_t k = 0; k < fam.via_G.size(); ++k) {
    const auto& e = fam.via_G[k];
    EquivRow r;
    r.index = k;
    r.i = cs[k] == best;
    Bits clh = C_L(L, e.Hg);
    SubId csh = LS.id_of(L.meet_mask(clh));
    Bits ngh = N_G_of(R, e.Hg);
    Bits nsh_amb = LS.to_ambient(LS.id_of(L.meet_mask(ngh)));
    Bits S0 = sylow_containing(*R.G, R.p, L.to_ambient(ngh), nsh_amb);
    Bits cs0 = S0 & L.to_ambient(clh);
    r.ii = cs0 == LS.to_ambient(csh);
    r.iii = is_maximal_p_subgroup(L, clh, L.sub_set(csh), R.p);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Unique maximal member of {R <= S : E ⊆ C_F(R)}, by exhaustion.

struct CentralizerSearch {
  std::vector<SubId> members;
  std::vector<SubId> maximal;
};

inline CentralizerSearch centralizer_candidates(const FusionSystem& F, const FusionSystem& E) {
  const PLattice& L = F.lattice();
  CentralizerSearch cs;
  for (SubId Rg : L.subgroups_of(F.base())) {
    if (!L.le(E.base(), L.centralizer(Rg, F.base()))) continue;
    if (centralizes(F, E, Rg)) cs.members.push_back(Rg);
  }
  for (SubId a : cs.members) {
    bool top = true;
    for (SubId b : cs.members)
      if (a != b && L.le(a, b)) {
        top = false;
        break;
      }
    if (top) cs.maximal.push_back(a);
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Normalizer theorems.

using Pool = std::vector<const FusionSystem*>;

struct SaturationCache {
  std::map<const FusionSystem*, bool> memo;
  bool saturated(const FusionSystem* F) {
    auto it = memo.find(F);
    if (it != memo.end()) return it->second;
    bool r = is_saturated(*F);
    memo.emplace(F, r);
    return r;
  }
};

inline FusionSystem join_systems(const PLattice& L, SubId base, const std::vector<const FusionSystem*>& parts) {
  std::vector<Hom> gens;
  for (const FusionSystem* P : parts)
    for (const Hom& h : P->generators()) gens.push_back(h);
  return FusionSystem::generate(L, base, gens);
}

inline bool e_fully_normalized(const RegularBuild& R, const HContext& c) {
  const PLattice& LS = *R.LS;
  return static_cast<std::size_t>(LS.order(c.NSH)) == p_part(c.NGH.count(), R.p);
}

inline std::vector<CheckItem> verify_normalizer_theorems(const RegularBuild& R, const HContext& c, const Pool& pool,
                                                         SaturationCache& sc) {
  std::vector<CheckItem> out;
  auto push = [&](std::string n, bool ok, std::string d = "") { out.push_back({std::move(n), ok, std::move(d)}); };
  auto push_eq = [&](std::string n, const FusionSystem& A, const FusionSystem& B) {
    std::string d = fusion_diff(A, B);
    out.push_back({std::move(n), d.empty(), std::move(d)});
  };
  const FusionSystem& F = *R.F;
  const PLattice& LS = *R.LS;
  const FusionSystem& E = *c.E;
  const SubLocality& L = *R.L;
  FusionSystem NFE = normalizer_subsystem(R, c);
  SubId NSE = N_S_of(F, E);
  push("N_S(E) = N_S(H)", NSE == c.NSH);
  FusionSystem EN = product_ER(F, E, NSE);
  FusionSystem NTE = N_F_T_E(F, E);
  push_eq("a: N_F(E) = <E N_S(E), N_F(T,E)>", NFE, join_systems(LS, NSE, {&EN, &NTE}));
  push("b: E ⊆ N_F(E), N_F(E)-invariant", E.is_subsystem_of(NFE) && is_invariant(NFE, E));
  std::size_t tested = 0;
  bool cok = true;
  for (const FusionSystem* D : pool) {
    if (!E.is_subsystem_of(*D) || !sc.saturated(D)) continue;
    if (!is_normal_subsystem(*D, E)) continue;
    ++tested;
    if (!D->is_subsystem_of(NFE)) cok = false;
  }
  push("c: saturated D with E normal lie in N_F(E)", cok, std::to_string(tested) + " pooled systems");
  const bool fn = e_fully_normalized(R, c);
  if (fn) {
    bool sat = is_saturated(NFE);
    bool nrm = is_normal_subsystem(NFE, E);
    // E(N_F(E)) from the components of bN with frame N_S(H)
    PLattice Y(*R.G, LS.to_ambient(c.NSH), R.p);
    SubLocality V(L.host(), L.to_host(c.bN), Y, delta0(R, Y));
    LocalityStructure st = analyze_structure(V);
    Bits Eb = L.from_host(V.to_host(st.E));
    bool eq = fusion_of_partial_subgroup(L, Eb) == fusion_of_partial_subgroup(L, R.st->E);
    push("d: N_F(E) saturated, E normal, E(N_F(E)) = E(F)", sat && nrm && eq);
  }
  push_eq("e: N_{N_F(E)}(T) = N_F(T,E)", normalizer_system(NFE, c.T), NTE);
  push_eq("e: C_{N_F(E)}(T) = C_F(T)", centralizer_system(NFE, c.T), centralizer_system(F, c.T));
  FusionSystem model = fusion_from_conjugators(LS, c.NSH, L.to_ambient(c.NGH));
  if (R.constrained()) push_eq("f: N_F(E) = F_{N_S(H)}(N_G(H))", NFE, model);
  // generation theorem
  FusionSystem NFT = normalizer_system(F, R.st->tildeT);
  push("gen: N_F(T~) constrained", is_constrained(NFT));
  push_eq("gen: N_F(T~) = F_S(G)", NFT, fusion_from_conjugators(LS, LS.top(), L.to_ambient(R.Gstar)));
  Bits EH = product_of(L, components_in(*R.st, c.H));
  SubId T0 = LS.id_of(L.meet_mask(EH));
  Bits NHT = c.H & R.Gstar;
  push("gen: N_H(T~) subnormal in G", is_subnormal_in_group(*R.G, L.to_ambient(NHT), L.to_ambient(R.Gstar)));
  push_eq("gen: F_T(N_H(T~)) = N_E(T0)", fusion_of_partial_subgroup(L, NHT), normalizer_system(E, T0));
  push("gen: N_S(N_H(T~)) = N_S(E)", LS.id_of(L.meet_mask(N_G_of(R, NHT))) == NSE);
  FusionSystem EFN = R.EF ? product_ER(F, *R.EF, NSE) : inner_system(LS, NSE);
  push_eq("gen: N_F(E) = <E(F) N_S(E), F(N_G(H))>", NFE, join_systems(LS, NSE, {&EFN, &model}));
  return out;
}

// ---------------------------------------------------------------------------
// Centralizer theorems.

// <O^p(Aut_{C_F(T)}(P)) : P <= C>_C
inline FusionSystem op_generated(const FusionSystem& CFT, SubId C) {
  const PLattice& L = CFT.lattice();
  std::vector<Hom> gens;
  for (SubId P : L.subgroups_of(C))
    for (const Hom& a : O_upper_p_aut(CFT, P))
      if (!hom_is_identity(L, a)) gens.push_back(a);
  return FusionSystem::generate(L, C, gens);
}

inline bool e_fully_centralized(const RegularBuild& R, const ConjugateFamily& fam, const HContext& c) {
  const PLattice& LS = *R.LS;
  unsigned best = 0;
  for (const auto& e : fam.via_G) best = std::max(best, LS.order(LS.id_of(R.L->meet_mask(C_L(*R.L, e.Hg)))));
  return LS.order(c.CSH) == best;
}

inline std::vector<CheckItem> verify_centralizer_theorems(const RegularBuild& R, const HContext& c, const Pool& pool,
                                                          SaturationCache& sc, const ConjugateFamily& fam) {
  std::vector<CheckItem> out;
  auto push = [&](std::string n, bool ok, std::string d = "") { out.push_back({std::move(n), ok, std::move(d)}); };
  auto push_eq = [&](std::string n, const FusionSystem& A, const FusionSystem& B) {
    std::string d = fusion_diff(A, B);
    out.push_back({std::move(n), d.empty(), std::move(d)});
  };
  const FusionSystem& F = *R.F;
  const PLattice& LS = *R.LS;
  const FusionSystem& E = *c.E;
  const SubLocality& L = *R.L;
  FusionSystem NFE = normalizer_subsystem(R, c);
  FusionSystem CFE = centralizer_subsystem(R, c);
  push("C_F(E) over C_S(H)", CFE.base() == c.CSH);
  push("a: C_F(E) ⊆ N_F(E)", CFE.is_subsystem_of(NFE));
  push("a: C_F(E) commutes with E", commutes(F, E, CFE));
  std::size_t tested = 0;
  bool aok = true;
  for (const FusionSystem* D : pool) {
    if (!sc.saturated(D) || !commutes(F, E, *D)) continue;
    ++tested;
    if (!D->is_subsystem_of(CFE)) aok = false;
  }
  push("a: saturated commuting D lie in C_F(E)", aok, std::to_string(tested) + " pooled systems");
  push("b: C_F(E) weakly N_F(E)-invariant", is_weakly_invariant(NFE, CFE));
  const bool fc = e_fully_centralized(R, fam, c);
  if (e_fully_normalized(R, c)) push("b: fully normalized => fully centralized, C_F(E) normal in N_F(E)",
                                     fc && is_normal_subsystem(NFE, CFE));
  FusionSystem CFT = centralizer_system(F, c.T);
  if (fc) {
    push("c: C_F(E) saturated", is_saturated(CFE));
    push("c: foc(C_F(T)) <= C_S(E)", LS.le(focal_subgroup(CFT), c.CSH));
    push_eq("c: C_F(E) = <O^p(Aut_{C_F(T)}(P))>", CFE, op_generated(CFT, c.CSH));
  }
  if (is_normal_subsystem(F, E)) {
    bool ok = LS.le(hyperfocal_subgroup(CFT), c.CSH) && CFE == p_power_index_subsystem(CFT, c.CSH);
    push("normal E: C_F(E) = C_F(T)_{C_S(E)}", ok);
  }
  if (!fc) {
    // transport along c_g|_{T C_S(E)} to a fully centralized conjugate
    const SubId TC = LS.join(c.T, c.CSH);
    const uint64_t tcm = LS.mask(TC);
    unsigned best = 0;
    for (const auto& e : fam.via_G) best = std::max(best, LS.order(LS.id_of(L.meet_mask(C_L(L, e.Hg)))));
    bool found = false, ok = false;
    R.Gstar.for_each([&](std::size_t gi) {
      if (found) return;
      uint32_t g = static_cast<uint32_t>(gi);
      if (tcm & ~L.S_f(g)) return;
      Bits Hg = conj_set(L, c.H, g);
      Bits clg = C_L(L, Hg);
      SubId csg = LS.id_of(L.meet_mask(clg));
      if (LS.order(csg) != best) return;
      found = true;
      FusionSystem CFEg = fusion_of_partial_subgroup(L, clg);
      Hom alpha = hom_conj_ambient(LS, TC, L.ambient(g));
      ok = true;
      for (SubId P : LS.subgroups_of(c.CSH)) {
        Hom aP = hom_restrict(LS, alpha, P);
        for (const Hom& phi : F.homs(P, c.CSH)) {
          Hom back = hom_compose(LS, hom_compose(LS, hom_inverse(LS, aP), phi), hom_restrict(LS, alpha, phi.img));
          if (CFE.contains(phi) != CFEg.contains(back)) ok = false;
        }
      }
    });
    if (found) push("transport to fully centralized conjugate", ok);
  }
  return out;
}

}  // namespace llab
