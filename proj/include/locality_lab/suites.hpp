#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "group_io.hpp"
#include "regular.hpp"

namespace llab {

// One verified statement with its outcome.
struct CheckRecord {
  std::string id;
  std::string anchor;
  bool ok = true;
  bool skipped = false;
  std::string skip_reason;
  std::vector<std::string> notes;
  std::vector<std::string> witness;
  long long time_ms = 0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"group",      "fusion",      "locality",   "theoremA", "normalizer",
                                              "centralizer", "conjugates", "er",         "bijection", "fuzz"};
  return names;
}

// Suites that concern the whole instance rather than one subnormal H.
inline bool is_instance_suite(const std::string& s) {
  return s == "group" || s == "fusion" || s == "locality" || s == "bijection" || s == "fuzz";
}

struct SuiteOptions {
  CheckBudget axiom_budget{400000, 3, 300, 6, 1};
  std::size_t fuzz_mutants = 200;
  std::size_t fuzz_max_size = 128;
  uint64_t fuzz_seed = 0x10ca1;
  std::size_t er_max_r = 64;
  std::size_t cs_max_order = 32;
};

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

// ---------------------------------------------------------------------------
// Naming helpers for witnesses.

inline std::string group_set_name(const FiniteGroup& G, const Bits& X) {
  std::string s = "<";
  bool first = true;
  for (Elem g : generators_of(G, X)) {
    if (!first) s += ", ";
    s += G.cycles(g);
    first = false;
  }
  return s + "> order " + std::to_string(X.count());
}

// Greedy generating set of a partial subgroup, in index order.
inline std::vector<uint32_t> partial_generators(const LocalityView& L, const Bits& H) {
  std::vector<uint32_t> gens;
  Bits cur(L.size());
  cur.set(L.one());
  for (uint32_t x : H.members()) {
    if (cur.test(x)) continue;
    gens.push_back(x);
    Bits seed(L.size());
    for (uint32_t g : gens) seed.set(g);
    cur = partial_closure(L, seed);
  }
  return gens;
}

inline std::string partial_set_name(const SubLocality& L, const Bits& H) {
  std::string s = "<";
  bool first = true;
  for (uint32_t g : partial_generators(L, H)) {
    if (!first) s += ", ";
    s += L.name(g);
    first = false;
  }
  return s + "> order " + std::to_string(H.count());
}

// Records from a theorem-item list: "x: text" becomes <prefix>.x.<k>.
inline std::vector<CheckRecord> records_from_items(const std::string& prefix, const std::string& anchor,
                                                   const std::vector<CheckItem>& items, long long ms,
                                                   const std::string& subject) {
  std::vector<CheckRecord> out;
  std::map<std::string, int> count;
  for (const CheckItem& it : items) {
    std::string part = "0", text = it.name;
    if (auto c = it.name.find(": "); c != std::string::npos && c <= 4) {
      part = it.name.substr(0, c);
      text = it.name.substr(c + 2);
    }
    CheckRecord r;
    r.id = prefix + "." + part + "." + std::to_string(++count[part]);
    r.anchor = part == "0" ? anchor : anchor + " (" + part + ")";
    r.ok = it.ok;
    r.notes.push_back(text);
    if (!it.ok) r.witness.push_back(it.detail.empty() ? "subject " + subject : it.detail);
    else if (!it.detail.empty()) r.notes.push_back(it.detail);
    r.time_ms = out.empty() ? ms : 0;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group lemmas over (G, H subnormal in G, p).

inline std::vector<CheckRecord> suite_group(const FiniteGroup& G, int p) {
  Stopwatch sw;
  std::vector<CheckRecord> out;
  const Bits W = whole(G);
  const std::vector<Bits> subn = subnormal_subgroups(G);
  const Bits Op = O_p(G, W, p);
  const bool charp = is_characteristic_p(G, W, p);
  auto rec = [&](std::string id, std::string anchor) {
    CheckRecord r;
    r.id = std::move(id);
    r.anchor = std::move(anchor);
    return r;
  };

  CheckRecord a = rec("group.op-normalizes", "lemma: O_p(G) <= N_G(O^p(H)) for H subnormal");
  for (const Bits& H : subn) {
    if (!Op.subset_of(normalizer(G, O_upper_p(G, H, p)))) {
      a.ok = false;
      a.witness.push_back("H = " + group_set_name(G, H));
      break;
    }
  }
  a.notes.push_back(std::to_string(subn.size()) + " subnormal subgroups");
  out.push_back(std::move(a));

  CheckRecord ma = rec("group.charp-normalizers", "lemma: characteristic p passes to N_G(P), P a nontrivial p-subgroup");
  CheckRecord mb = rec("group.charp-subnormals", "lemma: characteristic p passes to subnormal subgroups");
  CheckRecord mc = rec("group.charp-overgroups", "lemma: characteristic p passes to overgroups of O_p(G)");
  CheckRecord nh = rec("group.charp-normalizer-of-subnormal", "lemma: N_G(H) is of characteristic p for H subnormal");
  if (!charp) {
    for (CheckRecord* r : {&ma, &mb, &mc, &nh}) r->notes.push_back("vacuous: G is not of characteristic p");
  } else {
    std::size_t np = 0;
    for (const Bits& P : p_subgroups(G, W, p)) {
      if (P.count() == 1) continue;
      ++np;
      if (!is_characteristic_p(G, normalizer(G, P), p)) {
        ma.ok = false;
        ma.witness.push_back("P = " + group_set_name(G, P));
        break;
      }
    }
    ma.notes.push_back(std::to_string(np) + " nontrivial p-subgroups");
    for (const Bits& H : subn) {
      if (!is_characteristic_p(G, H, p)) {
        mb.ok = false;
        mb.witness.push_back("H = " + group_set_name(G, H));
        break;
      }
    }
    std::size_t no = 0;
    for (const Bits& H : all_subgroups(G)) {
      if (!Op.subset_of(H)) continue;
      ++no;
      if (!is_characteristic_p(G, H, p)) {
        mc.ok = false;
        mc.witness.push_back("H = " + group_set_name(G, H));
        break;
      }
    }
    mc.notes.push_back(std::to_string(no) + " overgroups");
    for (const Bits& H : subn) {
      if (!is_characteristic_p(G, normalizer(G, H), p)) {
        nh.ok = false;
        nh.witness.push_back("H = " + group_set_name(G, H));
        break;
      }
    }
  }
  out.push_back(std::move(ma));
  out.push_back(std::move(mb));
  out.push_back(std::move(mc));
  out.push_back(std::move(nh));
  out.front().time_ms = sw.ms();
  return out;
}

// ---------------------------------------------------------------------------
// Per-instance state: the regular locality and a pool of subsystems.

class InstanceState {
 public:
  InstanceState(const FiniteGroup& G, int p, std::unique_ptr<RegularBuild> R) : G_(&G), p_(p), R_(std::move(R)) {}

  const FiniteGroup& group() const { return *G_; }
  int prime() const { return p_; }
  const RegularBuild& build() const { return *R_; }

  std::size_t add(FusionSystem F) {
    std::string d = F.digest();
    auto it = by_digest_.find(d);
    if (it != by_digest_.end()) return it->second;
    std::size_t i = pool_.size();
    pool_.push_back(std::make_unique<FusionSystem>(std::move(F)));
    by_digest_.emplace(std::move(d), i);
    return i;
  }
  std::size_t size() const { return pool_.size(); }
  const FusionSystem& sys(std::size_t i) const { return *pool_[i]; }
  bool saturated(std::size_t i) {
    auto it = sat_.find(i);
    if (it != sat_.end()) return it->second;
    bool r = is_saturated(*pool_[i]);
    sat_.emplace(i, r);
    return r;
  }
  const std::string& op_digest(std::size_t i) {
    auto it = op_.find(i);
    if (it != op_.end()) return it->second;
    return op_.emplace(i, O_upper_p_system(*pool_[i]).digest()).first->second;
  }
  std::optional<std::size_t> find(const FusionSystem& F) const {
    auto it = by_digest_.find(F.digest());
    if (it == by_digest_.end()) return std::nullopt;
    return it->second;
  }
  Pool pool() const {
    Pool out;
    for (const auto& f : pool_) out.push_back(f.get());
    return out;
  }

  // Systems of partial subnormals, aligned with structure().subnormals.
  const std::vector<std::size_t>& subnormal_systems() {
    if (subn_.empty()) {
      const SubLocality& L = *R_->L;
      for (const SubnormalEntry& e : R_->st->subnormals) subn_.push_back(add(fusion_of_partial_subgroup(L, e.set)));
    }
    return subn_;
  }

  // Pool seeded with systems of partial subnormals, N_L(P) and C_L(P) for P in
  // Delta, the subsystems of p-power index of F, and O^p of each subnormal.
  void seed_pool() {
    if (seeded_) return;
    seeded_ = true;
    const SubLocality& L = *R_->L;
    const PLattice& LS = *R_->LS;
    const FusionSystem& F = *R_->F;
    add(F);
    subnormal_systems();
    for (SubId P = 0; P < LS.num_subgroups(); ++P) {
      if (!L.in_delta(P)) continue;
      Bits N = N_L_of(L, P);
      if (LS.id_of(L.meet_mask(N)) != kNoSub) add(fusion_of_partial_subgroup(L, N));
      Bits C = C_L(L, L.sub_set(P));
      if (LS.id_of(L.meet_mask(C)) != kNoSub) add(fusion_of_partial_subgroup(L, C));
    }
    const SubId hyp = hyperfocal_subgroup(F);
    for (SubId Rg : LS.overgroups_in(hyp, LS.top()))
      if (LS.is_normal(Rg, LS.top())) add(p_power_index_subsystem(F, Rg));
    for (std::size_t i : std::vector<std::size_t>(subn_)) add(O_upper_p_system(sys(i)));
  }

  const HContext& context(const Bits& H) {
    auto it = ctx_.find(H);
    if (it != ctx_.end()) return *it->second;
    return *ctx_.emplace(H, make_context(*R_, H)).first->second;
  }

  SaturationCache& sat_cache() { return sc_; }

 private:
  const FiniteGroup* G_;
  int p_;
  std::unique_ptr<RegularBuild> R_;
  std::vector<std::unique_ptr<FusionSystem>> pool_;
  std::unordered_map<std::string, std::size_t> by_digest_;
  std::map<std::size_t, bool> sat_;
  std::map<std::size_t, std::string> op_;
  std::vector<std::size_t> subn_;
  bool seeded_ = false;
  std::unordered_map<Bits, std::unique_ptr<HContext>, BitsHash> ctx_;
  SaturationCache sc_;
};

// ---------------------------------------------------------------------------
// Fusion system and locality suites.

inline std::vector<CheckRecord> suite_fusion(const RegularBuild& R) {
  Stopwatch sw;
  std::vector<CheckRecord> out;
  const FusionSystem& F = *R.F;
  const PLattice& LS = *R.LS;
  {
    CheckRecord r{"fusion.saturated", "saturation of F_S(G)"};
    SaturationReport s = saturation_report(F);
    r.ok = s.saturated;
    if (!r.ok) r.witness.push_back(s.witness);
    r.notes.push_back(std::to_string(LS.num_subgroups()) + " subgroups of S in " + std::to_string(F.classes().size()) +
                      " F-classes");
    out.push_back(std::move(r));
  }
  const SubId foc = focal_subgroup(F), hyp = hyperfocal_subgroup(F);
  {
    CheckRecord r{"fusion.focal", "focal and hyperfocal subgroups"};
    r.ok = LS.le(hyp, foc) && strongly_closed(F, foc) && strongly_closed(F, hyp);
    if (!r.ok) r.witness.push_back("foc = " + mask_str(LS, foc) + ", hyp = " + mask_str(LS, hyp));
    r.notes.push_back("|foc| = " + std::to_string(LS.order(foc)) + ", |hyp| = " + std::to_string(LS.order(hyp)));
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"fusion.op-index", "subsystems of p-power index"};
    FusionSystem Op = O_upper_p_system(F);
    SaturationReport s = saturation_report(Op);
    r.ok = Op.base() == hyp && s.saturated && Op.is_subsystem_of(F);
    if (!r.ok) r.witness.push_back(s.saturated ? "O^p(F) over " + mask_str(LS, Op.base()) : s.witness);
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"fusion.delta", "object set delta(F)"};
    r.ok = R.delta.valid;
    if (!r.ok) r.witness.push_back(R.delta.witness);
    std::size_t nd = 0;
    for (char c : R.delta.delta) nd += c != 0;
    r.notes.push_back("|F^cr| = " + std::to_string(R.classes.radical_centric.size()) + ", |F^s| = " +
                      std::to_string(R.classes.subcentric.size()) + ", |delta(F)| = " + std::to_string(nd) +
                      (R.constrained() ? ", constrained" : ", not constrained"));
    out.push_back(std::move(r));
  }
  out.front().time_ms = sw.ms();
  return out;
}

inline std::vector<CheckRecord> suite_locality(const RegularBuild& R, const SuiteOptions& opt) {
  Stopwatch sw;
  std::vector<CheckRecord> out;
  const SubLocality& L = *R.L;
  const LocalityStructure& st = *R.st;
  {
    CheckRecord r{"locality.axioms", "partial group and locality axioms"};
    AxiomReport ax = check_locality(L, opt.axiom_budget);
    r.ok = ax.ok;
    if (!ax.ok) r.witness.push_back(ax.axiom + ": " + ax.witness);
    r.notes.push_back(std::to_string(ax.words_checked) + " words checked");
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"locality.regular", "regular locality"};
    RegularReport rr = is_regular_locality(L, st);
    r.ok = rr.ok;
    if (!rr.ok) r.witness.push_back(rr.witness);
    r.notes.push_back("|L| = " + std::to_string(L.size()) + ", " + std::to_string(st.subnormals.size()) +
                      " partial subnormals, " + std::to_string(st.components.size()) + " components, |E(L)| = " +
                      std::to_string(st.E.count()) + ", |T~| = " + std::to_string(R.LS->order(st.tildeT)));
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"locality.product-order", "E(L) independent of component order"};
    r.ok = st.E_order_independent;
    if (!r.ok) r.witness.push_back("products of components differ in reverse order");
    out.push_back(std::move(r));
  }
  {
    std::vector<CheckItem> items = verify_global_action(R);
    for (CheckItem& it : items) it.name = "0: " + it.name;
    auto recs = records_from_items("locality.action", "conjugation action of G = N_L(T~)", items, 0,
                                   "G order " + std::to_string(R.Gstar.count()));
    for (auto& x : recs) out.push_back(std::move(x));
  }
  out.front().time_ms = sw.ms();
  return out;
}

// ---------------------------------------------------------------------------
// Per-H suites.

inline std::vector<CheckRecord> suite_theoremA(InstanceState& S, const Bits& H, const SuiteOptions& opt,
                                               const std::string& subject) {
  Stopwatch sw;
  const HContext& c = S.context(H);
  TheoremAResult A = verify_main_theorem_A(S.build(), c, opt.axiom_budget);
  return records_from_items("A", "regular normalizer theorem", A.items, sw.ms(), subject);
}

inline std::vector<CheckRecord> suite_normalizer(InstanceState& S, const Bits& H, const std::string& subject) {
  Stopwatch sw;
  S.seed_pool();
  const HContext& c = S.context(H);
  auto items = verify_normalizer_theorems(S.build(), c, S.pool(), S.sat_cache());
  std::vector<CheckItem> thm, gen;
  for (auto& it : items) (it.name.rfind("gen: ", 0) == 0 ? gen : thm).push_back(it);
  auto out = records_from_items("N", "normalizer subsystem theorem", thm, sw.ms(), subject);
  for (auto& r : records_from_items("N", "generation of N_F(E)", gen, 0, subject)) out.push_back(std::move(r));
  return out;
}

inline std::vector<CheckRecord> suite_centralizer(InstanceState& S, const Bits& H, const SuiteOptions& opt,
                                                  const std::string& subject) {
  Stopwatch sw;
  S.seed_pool();
  const RegularBuild& R = S.build();
  const HContext& c = S.context(H);
  ConjugateFamily fam = conjugate_family(R, c);
  auto out = records_from_items("C", "centralizer subsystem theorem",
                                verify_centralizer_theorems(R, c, S.pool(), S.sat_cache(), fam), 0, subject);
  if (R.LS->size() <= opt.cs_max_order) {
    CheckRecord r{"C.max.1", "C_S(E) is the largest R <= S with E in C_F(R)"};
    CentralizerSearch cs = centralizer_candidates(*R.F, *c.E);
    r.ok = cs.maximal.size() == 1 && cs.maximal[0] == c.CSH;
    r.notes.push_back(std::to_string(cs.members.size()) + " subgroups R with E in C_F(R)");
    if (!r.ok) {
      std::string w = "maximal members:";
      for (SubId m : cs.maximal) w += " " + mask_str(*R.LS, m);
      r.witness.push_back(w + "; C_S(H) = " + mask_str(*R.LS, c.CSH));
    }
    out.push_back(std::move(r));
  }
  if (!out.empty()) out.front().time_ms = sw.ms();
  return out;
}

inline std::vector<CheckRecord> suite_conjugates(InstanceState& S, const Bits& H, const std::string& subject) {
  Stopwatch sw;
  const RegularBuild& R = S.build();
  const HContext& c = S.context(H);
  ConjugateFamily fam = conjugate_family(R, c);
  std::vector<CheckRecord> out;
  {
    CheckRecord r{"conj.family", "conjugates of E via G and via F"};
    r.ok = fam.agree && fam.conj_formula;
    r.notes.push_back(std::to_string(fam.via_G.size()) + " conjugates");
    if (!r.ok) r.witness.push_back(fam.agree ? "E^{c_g} differs from F_{T^g}(H^g); subject " + subject
                                             : "enumerations of E^F via G and via Hom_F(T,S) differ; subject " + subject);
    out.push_back(std::move(r));
  }
  bool nse_eq = true;
  auto rows = fully_normalized_rows(R, fam, &nse_eq);
  {
    CheckRecord r{"conj.nse", "N_S(E^g) = N_S(H^g) over the family"};
    r.ok = nse_eq;
    if (!r.ok) r.witness.push_back("subject " + subject);
    out.push_back(std::move(r));
  }
  auto row_record = [&](std::string id, std::string anchor, const std::vector<EquivRow>& rs) {
    CheckRecord r{std::move(id), std::move(anchor)};
    std::size_t yes = 0;
    for (const EquivRow& row : rs) {
      yes += row.i;
      if (!row.consistent() && r.ok) {
        r.ok = false;
        r.witness.push_back("conjugate " + partial_set_name(*R.L, fam.via_G[row.index].Hg) + ": (i,ii,iii) = (" +
                            std::to_string(row.i) + "," + std::to_string(row.ii) + "," + std::to_string(row.iii) + ")");
      }
    }
    r.notes.push_back(std::to_string(yes) + " of " + std::to_string(rs.size()) + " conjugates satisfy (i)");
    return r;
  };
  out.push_back(row_record("conj.fully-normalized", "fully normalized equivalences", rows));
  out.push_back(row_record("conj.fully-centralized", "fully centralized equivalences", fully_centralized_rows(R, fam)));
  out.front().time_ms = sw.ms();
  return out;
}

// R <= N_S(E) up to N_S(E)-conjugacy, thinned to at most `cap` by stride.
inline std::vector<SubId> er_subgroups(const PLattice& LS, SubId NSE, std::size_t cap) {
  std::vector<SubId> reps;
  std::set<SubId> seen;
  std::vector<unsigned> gens = LS.gens(NSE);
  for (SubId Rg : LS.subgroups_of(NSE)) {
    if (seen.count(Rg)) continue;
    std::vector<SubId> orbit{Rg};
    seen.insert(Rg);
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (unsigned g : gens) {
        SubId q = LS.conj_sub(orbit[i], g);
        if (seen.insert(q).second) orbit.push_back(q);
      }
    reps.push_back(Rg);
  }
  if (reps.size() <= cap) return reps;
  std::vector<SubId> out;
  for (std::size_t k = 0; k < cap; ++k) out.push_back(reps[k * reps.size() / cap]);
  if (out.back() != reps.back()) out.back() = reps.back();
  return out;
}

inline std::vector<CheckRecord> suite_er(InstanceState& S, const Bits& H, const SuiteOptions& opt,
                                         const std::string& subject) {
  Stopwatch sw;
  S.seed_pool();
  const RegularBuild& R = S.build();
  const SubLocality& L = *R.L;
  const PLattice& LS = *R.LS;
  const FusionSystem& F = *R.F;
  const HContext& c = S.context(H);
  const FusionSystem& E = *c.E;
  const SubId NSE = N_S_of(F, E);
  const std::vector<SubId> rs = er_subgroups(LS, NSE, opt.er_max_r);
  const std::string opE = O_upper_p_system(E).digest();
  CheckRecord sat{"er.saturated", "ER theorem: (E R)_F saturated"};
  CheckRecord nrm{"er.normal", "ER theorem: E normal in (E R)_F"};
  CheckRecord op{"er.op", "ER theorem: O^p((E R)_F) = O^p(E)"};
  CheckRecord uni{"er.unique", "ER theorem: uniqueness over TR"};
  CheckRecord real{"er.realized", "ER theorem: (E R)_F = F_{TR}(HR)"};
  auto fail = [&](CheckRecord& r, SubId Rg, const std::string& why) {
    if (!r.ok) return;
    r.ok = false;
    r.witness.push_back("R = " + mask_str(LS, Rg) + (why.empty() ? "" : ": " + why) + "; subject " + subject);
  };
  std::vector<std::pair<SubId, std::size_t>> er_idx;
  for (SubId Rg : rs) {
    FusionSystem ER = product_ER(F, E, Rg);
    SaturationReport s = saturation_report(ER);
    if (!s.saturated) fail(sat, Rg, s.witness);
    if (!is_normal_subsystem(ER, E)) fail(nrm, Rg, "");
    if (O_upper_p_system(ER).digest() != opE) fail(op, Rg, "");
    Bits HR = product_sets(L, c.H, L.sub_set(Rg));
    const SubId TR = LS.join(c.T, Rg);
    if (LS.id_of(L.meet_mask(HR)) != TR) {
      fail(real, Rg, "HR ∩ S differs from TR");
    } else {
      FusionSystem FHR = fusion_of_partial_subgroup(L, HR);
      std::string d = fusion_diff(ER, FHR);
      if (!d.empty()) fail(real, Rg, d);
      S.add(std::move(FHR));
    }
    S.add(inner_system(LS, TR));
    er_idx.emplace_back(Rg, S.add(std::move(ER)));
  }
  // uniqueness among pooled saturated systems over TR with the same O^p
  std::size_t compared = 0;
  for (auto [Rg, i] : er_idx) {
    const SubId TR = S.sys(i).base();
    for (std::size_t j = 0; j < S.size(); ++j) {
      if (j == i || S.sys(j).base() != TR || !S.saturated(j)) continue;
      if (S.op_digest(j) != opE) continue;
      ++compared;
      if (!(S.sys(j) == S.sys(i))) fail(uni, Rg, "pooled system " + std::to_string(j) + " differs");
    }
  }
  sat.notes.push_back(std::to_string(rs.size()) + " subgroups R up to N_S(E)-conjugacy");
  uni.notes.push_back(std::to_string(compared) + " pooled rivals with equal O^p, " + std::to_string(S.size()) +
                      " pooled systems");
  sat.time_ms = sw.ms();
  return {std::move(sat), std::move(nrm), std::move(op), std::move(uni), std::move(real)};
}

// ---------------------------------------------------------------------------
// Partial subnormals against fusion-side subnormal subsystems of the pool.

struct FusionSubnormals {
  std::vector<std::size_t> members;  // pool indices, F first
  std::vector<std::size_t> components;
};

inline FusionSubnormals fusion_side_subnormals(InstanceState& S) {
  S.seed_pool();
  const std::size_t F = *S.find(S.build().fusion());
  FusionSubnormals out;
  std::vector<char> found(S.size(), 0);
  out.members.push_back(F);
  found[F] = 1;
  std::map<std::pair<std::size_t, std::size_t>, bool> normal_memo;
  auto normal = [&](std::size_t big, std::size_t small) {
    auto key = std::make_pair(big, small);
    auto it = normal_memo.find(key);
    if (it != normal_memo.end()) return it->second;
    const FusionSystem &B = S.sys(big), &E = S.sys(small);
    bool r = E.is_subsystem_of(B) && strongly_closed(B, E.base()) && S.saturated(small) && is_invariant(B, E) &&
             extension_condition(B, E);
    normal_memo.emplace(key, r);
    return r;
  };
  for (std::size_t h = 0; h < out.members.size(); ++h) {
    const std::size_t X = out.members[h];
    for (std::size_t j = 0; j < S.size(); ++j) {
      if (found[j] && j != X) continue;
      if (j == X) continue;
      if (normal(X, j)) {
        found[j] = 1;
        out.members.push_back(j);
      }
    }
  }
  // components: O^p(C) = C, and every pooled subnormal normal in C is C or central
  for (std::size_t C : out.members) {
    const FusionSystem& FC = S.sys(C);
    const PLattice& L = FC.lattice();
    if (FC.base() == L.trivial()) continue;
    if (!(O_upper_p_system(FC) == FC)) continue;
    const SubId Z = center_system(FC);
    bool quasi = Z != FC.base();
    for (std::size_t D : out.members) {
      if (!quasi) break;
      if (D == C || !normal(C, D)) continue;
      if (!L.le(S.sys(D).base(), Z)) quasi = false;
    }
    if (quasi) out.components.push_back(C);
  }
  std::sort(out.members.begin(), out.members.end());
  std::sort(out.components.begin(), out.components.end());
  return out;
}

inline std::vector<CheckRecord> suite_bijection(InstanceState& S) {
  Stopwatch sw;
  const RegularBuild& R = S.build();
  const SubLocality& L = *R.L;
  const LocalityStructure& st = *R.st;
  const std::vector<std::size_t> img = S.subnormal_systems();
  FusionSubnormals fs = fusion_side_subnormals(S);
  std::vector<CheckRecord> out;
  {
    CheckRecord r{"bij.injective", "partial subnormals to subnormal subsystems: injective"};
    std::map<std::size_t, std::size_t> first;
    for (std::size_t k = 0; k < img.size(); ++k) {
      auto [it, fresh] = first.emplace(img[k], k);
      if (!fresh && r.ok) {
        r.ok = false;
        r.witness.push_back(partial_set_name(L, st.subnormals[it->second].set) + " and " +
                            partial_set_name(L, st.subnormals[k].set) + " give the same system");
      }
    }
    r.notes.push_back(std::to_string(img.size()) + " partial subnormals");
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"bij.into", "F_{S∩H}(H) is subnormal in F"};
    for (std::size_t k = 0; k < img.size(); ++k)
      if (!std::binary_search(fs.members.begin(), fs.members.end(), img[k]) && r.ok) {
        r.ok = false;
        r.witness.push_back("H = " + partial_set_name(L, st.subnormals[k].set));
      }
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"bij.onto", "every pooled subnormal subsystem is realized"};
    std::set<std::size_t> im(img.begin(), img.end());
    for (std::size_t m : fs.members)
      if (!im.count(m) && r.ok) {
        r.ok = false;
        r.witness.push_back("subsystem over " + mask_str(*R.LS, S.sys(m).base()) + " has no partial subnormal");
      }
    r.notes.push_back(std::to_string(fs.members.size()) + " subnormal subsystems among " + std::to_string(S.size()) +
                      " pooled systems");
    out.push_back(std::move(r));
  }
  {
    CheckRecord r{"bij.components", "components correspond to components"};
    std::vector<std::size_t> lc;
    for (std::size_t k = 0; k < st.subnormals.size(); ++k)
      for (const Bits& K : st.components)
        if (st.subnormals[k].set == K) lc.push_back(img[k]);
    std::sort(lc.begin(), lc.end());
    r.ok = lc == fs.components;
    if (!r.ok)
      r.witness.push_back(std::to_string(lc.size()) + " components of L against " +
                          std::to_string(fs.components.size()) + " fusion-side components");
    r.notes.push_back(std::to_string(lc.size()) + " components");
    out.push_back(std::move(r));
  }
  out.front().time_ms = sw.ms();
  return out;
}

// ---------------------------------------------------------------------------
// Fault injection.

struct FuzzResult {
  std::size_t mutants = 0;
  std::size_t rejected = 0;
  std::size_t missing_witness = 0;
  bool base_ok = false;
  std::string base_witness;
  std::string escape;  // description of the first accepted mutant
  std::map<std::string, std::size_t> by_kind;
};

inline FuzzResult fuzz_locality(const LocalityView& base, std::size_t n, uint64_t seed) {
  FuzzResult fr;
  const std::size_t m = base.size();
  CheckBudget budget{m * m * m + 1, 3, 200, 5, seed};
  AxiomReport b = check_locality(base, budget);
  fr.base_ok = b.ok;
  if (!b.ok) fr.base_witness = b.axiom + ": " + b.witness;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    Mutation mu = random_mutation(base, rng);
    MutantLocality ml(base, mu);
    AxiomReport r = check_locality(ml, budget);
    ++fr.mutants;
    ++fr.by_kind[mutation_name(mu.kind)];
    if (!r.ok) {
      ++fr.rejected;
      if (r.witness.empty()) ++fr.missing_witness;
    } else if (fr.escape.empty()) {
      fr.escape = std::string(mutation_name(mu.kind)) + " on " + word_str(base, mu.word);
    }
  }
  return fr;
}

inline std::vector<CheckRecord> suite_fuzz(const RegularBuild& R, const SuiteOptions& opt) {
  Stopwatch sw;
  CheckRecord r{"fuzz.mutants", "fault-injected mutants are rejected"};
  const SubLocality& L = *R.L;
  if (L.size() < 2) {
    r.skipped = true;
    r.skip_reason = "a one-element locality has no mutations";
    return {r};
  }
  if (L.size() > opt.fuzz_max_size) {
    r.skipped = true;
    r.skip_reason = "|L| = " + std::to_string(L.size()) + " above fuzz limit " + std::to_string(opt.fuzz_max_size);
    return {r};
  }
  FuzzResult fr = fuzz_locality(L, opt.fuzz_mutants, opt.fuzz_seed);
  r.ok = fr.base_ok && fr.rejected == fr.mutants && fr.missing_witness == 0;
  if (!fr.base_ok) r.witness.push_back("unmutated locality rejected: " + fr.base_witness);
  if (!fr.escape.empty()) r.witness.push_back("accepted mutant: " + fr.escape);
  r.notes.push_back(std::to_string(fr.rejected) + " of " + std::to_string(fr.mutants) + " mutants rejected");
  r.time_ms = sw.ms();
  return {r};
}

}  // namespace llab
