// Acceptance run over the default catalog: one PASS/FAIL line per criterion.

#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "locality_lab/catalog.hpp"
#include "oracle.hpp"

using namespace llab;

namespace {

constexpr const char* kFlagship = "psl2_7xs4-all";
constexpr std::size_t kFuzzTotal = 10000;
constexpr uint64_t kFuzzSeed = 0x5eedf00dULL;

struct Tally {
  std::size_t checks = 0, skipped = 0;
  long long ms = 0;
  std::set<std::string> instances;
  std::vector<std::string> failures;

  void add(const std::string& inst, const CheckRecord& c) {
    instances.insert(inst);
    ms += c.time_ms;
    if (c.skipped) {
      ++skipped;
      return;
    }
    ++checks;
    if (!c.ok) failures.push_back(inst + " " + c.id + (c.witness.empty() ? "" : ": " + c.witness[0]));
  }
  void fail(const std::string& what) { failures.push_back(what); }
  bool ok() const { return failures.empty(); }
};

struct Line {
  std::string id;
  bool ok = false;
  std::string text;
  std::vector<std::string> details;
};

std::string secs(long long ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", static_cast<double>(ms) / 1000.0);
  return buf;
}

bool starts(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string base_id(const std::string& sub_id) { return sub_id.substr(0, sub_id.find('/')); }

Line line(const std::string& id, const Tally& t, const std::string& text, bool extra_ok = true) {
  Line l{id, t.ok() && extra_ok, text, {}};
  for (std::size_t i = 0; i < t.failures.size() && i < 8; ++i) l.details.push_back(t.failures[i]);
  if (t.failures.size() > 8) l.details.push_back(std::to_string(t.failures.size() - 8) + " more failures");
  return l;
}

// Regular locality of one catalog group file, built once and shared.
struct Built {
  std::string id;
  std::unique_ptr<FiniteGroup> G;  // R points into it
  std::unique_ptr<RegularBuild> R;
};

// F_{D8}(S4) oracles with S = <(1 2 3 4), (1 3)>.
void fusion_oracles(Tally& t) {
  const FiniteGroup G = oracle::s4();
  const oracle::ElemSet all = oracle::all_elements(G);
  const oracle::ElemSet S = oracle::s4_sylow(G);
  const oracle::ElemSet V4 = oracle::O_p(G, all, 2);
  const oracle::ElemSet A4 = oracle::O_upper_p(G, all, 2);
  PLattice LS(G, oracle::to_bits(G, S), 2);
  const FusionSystem F = fusion_from_conjugators(LS, LS.top(), whole(G));
  const SubId v4 = LS.from_ambient(oracle::to_bits(G, V4));
  auto expect = [&](bool ok, const std::string& what) {
    ++t.checks;
    if (!ok) t.fail("D8 <= S4: " + what);
  };
  expect(oracle::morphisms_of(F) == oracle::conjugation_morphisms(G, S, all), "Hom sets of F_S(G) differ from conjugation");
  expect(is_saturated(F), "F_S(G) not saturated");
  const FiniteGroup A = aut_as_group(LS, v4, F.aut_generators(v4));
  bool abelian = true;
  for (Elem a = 0; a < A.order(); ++a)
    for (Elem b = 0; b < A.order(); ++b) abelian = abelian && A.mul(a, b) == A.mul(b, a);
  expect(A.order() == 6 && !abelian, "Aut_F(V4) is not S3");
  oracle::ElemSet foc;
  for (const auto& m : oracle::morphisms_of(F))
    for (const auto& [x, y] : m) foc.insert(G.mul(G.inv(x), y));
  expect(oracle::to_set(LS, focal_subgroup(F)) == oracle::closure_of_set(G, foc), "foc(F) differs from brute force");
  expect(focal_subgroup(F) == v4, "foc(F) != V4");
  expect(hyperfocal_subgroup(F) == v4, "hyp(F) != V4");
  const FusionSystem Op = O_upper_p_system(F);
  expect(oracle::morphisms_of(Op) == oracle::conjugation_morphisms(G, V4, A4), "O^p(F) != F_{V4}(A4)");
}

// F_{N_S(H)}(bN_L(H)) against F_{N_S(H)}(N_G(H)) computed in the ambient group.
void constrained_reduction(const Built& b, Tally& t) {
  const RegularBuild& R = *b.R;
  const SubLocality& L = *R.L;
  const oracle::ElemSet all = oracle::all_elements(*b.G);
  for (const SubnormalEntry& e : R.st->subnormals) {
    const auto c = make_context(R, e.set);
    const oracle::ElemSet Hamb = oracle::to_set(L.to_ambient(e.set));
    const oracle::ElemSet NG = oracle::normalizer(*b.G, Hamb, all);
    const FusionSystem via_bN = fusion_from_conjugators(*R.LS, c->NSH, L.to_ambient(c->bN));
    const FusionSystem via_model = fusion_from_conjugators(*R.LS, c->NSH, oracle::to_bits(*b.G, NG));
    ++t.checks;
    t.instances.insert(b.id);
    if (oracle::morphisms_of(via_bN) != oracle::morphisms_of(via_model))
      t.fail(b.id + " H = " + partial_set_name(L, e.set) + ": " + fusion_diff(via_bN, via_model));
  }
}

// |N_S(H)| = 4 and 8 for <(1 2)(3 4)> and <(1 3)(2 4)>; only the second is fully normalized.
void s4_pair(Tally& t) {
  const FiniteGroup G = oracle::s4();
  const Bits S = oracle::to_bits(G, oracle::s4_sylow(G));
  auto R = build_regular(G, 2, {}, &S);
  const SubLocality& L = *R->L;
  auto cyc = [&](const std::vector<std::vector<int>>& c) {
    Bits b(L.size());
    for (Elem x : oracle::closure(G, {oracle::elem(G, c)})) b.set(L.from_ambient(x));
    return b;
  };
  const Bits H = cyc({{1, 2}, {3, 4}}), Hc = cyc({{1, 3}, {2, 4}});
  const auto c = make_context(*R, H);
  const auto cc = make_context(*R, Hc);
  t.checks += 3;
  if (R->LS->order(c->NSH) != 4) t.fail("|N_S(<(1,2)(3,4)>)| != 4");
  if (R->LS->order(cc->NSH) != 8) t.fail("|N_S(<(1,3)(2,4)>)| != 8");
  const ConjugateFamily fam = conjugate_family(*R, *c);
  const auto rows = fully_normalized_rows(*R, fam);
  bool seen_h = false, seen_hc = false;
  for (const EquivRow& r : rows) {
    const Bits& Hg = fam.via_G[r.index].Hg;
    if (Hg == H) seen_h = !r.i && r.consistent();
    if (Hg == Hc) seen_hc = r.i && r.consistent();
  }
  if (!seen_h || !seen_hc) t.fail("S4 pair: fully normalized rows do not separate the two C2 subgroups");
}

}  // namespace

int main() {
  Stopwatch total;
  std::vector<Line> lines;
  const std::vector<Instance> manifest = load_manifest(LOCALITY_LAB_CATALOG);
  RunConfig cfg;
  cfg.locality_cap = 4096;
  const std::vector<InstanceRun> runs = run_instances(manifest, cfg, FusionCache("", false), 1);

  Tally c1, c2, c4, c5, c6, c7, c8, c9, c10;
  std::size_t flagship_subs = 0;
  for (const InstanceRun& run : runs) {
    if (run.error) {
      for (Tally* t : {&c1, &c2, &c4, &c5, &c6, &c7, &c8, &c9, &c10}) t->fail(run.id + ": " + run.error_text);
      continue;
    }
    for (const SubReport& s : run.subs) {
      const std::string inst = base_id(s.id);
      if (inst == kFlagship) ++flagship_subs;
      for (const CheckRecord& c : s.checks) {
        if (starts(c.id, "group.")) c1.add(inst, c);
        else if (starts(c.id, "fusion.saturated")) c2.add(inst, c);
        else if (starts(c.id, "fusion.")) c2.ms += c.time_ms;
        else if (starts(c.id, "er.")) c4.add(inst, c);
        else if (starts(c.id, "N.")) c5.add(inst, c);
        else if (starts(c.id, "A.")) {
          if (inst == kFlagship) c6.add(inst, c);
        } else if (starts(c.id, "C.max")) c7.add(inst, c);
        else if (starts(c.id, "C.") || c.id == "conj.fully-centralized") c8.add(inst, c);
        else if (c.id == "conj.fully-normalized" || c.id == "conj.nse" || c.id == "conj.family") c9.add(inst, c);
        else if (starts(c.id, "bij.")) c10.add(inst, c);
      }
    }
  }

  // Extra work on one build per group file of a locality instance.
  std::vector<Built> builds;
  {
    std::set<std::string> files;
    for (const Instance& in : manifest) {
      const auto suites = effective_suites(in, cfg);
      if (std::find(suites.begin(), suites.end(), "locality") == suites.end()) continue;
      if (!files.insert(in.file).second) continue;
      const GroupSpec spec = parse_group_spec(read_file(in.file));
      Built b{in.id, std::make_unique<FiniteGroup>(FiniteGroup::generate(spec.degree, spec.generators)), nullptr};
      BuildOptions bo;
      bo.locality_cap = cfg.locality_cap;
      b.R = build_regular(*b.G, resolve_prime(in, spec, cfg), bo);
      builds.push_back(std::move(b));
    }
  }

  {
    Stopwatch sw;
    fusion_oracles(c2);
    c2.ms += sw.ms();
  }
  Tally c3;
  for (const Built& b : builds)
    if (b.R->constrained()) constrained_reduction(b, c3);
  s4_pair(c9);

  Tally c11;
  std::size_t fuzz_bases = 0, fuzz_done = 0;
  {
    Stopwatch sw;
    std::vector<const Built*> bases;
    for (const Built& b : builds)
      if (b.R->L->size() >= 2 && b.R->L->size() <= 128) bases.push_back(&b);
    fuzz_bases = bases.size();
    std::mt19937_64 seeds(kFuzzSeed);
    for (std::size_t i = 0; i < bases.size(); ++i) {
      const std::size_t n = kFuzzTotal / bases.size() + (i < kFuzzTotal % bases.size() ? 1 : 0);
      const FuzzResult fr = fuzz_locality(*bases[i]->R->L, n, seeds());
      fuzz_done += fr.mutants;
      c11.checks += fr.mutants;
      c11.instances.insert(bases[i]->id);
      if (!fr.base_ok) c11.fail(bases[i]->id + ": unmutated locality rejected: " + fr.base_witness);
      if (fr.rejected != fr.mutants)
        c11.fail(bases[i]->id + ": " + std::to_string(fr.mutants - fr.rejected) + " mutants accepted, first " + fr.escape);
      if (fr.missing_witness) c11.fail(bases[i]->id + ": " + std::to_string(fr.missing_witness) + " rejections without witness");
    }
    c11.ms = sw.ms();
  }

  auto n = [](std::size_t x) { return std::to_string(x); };
  lines.push_back(line("C1", c1,
                       "group lemmas: " + n(c1.checks) + " checks on " + n(c1.instances.size()) + " instances, " +
                           n(c1.failures.size()) + " failures, " + secs(c1.ms) + " (limit 10 s)",
                       c1.ms < 10000 && c1.checks > 0));
  lines.push_back(line("C2", c2,
                       "fusion oracles for D8 <= S4 and saturation of " + n(c2.instances.size()) +
                           " catalog systems: " + n(c2.checks) + " checks, " + secs(c2.ms) + " (limit 30 s)",
                       c2.ms < 30000 && c2.checks > 0));
  lines.push_back(line("C3", c3,
                       "constrained reduction: " + n(c3.checks) + " subnormal H on " + n(c3.instances.size()) +
                           " constrained instances, " + n(c3.failures.size()) + " mismatches",
                       c3.checks > 0));
  lines.push_back(line("C4", c4,
                       "ER theorem: " + n(c4.checks) + " checks on " + n(c4.instances.size()) + " instances, " +
                           n(c4.failures.size()) + " failures",
                       c4.checks > 0));
  lines.push_back(line("C5", c5,
                       "normalizer subsystem items: " + n(c5.checks) + " checks on " + n(c5.instances.size()) +
                           " instances, " + n(c5.failures.size()) + " failures",
                       c5.checks > 0));
  lines.push_back(line("C6", c6,
                       "regular normalizer theorem on the flagship PSL(2,7) x S4, p = 2, locality cap 4096: " +
                           n(c6.checks) + " checks over " + n(flagship_subs) + " partial subnormals, " + secs(c6.ms) +
                           " (limit 10 min)",
                       c6.checks > 0 && c6.ms < 600000));
  lines.push_back(line("C7", c7,
                       "maximality of C_S(E) by search over all R <= S: " + n(c7.checks) + " subnormal H on " +
                           n(c7.instances.size()) + " instances with |S| <= 32, " + n(c7.failures.size()) + " failures",
                       c7.checks > 0));
  lines.push_back(line("C8", c8,
                       "centralizer subsystem items and fully centralized equivalences: " + n(c8.checks) +
                           " checks on " + n(c8.instances.size()) + " instances, " + n(c8.failures.size()) + " failures",
                       c8.checks > 0));
  lines.push_back(line("C9", c9,
                       "fully normalized equivalences over E^F: " + n(c9.checks) + " checks on " +
                           n(c9.instances.size()) + " instances, S4 pair |N_S| = 4 vs 8 reproduced",
                       c9.checks > 0));
  lines.push_back(line("C10", c10,
                       "partial subnormals to subnormal subsystems: " + n(c10.checks) + " checks on " +
                           n(c10.instances.size()) + " instances, " + n(c10.failures.size()) + " failures",
                       c10.checks > 0));
  lines.push_back(line("C11", c11,
                       "fault injection: " + n(fuzz_done) + " mutants of " + n(fuzz_bases) + " localities, " +
                           n(c11.failures.size()) + " problems, " + secs(c11.ms),
                       fuzz_done >= kFuzzTotal));

  std::size_t passed = 0;
  for (const Line& l : lines) {
    std::cout << l.id << (l.id.size() < 3 ? "  " : " ") << (l.ok ? "PASS" : "FAIL") << "  " << l.text << "\n";
    for (const std::string& d : l.details) std::cout << "      " << d << "\n";
    passed += l.ok;
  }
  std::cout << "acceptance: " << passed << "/" << lines.size() << " criteria passed in " << secs(total.ms()) << "\n";
  return passed == lines.size() ? 0 : 1;
}
