#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "locality_lab/catalog.hpp"
#include "oracle.hpp"

using namespace llab;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("llab-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << s;
}

const Instance& find(const std::vector<Instance>& v, const std::string& id) {
  for (const Instance& i : v)
    if (i.id == id) return i;
  throw std::runtime_error("no instance " + id);
}

}  // namespace

TEST(ParseCycles, AcceptsCommasAndSpaces) {
  const FiniteGroup G = oracle::s4();
  const Elem e = oracle::elem(G, {{1, 2}, {3, 4}});
  EXPECT_EQ(parse_cycles(G, "(1,2)(3,4)"), e);
  EXPECT_EQ(parse_cycles(G, "(1 2)(3 4)"), e);
  EXPECT_EQ(parse_cycles(G, "()"), G.identity());
  EXPECT_EQ(parse_cycles(G, G.cycles(e)), e);
}

TEST(ParseCycles, RejectsMalformedText) {
  const FiniteGroup G = oracle::s4();
  for (const char* bad : {"(1,2", "1,2)", "(1,5)", "(1,1)", "(1,2)(2,3)", "(1;2)", "((1,2))"})
    EXPECT_THROW(parse_cycles(G, bad), LabError) << bad;
}

TEST(Manifest, DefaultCatalog) {
  const auto ins = load_manifest(LOCALITY_LAB_CATALOG);
  EXPECT_EQ(ins.size(), 15u);
  EXPECT_TRUE(std::is_sorted(ins.begin(), ins.end(), [](const Instance& a, const Instance& b) { return a.id < b.id; }));
  const Instance& s4 = find(ins, "s4-all");
  EXPECT_EQ(s4.mode, SubjectMode::All);
  ASSERT_TRUE(s4.prime.has_value());
  EXPECT_EQ(*s4.prime, 2);
  EXPECT_TRUE(s4.suites.empty());
  const Instance& v4 = find(ins, "s4-v4");
  EXPECT_EQ(v4.mode, SubjectMode::Generators);
  EXPECT_EQ(v4.generators.size(), 2u);
  const Instance& c3c4 = find(ins, "c3c4-group");
  EXPECT_EQ(c3c4.suites, (std::vector<std::string>{"group", "fusion"}));
  EXPECT_FALSE(c3c4.note.empty());
  EXPECT_EQ(*find(ins, "s3-p3-all").prime, 3);
}

TEST(Manifest, RejectsBadManifests) {
  auto kind = [](const std::string& json) {
    TempDir t;
    write(t.path() / "c2.grp", "degree 2\n2 1\n");
    write(t.path() / "instances.json", json);
    try {
      load_manifest(t.path());
    } catch (const LabError& e) {
      return e.kind();
    }
    return ErrorKind::Violation;
  };
  EXPECT_EQ(kind("{"), ErrorKind::Parse);
  EXPECT_EQ(kind(R"({"instances":[{"id":"a","file":"c2.grp"},{"id":"a","file":"c2.grp"}]})"), ErrorKind::InvalidInput);
  EXPECT_EQ(kind(R"({"instances":[{"id":"a","file":"missing.grp"}]})"), ErrorKind::FileError);
  EXPECT_EQ(kind(R"({"instances":[{"id":"a","file":"c2.grp","suites":["nope"]}]})"), ErrorKind::InvalidInput);
  EXPECT_EQ(kind(R"({"instances":[{"id":"a","file":"c2.grp","H":7}]})"), ErrorKind::Parse);
}

TEST(Cache, KeyIsStableAndPrimeSensitive) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(FusionCache::key("degree 2\n2 1\n", 2), FusionCache::key("degree 2\n2 1\n", 2));
  EXPECT_NE(FusionCache::key("degree 2\n2 1\n", 2), FusionCache::key("degree 2\n2 1\n", 3));
  EXPECT_EQ(FusionCache::key("x", 2).size(), 16u);
}

TEST(Cache, SerializeParseRoundTrip) {
  const FiniteGroup G = oracle::s4();
  PLattice LS(G, sylow(G, 2), 2);
  FusionData d{fusion_from_conjugators(LS, LS.top(), whole(G)), {}};
  d.classes = subgroup_classes(d.F);
  const std::string text = serialize_fusion_data(LS, d);
  const auto back = parse_fusion_data(LS, text);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->F, d.F);
  EXPECT_EQ(back->classes.subcentric, d.classes.subcentric);
  EXPECT_EQ(back->classes.radical_centric, d.classes.radical_centric);
  EXPECT_EQ(back->classes.constrained, d.classes.constrained);
  EXPECT_EQ(serialize_fusion_data(LS, *back), text);

  EXPECT_FALSE(parse_fusion_data(LS, "junk").has_value());
  std::string truncated = text.substr(0, text.size() / 2);
  EXPECT_FALSE(parse_fusion_data(LS, truncated).has_value());
  // A lattice from another Sylow subgroup is a miss.
  const FiniteGroup A4 = load_group("degree 4\n2 3 1 4\n2 1 4 3\n");
  PLattice L4(A4, sylow(A4, 2), 2);
  EXPECT_FALSE(parse_fusion_data(L4, text).has_value());
}

TEST(Cache, SecondBuildHitsTheCache) {
  TempDir t;
  const FusionCache cache(t.path(), true);
  const std::string spec = read_file(std::string(LOCALITY_LAB_CATALOG) + "/s4.grp");
  const FiniteGroup G = load_group(spec);
  std::string digest;
  for (int round = 0; round < 2; ++round) {
    BuildOptions bo;
    bool hit = false;
    cache.attach(bo, FusionCache::key(spec, 2), &hit);
    auto R = build_regular(G, 2, bo);
    EXPECT_EQ(hit, round == 1);
    if (round == 0) digest = R->F->digest();
    else EXPECT_EQ(R->F->digest(), digest);
  }
  EXPECT_TRUE(fs::exists(cache.path_for(FusionCache::key(spec, 2))));
  const FusionCache off(t.path(), false);
  BuildOptions bo;
  off.attach(bo, "k", nullptr);
  EXPECT_FALSE(static_cast<bool>(bo.load));
}

TEST(Cache, WriteAtomicReplacesContent) {
  TempDir t;
  const fs::path p = t.path() / "a" / "b.txt";
  write_atomic(p, "one");
  write_atomic(p, "two");
  EXPECT_EQ(read_file(p.string()), "two");
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(p.parent_path())) n += e.is_regular_file();
  EXPECT_EQ(n, 1u);
}

TEST(Report, LinesFormat) {
  Report r;
  SubReport s{"x/H0", "order 2", 2, "<(1,2)>", {}};
  CheckRecord a{"group.a.1", "anchor a"};
  a.time_ms = 5;
  CheckRecord b{"group.b.1", "anchor b"};
  b.ok = false;
  b.witness.push_back("w");
  CheckRecord c{"fuzz.mutants", "anchor c"};
  c.skipped = true;
  c.skip_reason = "why";
  s.checks = {a, b, c};
  r.subs.push_back(s);
  EXPECT_EQ(render_lines(r, true),
            "TAP version 13\n"
            "# instance x/H0 group=\"order 2\" p=2 H=\"<(1,2)>\"\n"
            "ok 1 group.a.1 anchor=\"anchor a\" time_ms=5\n"
            "not ok 2 group.b.1 anchor=\"anchor b\" time_ms=0\n"
            "  witness: w\n"
            "ok 3 fuzz.mutants anchor=\"anchor c\" time_ms=0 # SKIP why\n"
            "1..3\n");
  EXPECT_NE(render_lines(r, false).find("time_ms=0\n"), std::string::npos);
  EXPECT_EQ(r.failures(), 1u);
  EXPECT_EQ(r.skipped(), 1u);
  EXPECT_NE(render_text(r).find("summary: 3 checks, 1 passed, 1 failed, 1 skipped"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  SubReport s{"x", "order 2", 2, "<(1,2)>", {}};
  CheckRecord a{"a", "b"};
  a.notes = {"n"};
  a.witness = {"w"};
  a.time_ms = 3;
  s.checks.push_back(a);
  const auto back = nlohmann::json(std::vector<SubReport>{s}).get<std::vector<SubReport>>();
  ASSERT_EQ(back.size(), 1u);
  Report r1, r2;
  r1.subs = {s};
  r2.subs = back;
  EXPECT_EQ(render_lines(r1), render_lines(r2));
}

TEST(Runner, S4AllGivesSevenPassingSubReports) {
  const auto ins = load_manifest(LOCALITY_LAB_CATALOG);
  RunConfig cfg;
  const InstanceRun run = run_instance(find(ins, "s4-all"), cfg, FusionCache("", false));
  ASSERT_FALSE(run.error.has_value()) << run.error_text;
  ASSERT_EQ(run.subs.size(), 7u);
  Report r;
  r.subs = run.subs;
  EXPECT_EQ(r.failures(), 0u) << render_lines(r);
  EXPECT_EQ(run.subs[0].id, "s4-all/H0");
}

TEST(Runner, TrivialGroupPassesVacuously) {
  const auto ins = load_manifest(LOCALITY_LAB_CATALOG);
  const InstanceRun run = run_instance(find(ins, "trivial-group"), RunConfig{}, FusionCache("", false));
  ASSERT_FALSE(run.error.has_value()) << run.error_text;
  ASSERT_EQ(run.subs.size(), 1u);
  Report r;
  r.subs = run.subs;
  EXPECT_EQ(r.failures(), 0u);
  EXPECT_EQ(r.skipped(), 1u);
}

TEST(Runner, DesignatedSubjectMustBeSubnormal) {
  TempDir t;
  write(t.path() / "s4.grp", "degree 4\n2 3 4 1\n2 1 3 4\n");
  write(t.path() / "instances.json",
        R"j({"instances":[{"id":"bad","file":"s4.grp","prime":2,"H":["(1,2)"],"suites":["theoremA"]}]})j");
  const auto ins = load_manifest(t.path());
  const InstanceRun run = run_instance(ins[0], RunConfig{}, FusionCache("", false));
  ASSERT_TRUE(run.error.has_value());
  EXPECT_EQ(*run.error, ErrorKind::InvalidInput);
}

TEST(Runner, PrimeResolution) {
  Instance in;
  in.id = "x";
  GroupSpec spec;
  RunConfig cfg;
  EXPECT_THROW(resolve_prime(in, spec, cfg), LabError);
  spec.prime = 3;
  EXPECT_EQ(resolve_prime(in, spec, cfg), 3);
  in.prime = 2;
  EXPECT_EQ(resolve_prime(in, spec, cfg), 2);
  cfg.prime = 4;
  EXPECT_THROW(resolve_prime(in, spec, cfg), LabError);
}

TEST(Runner, ParallelRunsKeepOrder) {
  const auto all = load_manifest(LOCALITY_LAB_CATALOG);
  std::vector<Instance> ins{find(all, "c2-all"), find(all, "v4-all"), find(all, "a4-all")};
  RunConfig cfg;
  cfg.suites = {"group", "fusion"};
  const auto seq = run_instances(ins, cfg, FusionCache("", false), 1);
  const auto par = run_instances(ins, cfg, FusionCache("", false), 3);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].id, par[i].id);
    Report a, b;
    a.subs = seq[i].subs;
    b.subs = par[i].subs;
    EXPECT_EQ(render_lines(a, false), render_lines(b, false));
  }
}
