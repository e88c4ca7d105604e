#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "report.hpp"

namespace llab {

// ---------------------------------------------------------------------------
// Instances.

enum class SubjectMode { Whole, All, Generators };

struct Instance {
  std::string id;
  std::string file;  // resolved path
  std::optional<int> prime;
  SubjectMode mode = SubjectMode::All;
  std::vector<std::string> generators;  // cycle notation, for SubjectMode::Generators
  std::vector<std::string> suites;      // empty: every suite
  std::string note;
};

// "(1,2,3)(4,5)" or "(1 2 3)(4 5)" as an element of G.
inline Elem parse_cycles(const FiniteGroup& G, const std::string& text) {
  std::vector<std::vector<int>> cycles;
  std::vector<int> cur;
  bool open = false;
  std::string num;
  auto flush = [&]() {
    if (num.empty()) return;
    int v = std::stoi(num);
    if (v < 1 || v > G.degree()) throw LabError(ErrorKind::Parse, "point " + num + " outside 1.." + std::to_string(G.degree()));
    cur.push_back(v);
    num.clear();
  };
  for (char ch : text) {
    if (ch == '(') {
      if (open) throw LabError(ErrorKind::Parse, "nested cycle in '" + text + "'");
      open = true;
    } else if (ch == ')') {
      if (!open) throw LabError(ErrorKind::Parse, "unbalanced ')' in '" + text + "'");
      flush();
      std::vector<int> sorted = cur;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw LabError(ErrorKind::Parse, "repeated point in '" + text + "'");
      cycles.push_back(cur);
      cur.clear();
      open = false;
    } else if (ch >= '0' && ch <= '9') {
      if (!open) throw LabError(ErrorKind::Parse, "digit outside a cycle in '" + text + "'");
      num += ch;
    } else if (ch == ',' || ch == ' ') {
      flush();
    } else {
      throw LabError(ErrorKind::Parse, std::string("unexpected '") + ch + "' in '" + text + "'");
    }
  }
  if (open) throw LabError(ErrorKind::Parse, "unterminated cycle in '" + text + "'");
  std::vector<char> seen(G.degree() + 1, 0);
  for (const auto& c : cycles)
    for (int v : c) {
      if (seen[v]) throw LabError(ErrorKind::Parse, "cycles of '" + text + "' are not disjoint");
      seen[v] = 1;
    }
  auto e = element_of(G, perm_from_cycles(G.degree(), cycles));
  if (!e) throw LabError(ErrorKind::InvalidInput, "'" + text + "' is not an element of the group");
  return *e;
}

// Manifest `instances.json` in a catalog directory.
inline std::vector<Instance> load_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / "instances.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw LabError(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  std::vector<Instance> out;
  std::set<std::string> ids;
  try {
    for (const auto& e : j.at("instances")) {
      Instance in;
      in.id = e.at("id").get<std::string>();
      if (!ids.insert(in.id).second) throw LabError(ErrorKind::InvalidInput, "duplicate instance id " + in.id);
      in.file = (dir / e.at("file").get<std::string>()).string();
      if (!std::filesystem::exists(in.file)) throw LabError(ErrorKind::FileError, in.id + ": missing file " + in.file);
      if (e.contains("prime")) in.prime = e.at("prime").get<int>();
      const auto& h = e.contains("H") ? e.at("H") : nlohmann::json("all");
      if (h.is_string() && h == "all") in.mode = SubjectMode::All;
      else if (h.is_string() && h == "whole") in.mode = SubjectMode::Whole;
      else if (h.is_array()) {
        in.mode = SubjectMode::Generators;
        in.generators = h.get<std::vector<std::string>>();
      } else {
        throw LabError(ErrorKind::Parse, in.id + ": H must be \"all\", \"whole\" or a generator list");
      }
      if (e.contains("suites")) in.suites = e.at("suites").get<std::vector<std::string>>();
      for (const auto& s : in.suites)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
          throw LabError(ErrorKind::InvalidInput, in.id + ": unknown suite " + s);
      if (e.contains("note")) in.note = e.at("note").get<std::string>();
      out.push_back(std::move(in));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LabError(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  std::sort(out.begin(), out.end(), [](const Instance& a, const Instance& b) { return a.id < b.id; });
  return out;
}

// Ad hoc instance for a group file given on the command line.
inline Instance instance_for_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw LabError(ErrorKind::FileError, "cannot open " + path);
  Instance in;
  in.id = std::filesystem::path(path).stem().string();
  in.file = path;
  return in;
}

// ---------------------------------------------------------------------------
// Content-addressed cache of the subgroup lattice of S and F_S(G).

inline std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::filesystem::path default_cache_dir() {
  if (const char* e = std::getenv("LOCALITY_LAB_CACHE"); e && *e) return e;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "locality-lab";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "locality-lab";
  return ".locality-lab-cache";
}

// Writes via a temporary file and rename, so readers never see partial data.
inline void write_atomic(const std::filesystem::path& path, const std::string& data) {
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmpname;
  tmpname << path.filename().string() << ".tmp." << std::hex << std::random_device{}() << std::random_device{}();
  const std::filesystem::path tmp = path.parent_path() / tmpname.str();
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw LabError(ErrorKind::FileError, "cannot write " + tmp.string());
    f << data;
    if (!f.flush()) throw LabError(ErrorKind::FileError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string lattice_text(const PLattice& L) {
  std::ostringstream os;
  os << "elements";
  for (unsigned x = 0; x < L.size(); ++x) os << ' ' << L.ambient(x);
  os << "\nsubgroups " << L.num_subgroups() << "\n";
  for (SubId s = 0; s < L.num_subgroups(); ++s) os << std::hex << L.mask(s) << std::dec << "\n";
  return os.str();
}

inline std::string ids_line(const std::string& tag, const std::vector<SubId>& v) {
  std::string s = tag;
  for (SubId x : v) s += " " + std::to_string(x);
  return s + "\n";
}

inline std::string serialize_fusion_data(const PLattice& L, const FusionData& d) {
  std::ostringstream os;
  os << "locality-lab cache 1\n[lattice]\n" << lattice_text(L) << "[classes]\n";
  os << ids_line("centric", d.classes.centric) << ids_line("radical_centric", d.classes.radical_centric)
     << ids_line("subcentric", d.classes.subcentric);
  os << "op " << d.classes.O_p << "\nz " << d.classes.Z << "\nconstrained " << d.classes.constrained << "\n";
  os << "[fusion]\n" << d.F.digest();
  return os.str();
}

// Parses cached data, or nullopt when it does not match the lattice.
inline std::optional<FusionData> parse_fusion_data(const PLattice& L, const std::string& text) {
  const std::string lat = "[lattice]\n", cls = "[classes]\n", fus = "[fusion]\n";
  const auto a = text.find(lat), b = text.find(cls), c = text.find(fus);
  if (text.rfind("locality-lab cache 1\n", 0) != 0 || a == std::string::npos || b == std::string::npos ||
      c == std::string::npos || !(a < b && b < c))
    return std::nullopt;
  if (text.substr(a + lat.size(), b - a - lat.size()) != lattice_text(L)) return std::nullopt;
  FusionData d;
  std::istringstream in(text.substr(b + cls.size(), c - b - cls.size()));
  auto read_ids = [&](const std::string& tag, std::vector<SubId>& v) {
    std::string line, t;
    if (!std::getline(in, line)) return false;
    std::istringstream ls(line);
    if (!(ls >> t) || t != tag) return false;
    for (long x; ls >> x;) {
      if (x < 0 || static_cast<std::size_t>(x) >= L.num_subgroups()) return false;
      v.push_back(static_cast<SubId>(x));
    }
    return true;
  };
  if (!read_ids("centric", d.classes.centric) || !read_ids("radical_centric", d.classes.radical_centric) ||
      !read_ids("subcentric", d.classes.subcentric))
    return std::nullopt;
  std::string t;
  long op = -1, z = -1;
  int con = -1;
  if (!(in >> t >> op) || t != "op" || !(in >> t >> z) || t != "z" || !(in >> t >> con) || t != "constrained")
    return std::nullopt;
  if (op < 0 || z < 0 || static_cast<std::size_t>(op) >= L.num_subgroups() ||
      static_cast<std::size_t>(z) >= L.num_subgroups() || (con != 0 && con != 1))
    return std::nullopt;
  d.classes.O_p = static_cast<SubId>(op);
  d.classes.Z = static_cast<SubId>(z);
  d.classes.constrained = con == 1;
  try {
    d.F = FusionSystem::from_digest(L, text.substr(c + fus.size()));
  } catch (const LabError&) {
    return std::nullopt;
  }
  return d;
}

class FusionCache {
 public:
  FusionCache(std::filesystem::path dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

  static std::string key(const std::string& spec_text, int p) {
    return fnv1a_hex("group-spec\n" + spec_text + "\nprime " + std::to_string(p) + "\n");
  }
  bool enabled() const { return enabled_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const { return dir_ / "fusion" / (key + ".txt"); }

  // Hooks for build_regular; `hit` records whether the load succeeded.
  void attach(BuildOptions& opt, const std::string& key, bool* hit) const {
    if (!enabled_) return;
    const std::filesystem::path p = path_for(key);
    opt.load = [p, hit](const PLattice& L) -> std::optional<FusionData> {
      if (!std::filesystem::exists(p)) return std::nullopt;
      auto d = parse_fusion_data(L, read_file(p.string()));
      if (d && hit) *hit = true;
      return d;
    };
    opt.store = [p](const PLattice& L, const FusionData& d) { write_atomic(p, serialize_fusion_data(L, d)); };
  }

 private:
  std::filesystem::path dir_;
  bool enabled_;
};

// ---------------------------------------------------------------------------
// Running an instance.

struct RunConfig {
  std::optional<int> prime;
  GroupCaps caps{};
  std::size_t locality_cap = 4096;
  std::vector<std::string> suites;  // overrides the instance's list when non-empty
  SuiteOptions options{};
};

struct InstanceRun {
  std::string id;
  std::vector<SubReport> subs;
  bool cache_hit = false;
  std::optional<ErrorKind> error;
  std::string error_text;
};

inline std::vector<std::string> effective_suites(const Instance& in, const RunConfig& cfg) {
  const std::vector<std::string>& s = !cfg.suites.empty() ? cfg.suites : in.suites;
  if (s.empty()) return suite_names();
  std::vector<std::string> out;
  for (const auto& n : suite_names())
    if (std::find(s.begin(), s.end(), n) != s.end()) out.push_back(n);
  return out;
}

inline int resolve_prime(const Instance& in, const GroupSpec& spec, const RunConfig& cfg) {
  int p = cfg.prime ? *cfg.prime : in.prime ? *in.prime : spec.prime ? *spec.prime : 0;
  if (p == 0) throw LabError(ErrorKind::InvalidInput, in.id + ": no prime given");
  if (!is_prime(p)) throw LabError(ErrorKind::InvalidInput, in.id + ": " + std::to_string(p) + " is not prime");
  return p;
}

inline InstanceRun run_instance(const Instance& in, const RunConfig& cfg, const FusionCache& cache) {
  InstanceRun run;
  run.id = in.id;
  try {
    const std::string text = read_file(in.file);
    const GroupSpec spec = parse_group_spec(text);
    const int p = resolve_prime(in, spec, cfg);
    const FiniteGroup G = FiniteGroup::generate(spec.degree, spec.generators, cfg.caps);
    BuildOptions bo;
    bo.locality_cap = cfg.locality_cap;
    cache.attach(bo, FusionCache::key(text, p), &run.cache_hit);
    InstanceState S(G, p, build_regular(G, p, bo));
    const RegularBuild& R = S.build();
    const SubLocality& L = *R.L;

    std::vector<Bits> subjects;
    if (in.mode == SubjectMode::All) {
      for (const auto& e : R.st->subnormals) subjects.push_back(e.set);
    } else if (in.mode == SubjectMode::Whole) {
      subjects.push_back(L.all());
    } else {
      Bits seed(L.size());
      for (const auto& g : in.generators) {
        uint32_t v = L.from_ambient(parse_cycles(G, g));
        if (v == kUndef) throw LabError(ErrorKind::InvalidInput, in.id + ": generator " + g + " not in L");
        seed.set(v);
      }
      Bits H = partial_closure(L, seed);
      bool found = false;
      for (const auto& e : R.st->subnormals) found |= e.set == H;
      if (!found) throw LabError(ErrorKind::InvalidInput, in.id + ": designated H is not partial subnormal");
      subjects.push_back(H);
    }

    const std::vector<std::string> suites = effective_suites(in, cfg);
    const SuiteOptions& opt = cfg.options;
    for (std::size_t k = 0; k < subjects.size(); ++k) {
      const Bits& H = subjects[k];
      SubReport sr;
      sr.id = in.mode == SubjectMode::All ? in.id + "/H" + std::to_string(k) : in.id;
      sr.group = "order " + std::to_string(G.order());
      sr.prime = p;
      sr.subject = partial_set_name(L, H);
      auto append = [&](std::vector<CheckRecord> v) {
        for (auto& c : v) sr.checks.push_back(std::move(c));
      };
      for (const std::string& s : suites) {
        if (is_instance_suite(s) && k != 0) continue;
        if (s == "group") append(suite_group(G, p));
        else if (s == "fusion") append(suite_fusion(R));
        else if (s == "locality") append(suite_locality(R, opt));
        else if (s == "bijection") append(suite_bijection(S));
        else if (s == "fuzz") append(suite_fuzz(R, opt));
        else if (s == "theoremA") append(suite_theoremA(S, H, opt, sr.subject));
        else if (s == "normalizer") append(suite_normalizer(S, H, sr.subject));
        else if (s == "centralizer") append(suite_centralizer(S, H, opt, sr.subject));
        else if (s == "conjugates") append(suite_conjugates(S, H, sr.subject));
        else if (s == "er") append(suite_er(S, H, opt, sr.subject));
      }
      run.subs.push_back(std::move(sr));
    }
  } catch (const LabError& e) {
    run.error = e.kind();
    run.error_text = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    run.error = ErrorKind::FileError;
    run.error_text = e.what();
  }
  return run;
}

// Runs instances on `jobs` worker threads; results keep the input order.
inline std::vector<InstanceRun> run_instances(const std::vector<Instance>& ins, const RunConfig& cfg,
                                              const FusionCache& cache, unsigned jobs) {
  std::vector<InstanceRun> out(ins.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < ins.size();) out[i] = run_instance(ins[i], cfg, cache);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ins.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace llab
