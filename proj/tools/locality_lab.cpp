// Command-line front end: catalog listing, builds, verification and reports.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "locality_lab/catalog.hpp"

#ifndef LOCALITY_LAB_DEFAULT_CATALOG
#define LOCALITY_LAB_DEFAULT_CATALOG "catalog"
#endif

namespace fs = std::filesystem;
using namespace llab;

namespace {

struct Options {
  std::string catalog = LOCALITY_LAB_DEFAULT_CATALOG;
  std::optional<int> prime;
  std::vector<std::string> suites;
  std::size_t cap_order = 5040;
  std::size_t cap_locality = 4096;
  unsigned jobs = 1;
  bool no_cache = false;
  bool no_timing = false;
  std::string format = "text";
  std::vector<std::string> targets;
};

RunConfig run_config(const Options& o) {
  RunConfig c;
  c.prime = o.prime;
  c.caps.order = o.cap_order;
  c.locality_cap = o.cap_locality;
  c.suites = o.suites;
  return c;
}

FusionCache make_cache(const Options& o) { return FusionCache(default_cache_dir(), !o.no_cache); }

// Targets are instance ids or paths to group files; none means every instance.
std::vector<Instance> select(const Options& o) {
  const bool need_manifest =
      o.targets.empty() || std::any_of(o.targets.begin(), o.targets.end(), [](const std::string& t) {
        return !fs::is_regular_file(t);
      });
  std::vector<Instance> manifest;
  if (need_manifest) manifest = load_manifest(o.catalog);
  if (o.targets.empty()) return manifest;
  std::vector<Instance> out;
  for (const std::string& t : o.targets) {
    if (fs::is_regular_file(t)) {
      out.push_back(instance_for_file(t));
      continue;
    }
    auto it = std::find_if(manifest.begin(), manifest.end(), [&](const Instance& i) { return i.id == t; });
    if (it == manifest.end()) throw LabError(ErrorKind::InvalidInput, "unknown instance " + t);
    out.push_back(*it);
  }
  return out;
}

std::string mode_str(const Instance& in) {
  switch (in.mode) {
    case SubjectMode::All: return "all";
    case SubjectMode::Whole: return "whole";
    case SubjectMode::Generators: {
      std::string s;
      for (const auto& g : in.generators) s += (s.empty() ? "" : ";") + g;
      return s;
    }
  }
  return "";
}

std::string join_list(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

int cmd_list(const Options& o) {
  for (const Instance& in : load_manifest(o.catalog)) {
    std::cout << in.id << "  file=" << fs::path(in.file).filename().string()
              << "  p=" << (in.prime ? std::to_string(*in.prime) : "-") << "  H=" << mode_str(in)
              << "  suites=" << (in.suites.empty() ? "all" : join_list(in.suites)) << "\n";
    if (!in.note.empty()) std::cout << "    " << in.note << "\n";
  }
  return 0;
}

int cmd_build(const Options& o) {
  const RunConfig cfg = run_config(o);
  const FusionCache cache = make_cache(o);
  int status = 0;
  for (const Instance& in : select(o)) {
    try {
      const std::string text = read_file(in.file);
      const GroupSpec spec = parse_group_spec(text);
      const int p = resolve_prime(in, spec, cfg);
      const FiniteGroup G = FiniteGroup::generate(spec.degree, spec.generators, cfg.caps);
      BuildOptions bo;
      bo.locality_cap = cfg.locality_cap;
      bool hit = false;
      cache.attach(bo, FusionCache::key(text, p), &hit);
      auto R = build_regular(G, p, bo);
      const LocalityStructure& st = *R->st;
      std::size_t nd = 0;
      for (char c : R->delta.delta) nd += c != 0;
      std::cout << "instance " << in.id << "\n"
                << "  group: order " << G.order() << ", degree " << G.degree() << ", p = " << p << "\n"
                << "  Sylow S: order " << R->LS->size() << ", " << R->LS->num_subgroups() << " subgroups, "
                << R->F->classes().size() << " F-classes\n"
                << "  F: " << (R->constrained() ? "constrained" : "not constrained") << ", |F^cr| = "
                << R->classes.radical_centric.size() << ", |F^s| = " << R->classes.subcentric.size()
                << ", |delta(F)| = " << nd << "\n"
                << "  locality: |L| = " << R->L->size() << ", " << st.subnormals.size() << " partial subnormals, "
                << st.components.size() << " components, |E(L)| = " << st.E.count()
                << ", |T~| = " << R->LS->order(st.tildeT) << ", |N_L(T~)| = " << R->Gstar.count() << "\n"
                << "  cache: " << (!cache.enabled() ? "off" : hit ? "hit" : "miss") << "\n";
    } catch (const LabError& e) {
      std::cerr << in.id << ": " << e.what() << "\n";
      if (!status) status = static_cast<int>(e.kind());
    }
  }
  return status;
}

fs::path report_path(const FusionCache& cache, const std::string& id) { return cache.dir() / "reports" / (id + ".json"); }

int cmd_verify(const Options& o) {
  const RunConfig cfg = run_config(o);
  const FusionCache cache = make_cache(o);
  const std::vector<Instance> ins = select(o);
  const std::vector<InstanceRun> runs = run_instances(ins, cfg, cache, o.jobs);
  Report rep;
  int error = 0;
  for (const InstanceRun& r : runs) {
    if (r.error) {
      std::cerr << r.id << ": " << r.error_text << "\n";
      if (!error) error = static_cast<int>(*r.error);
      continue;
    }
    for (const SubReport& s : r.subs) rep.subs.push_back(s);
    if (cache.enabled()) write_atomic(report_path(cache, r.id), nlohmann::json(r.subs).dump(1) + "\n");
  }
  std::cout << render(rep, o.format == "lines" ? ReportFormat::Lines : ReportFormat::Text, !o.no_timing);
  if (error) return error;
  return rep.failures() ? static_cast<int>(ErrorKind::Violation) : 0;
}

int cmd_report(const Options& o) {
  const FusionCache cache = make_cache(o);
  std::vector<std::string> ids = o.targets;
  if (ids.empty())
    for (const Instance& in : load_manifest(o.catalog)) ids.push_back(in.id);
  Report rep;
  std::size_t found = 0;
  for (const std::string& id : ids) {
    const fs::path p = report_path(cache, id);
    if (!fs::exists(p)) continue;
    ++found;
    try {
      for (SubReport& s : nlohmann::json::parse(read_file(p.string())).get<std::vector<SubReport>>())
        rep.subs.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw LabError(ErrorKind::Parse, p.string() + ": " + e.what());
    }
  }
  if (!found) throw LabError(ErrorKind::FileError, "no stored reports; run verify first");
  std::cout << render(rep, o.format == "lines" ? ReportFormat::Lines : ReportFormat::Text, !o.no_timing);
  return rep.failures() ? static_cast<int>(ErrorKind::Violation) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular localities and subnormal subsystems of finite groups"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--catalog", o.catalog, "Catalog directory holding instances.json");
  app.add_option("--prime", o.prime, "Prime p, overriding the instance and file")->check(CLI::PositiveNumber);
  app.add_option("--suite", o.suites, "Suites to run (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember(suite_names()));
  app.add_option("--cap-order", o.cap_order, "Largest group order accepted");
  app.add_option("--cap-locality", o.cap_locality, "Largest locality size accepted");
  app.add_option("--jobs", o.jobs, "Instances run concurrently")->check(CLI::PositiveNumber);
  app.add_flag("--no-cache", o.no_cache, "Neither read nor write the cache");
  app.add_flag("--no-timing", o.no_timing, "Print time_ms=0 so reports compare byte for byte");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "lines"}));

  CLI::App* list = app.add_subcommand("list", "List catalog instances");
  CLI::App* build = app.add_subcommand("build", "Build group, fusion system and regular locality");
  build->add_option("targets", o.targets, "Instance ids or group files");
  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("targets", o.targets, "Instance ids or group files");
  CLI::App* report = app.add_subcommand("report", "Print stored reports of earlier verify runs");
  report->add_option("targets", o.targets, "Instance ids");
  // Global options are also accepted after the subcommand.
  for (CLI::App* sub : {list, build, verify, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*list) return cmd_list(o);
    if (*build) return cmd_build(o);
    if (*verify) return cmd_verify(o);
    if (*report) return cmd_report(o);
  } catch (const LabError& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(ErrorKind::FileError);
  }
  return 0;
}
