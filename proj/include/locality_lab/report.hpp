#pragma once

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "suites.hpp"

namespace llab {

// Checks for one (instance, H) pair.
struct SubReport {
  std::string id;
  std::string group;    // e.g. "order 24"
  int prime = 0;
  std::string subject;  // generators of H
  std::vector<CheckRecord> checks;
};

struct Report {
  std::vector<SubReport> subs;

  std::size_t count(bool want_ok) const {
    std::size_t n = 0;
    for (const auto& s : subs)
      for (const auto& c : s.checks)
        if (!c.skipped && c.ok == want_ok) ++n;
    return n;
  }
  std::size_t skipped() const {
    std::size_t n = 0;
    for (const auto& s : subs)
      for (const auto& c : s.checks) n += c.skipped;
    return n;
  }
  std::size_t failures() const { return count(false); }
};

enum class ReportFormat { Text, Lines };

namespace detail {
inline std::string quoted(const std::string& s) {
  std::string o = "\"";
  for (char c : s) o += c == '"' ? '\'' : c;
  return o + "\"";
}
}  // namespace detail

// `ok|not ok <seq> <check-id> anchor="..." time_ms=<int>` plus indented
// witness and note lines; instance headers and the plan are comments.
inline std::string render_lines(const Report& r, bool timing = true) {
  std::ostringstream os;
  os << "TAP version 13\n";
  std::size_t seq = 0;
  for (const SubReport& s : r.subs) {
    os << "# instance " << s.id << " group=" << detail::quoted(s.group) << " p=" << s.prime
       << " H=" << detail::quoted(s.subject) << "\n";
    for (const CheckRecord& c : s.checks) {
      os << (c.ok || c.skipped ? "ok " : "not ok ") << ++seq << ' ' << c.id << " anchor=" << detail::quoted(c.anchor)
         << " time_ms=" << (timing ? c.time_ms : 0);
      if (c.skipped) os << " # SKIP " << c.skip_reason;
      os << "\n";
      for (const auto& w : c.witness) os << "  witness: " << w << "\n";
      for (const auto& n : c.notes) os << "  # " << n << "\n";
    }
  }
  os << "1.." << seq << "\n";
  return os.str();
}

inline std::string render_text(const Report& r, bool timing = true) {
  std::ostringstream os;
  for (const SubReport& s : r.subs) {
    os << "instance " << s.id << "  group " << s.group << "  p=" << s.prime << "\n  H = " << s.subject << "\n";
    for (const CheckRecord& c : s.checks) {
      os << "  " << (c.skipped ? "SKIP" : c.ok ? "PASS" : "FAIL") << "  " << c.id << "  [" << c.anchor << "]";
      if (timing) os << "  " << c.time_ms << " ms";
      os << "\n";
      if (c.skipped) os << "        " << c.skip_reason << "\n";
      for (const auto& n : c.notes) os << "        " << n << "\n";
      for (const auto& w : c.witness) os << "        witness: " << w << "\n";
    }
  }
  os << "summary: " << r.count(true) + r.failures() + r.skipped() << " checks, " << r.count(true) << " passed, "
     << r.failures() << " failed, " << r.skipped() << " skipped\n";
  return os.str();
}

inline std::string render(const Report& r, ReportFormat f, bool timing = true) {
  return f == ReportFormat::Lines ? render_lines(r, timing) : render_text(r, timing);
}

// ---------------------------------------------------------------------------
// JSON form, used to store reports between runs.

inline void to_json(nlohmann::json& j, const CheckRecord& c) {
  j = nlohmann::json{{"id", c.id},           {"anchor", c.anchor}, {"ok", c.ok},           {"skipped", c.skipped},
                     {"skip_reason", c.skip_reason}, {"notes", c.notes}, {"witness", c.witness}, {"time_ms", c.time_ms}};
}
inline void from_json(const nlohmann::json& j, CheckRecord& c) {
  j.at("id").get_to(c.id);
  j.at("anchor").get_to(c.anchor);
  j.at("ok").get_to(c.ok);
  j.at("skipped").get_to(c.skipped);
  j.at("skip_reason").get_to(c.skip_reason);
  j.at("notes").get_to(c.notes);
  j.at("witness").get_to(c.witness);
  j.at("time_ms").get_to(c.time_ms);
}
inline void to_json(nlohmann::json& j, const SubReport& s) {
  j = nlohmann::json{{"id", s.id}, {"group", s.group}, {"prime", s.prime}, {"subject", s.subject}, {"checks", s.checks}};
}
inline void from_json(const nlohmann::json& j, SubReport& s) {
  j.at("id").get_to(s.id);
  j.at("group").get_to(s.group);
  j.at("prime").get_to(s.prime);
  j.at("subject").get_to(s.subject);
  j.at("checks").get_to(s.checks);
}

}  // namespace llab
