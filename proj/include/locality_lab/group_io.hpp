#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "group.hpp"

namespace llab {

struct GroupSpec {
  int degree = 0;
  std::optional<int> prime;
  std::vector<Perm> generators;
};

// Grammar: `degree N`, optional `prime p`, then one generator per line as N
// images of 1..N. `#` starts a comment.
inline GroupSpec parse_group_spec(const std::string& text) {
  GroupSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_degree = false;
  auto fail = [&](const std::string& why) {
    throw LabError(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto to_int = [&](const std::string& s) {
      std::size_t used = 0;
      long v = 0;
      try {
        v = std::stol(s, &used);
      } catch (...) {
        fail("expected integer, got '" + s + "'");
      }
      if (used != s.size()) fail("expected integer, got '" + s + "'");
      return v;
    };
    if (!have_degree) {
      if (tok.size() != 2 || tok[0] != "degree") fail("expected 'degree N'");
      long d = to_int(tok[1]);
      if (d < 1) fail("degree must be positive");
      if (d > 64) throw LabError(ErrorKind::DegreeOverflow, "degree " + std::to_string(d) + " > 64");
      spec.degree = static_cast<int>(d);
      have_degree = true;
      continue;
    }
    if (tok[0] == "prime") {
      if (tok.size() != 2 || spec.prime || !spec.generators.empty()) fail("misplaced 'prime' line");
      long p = to_int(tok[1]);
      if (!is_prime(static_cast<int>(p))) fail("prime line does not name a prime");
      spec.prime = static_cast<int>(p);
      continue;
    }
    if (static_cast<int>(tok.size()) != spec.degree) fail("generator must list exactly " + std::to_string(spec.degree) + " images");
    Perm g(spec.degree);
    std::vector<char> hit(spec.degree, 0);
    for (int i = 0; i < spec.degree; ++i) {
      long v = to_int(tok[i]);
      if (v < 1 || v > spec.degree || hit[v - 1]) fail("generator is not a permutation of 1.." + std::to_string(spec.degree));
      hit[v - 1] = 1;
      g[i] = static_cast<uint8_t>(v - 1);
    }
    spec.generators.push_back(std::move(g));
  }
  if (!have_degree) throw LabError(ErrorKind::Parse, "missing 'degree N' line");
  return spec;
}

inline FiniteGroup load_group(const std::string& text, GroupCaps caps = {}) {
  GroupSpec s = parse_group_spec(text);
  return FiniteGroup::generate(s.degree, s.generators, caps);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw LabError(ErrorKind::FileError, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Builds a permutation from 1-based cycles, e.g. {{1,2,3,4},{5,6}}.
inline Perm perm_from_cycles(int degree, const std::vector<std::vector<int>>& cycles) {
  Perm p(degree);
  for (int i = 0; i < degree; ++i) p[i] = static_cast<uint8_t>(i);
  for (const auto& c : cycles)
    for (std::size_t k = 0; k < c.size(); ++k) p[c[k] - 1] = static_cast<uint8_t>(c[(k + 1) % c.size()] - 1);
  return p;
}

inline std::optional<Elem> element_of(const FiniteGroup& G, const Perm& p) {
  if (static_cast<int>(p.size()) != G.degree()) return std::nullopt;
  return G.find(p.data());
}

inline Elem elem_cycles(const FiniteGroup& G, const std::vector<std::vector<int>>& cycles) {
  auto e = element_of(G, perm_from_cycles(G.degree(), cycles));
  if (!e) throw LabError(ErrorKind::InvalidInput, "permutation not in group");
  return *e;
}

}  // namespace llab
