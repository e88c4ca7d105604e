#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "pgroup.hpp"

namespace llab {

constexpr uint32_t kUndef = 0xFFFFFFFFu;

using Word = std::vector<uint32_t>;

// A finite partial group given by oracles over element indices 0..size-1.
class PartialGroupView {
 public:
  virtual ~PartialGroupView() = default;
  virtual std::size_t size() const = 0;
  virtual uint32_t one() const = 0;
  virtual uint32_t inv(uint32_t f) const = 0;
  virtual bool in_domain(std::span<const uint32_t> w) const = 0;
  // Only meaningful for w in the domain.
  virtual uint32_t product(std::span<const uint32_t> w) const = 0;

  virtual bool pair_in_domain(uint32_t a, uint32_t b) const {
    uint32_t w[2] = {a, b};
    return in_domain(w);
  }
  virtual uint32_t pair_product(uint32_t a, uint32_t b) const {
    uint32_t w[2] = {a, b};
    return product(w);
  }
  // x^f, or kUndef when x is not in D(f).
  virtual uint32_t conj(uint32_t x, uint32_t f) const {
    uint32_t w[3] = {inv(f), x, f};
    if (!in_domain(w)) return kUndef;
    return product(w);
  }
  virtual std::string name(uint32_t f) const { return std::to_string(f); }
};

// A partial group with a distinguished p-subgroup S (given as a lattice whose
// local elements correspond to view elements) and object set Delta.
class LocalityView : public PartialGroupView {
 public:
  virtual const PLattice& s_lattice() const = 0;
  virtual uint32_t s_elem(unsigned local) const = 0;  // view index of a local S element
  virtual int s_local(uint32_t f) const = 0;          // -1 when f is not in S
  virtual bool in_delta(SubId P) const = 0;

  // S_f = {x in S : x in D(f), x^f in S}, as a mask.
  virtual uint64_t S_f(uint32_t f) const {
    const PLattice& L = s_lattice();
    uint64_t m = 0;
    for (unsigned x = 0; x < L.size(); ++x) {
      uint32_t y = conj(s_elem(x), f);
      if (y != kUndef && s_local(y) >= 0) m |= mask_bit(x);
    }
    return m;
  }
  // local x^f inside S or 0xFF.
  virtual unsigned s_conj(unsigned x, uint32_t f) const {
    uint32_t y = conj(s_elem(x), f);
    if (y == kUndef) return 0xFF;
    int l = s_local(y);
    return l < 0 ? 0xFF : static_cast<unsigned>(l);
  }
  // S_w computed right to left.
  virtual uint64_t S_w(std::span<const uint32_t> w) const {
    const PLattice& L = s_lattice();
    uint64_t X = L.full_mask();
    for (std::size_t i = w.size(); i-- > 0;) {
      uint64_t nx = 0;
      for (unsigned x = 0; x < L.size(); ++x) {
        unsigned y = s_conj(x, w[i]);
        if (y != 0xFF && (X & mask_bit(y))) nx |= mask_bit(x);
      }
      X = nx;
    }
    return X;
  }
  bool delta_mask(uint64_t m) const {
    SubId id = s_lattice().id_of(m);
    return id != kNoSub && in_delta(id);
  }
};

// ---------------------------------------------------------------------------
// Axiom checks.

struct AxiomReport {
  bool ok = true;
  std::string axiom;
  std::string witness;
  std::size_t words_checked = 0;

  void fail(const std::string& ax, const std::string& w) {
    if (!ok) return;
    ok = false;
    axiom = ax;
    witness = w;
  }
};

inline std::string word_str(const PartialGroupView& pg, std::span<const uint32_t> w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += pg.name(w[i]);
  }
  return s + ")";
}

struct CheckBudget {
  std::size_t exhaustive_words = 400000;  // cap on words of the deepest exhaustive length
  unsigned max_exhaustive_len = 4;
  std::size_t random_words = 2000;
  unsigned random_len = 6;
  uint64_t seed = 0x5eed;
};

namespace detail {

// Checks axioms (2), (3), (4) on one domain word.
inline void check_word(const PartialGroupView& pg, const Word& w, AxiomReport& r) {
  const std::size_t n = w.size();
  const uint32_t pw = pg.product(w);
  // (2) prefixes and suffixes
  for (std::size_t k = 1; k < n; ++k) {
    std::span<const uint32_t> u(w.data(), k), v(w.data() + k, n - k);
    if (!pg.in_domain(u) || !pg.in_domain(v)) {
      r.fail("axiom 2", word_str(pg, w) + " in D but split at " + std::to_string(k) + " is not");
      return;
    }
  }
  // (3) contraction of every infix
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b) {
      if (b - a == 1 && n == 1) continue;
      Word c(w.begin(), w.begin() + a);
      c.push_back(pg.product(std::span<const uint32_t>(w.data() + a, b - a)));
      c.insert(c.end(), w.begin() + b, w.end());
      if (!pg.in_domain(c)) {
        r.fail("axiom 3", word_str(pg, w) + " contracts to " + word_str(pg, c) + " outside D");
        return;
      }
      if (pg.product(c) != pw) {
        r.fail("axiom 3", word_str(pg, w) + " and " + word_str(pg, c) + " have different products");
        return;
      }
    }
  // (4) inverse word
  Word iw;
  for (std::size_t i = n; i-- > 0;) iw.push_back(pg.inv(w[i]));
  iw.insert(iw.end(), w.begin(), w.end());
  if (!pg.in_domain(iw) || pg.product(iw) != pg.one()) {
    r.fail("axiom 4", word_str(pg, iw) + " not in D or product is not One");
    return;
  }
}

template <class F>
inline void for_each_word(std::size_t m, unsigned len, F&& f) {
  Word w(len, 0);
  if (len == 0) {
    f(w);
    return;
  }
  while (true) {
    if (!f(w)) return;
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (++w[i] < m) break;
      w[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace detail

// Chermak's axioms on all words up to the exhaustive length allowed by the
// budget, plus random products of domain words.
inline AxiomReport check_partial_group(const PartialGroupView& pg, const CheckBudget& budget = {}) {
  AxiomReport r;
  const std::size_t m = pg.size();
  if (m == 0) {
    r.fail("axiom 1", "empty element set");
    return r;
  }
  // (1) length-one words and inversion
  {
    Word e;
    if (!pg.in_domain(e) || pg.product(e) != pg.one()) r.fail("axiom 1", "empty word");
  }
  for (uint32_t f = 0; f < m && r.ok; ++f) {
    uint32_t w[1] = {f};
    if (!pg.in_domain(w)) r.fail("axiom 1", word_str(pg, w) + " not in D");
    else if (pg.product(w) != f) r.fail("axiom 1", "product of " + word_str(pg, w) + " is " + pg.name(pg.product(w)));
    else if (pg.inv(f) >= m || pg.inv(pg.inv(f)) != f) r.fail("inversion", pg.name(f) + " inverse is not involutory");
  }
  if (!r.ok) return r;
  unsigned maxlen = 1;
  std::size_t total = m;
  while (maxlen < budget.max_exhaustive_len && total * m <= budget.exhaustive_words) {
    total *= m;
    ++maxlen;
  }
  for (unsigned len = 1; len <= maxlen && r.ok; ++len) {
    detail::for_each_word(m, len, [&](const Word& w) {
      if (pg.in_domain(w)) {
        ++r.words_checked;
        detail::check_word(pg, w, r);
      }
      return r.ok;
    });
  }
  // random longer words built by extending domain words
  std::mt19937_64 rng(budget.seed);
  for (std::size_t t = 0; t < budget.random_words && r.ok; ++t) {
    Word w;
    unsigned target = 2 + static_cast<unsigned>(rng() % (budget.random_len - 1));
    for (unsigned tries = 0; w.size() < target && tries < 4 * target; ++tries) {
      w.push_back(static_cast<uint32_t>(rng() % m));
      if (!pg.in_domain(w)) w.pop_back();
    }
    if (w.size() <= maxlen) continue;
    ++r.words_checked;
    detail::check_word(pg, w, r);
  }
  return r;
}

// Locality axioms: Delta overgroup- and conjugation-closed, D = D_Delta on
// the words examined, and S Sylow in N_L(S). Cheap structural checks run
// before the word-level partial group axioms.
inline AxiomReport check_locality(const LocalityView& loc, const CheckBudget& budget = {}) {
  AxiomReport r;
  const PLattice& L = loc.s_lattice();
  const SubId S = L.top();
  const std::size_t m = loc.size();
  for (unsigned x = 0; x < L.size() && r.ok; ++x)
    for (unsigned y = 0; y < L.size(); ++y) {
      uint32_t a = loc.s_elem(x), b = loc.s_elem(y);
      if (!loc.pair_in_domain(a, b) || loc.pair_product(a, b) != loc.s_elem(L.mul(x, y))) {
        r.fail("S is a subgroup", word_str(loc, std::vector<uint32_t>{a, b}));
        break;
      }
    }
  if (!r.ok) return r;
  if (!loc.in_delta(S)) r.fail("Delta", "S not in Delta");
  for (SubId P = 0; P < L.num_subgroups() && r.ok; ++P) {
    if (!loc.in_delta(P)) continue;
    for (SubId Q = 0; Q < L.num_subgroups(); ++Q)
      if (L.le(P, Q) && !loc.in_delta(Q)) {
        r.fail("Delta overgroup-closed", mask_str(L, P) + " in Delta but overgroup " + mask_str(L, Q) + " is not");
        break;
      }
  }
  if (!r.ok) return r;
  std::vector<uint64_t> sf(m);
  for (uint32_t f = 0; f < m; ++f) sf[f] = loc.S_f(f);
  for (SubId P = 0; P < L.num_subgroups() && r.ok; ++P) {
    if (!loc.in_delta(P)) continue;
    const uint64_t pm = L.mask(P);
    for (uint32_t f = 0; f < m; ++f) {
      if (pm & ~sf[f]) continue;
      uint64_t im = 0;
      for_each_bit(pm, [&](unsigned x) { im |= mask_bit(loc.s_conj(x, f)); });
      if (!loc.delta_mask(im)) {
        r.fail("Delta conjugation-closed", mask_str(L, P) + " conjugated by " + loc.name(f) + " leaves Delta");
        break;
      }
    }
  }
  if (!r.ok) return r;
  auto d_check = [&](const Word& w) {
    bool d = loc.in_domain(w);
    bool dd = loc.delta_mask(loc.S_w(w));
    if (d != dd) r.fail("D = D_Delta", word_str(loc, w) + (d ? " in D but S_w not in Delta" : " has S_w in Delta but is not in D"));
    return r.ok;
  };
  unsigned maxlen = 1;
  std::size_t total = m;
  while (maxlen < 3 && total * m <= budget.exhaustive_words) {
    total *= m;
    ++maxlen;
  }
  for (unsigned len = 1; len <= std::min(maxlen, 2u) && r.ok; ++len) detail::for_each_word(m, len, d_check);
  if (!r.ok) return r;
  AxiomReport pg = check_partial_group(loc, budget);
  if (!pg.ok) return pg;
  r.words_checked = pg.words_checked;
  for (unsigned len = 3; len <= maxlen && r.ok; ++len) detail::for_each_word(m, len, d_check);
  std::mt19937_64 rng(budget.seed ^ 0x9e3779b97f4a7c15ull);
  for (std::size_t t = 0; t < budget.random_words && r.ok; ++t) {
    Word w(2 + rng() % 4);
    for (auto& x : w) x = static_cast<uint32_t>(rng() % m);
    d_check(w);
  }
  if (!r.ok) return r;
  std::size_t nls = 0;
  for (uint32_t f = 0; f < m; ++f)
    if (sf[f] == L.full_mask()) {
      uint64_t im = 0;
      for_each_bit(L.full_mask(), [&](unsigned x) { im |= mask_bit(loc.s_conj(x, f)); });
      if (im == L.full_mask()) ++nls;
    }
  if (p_part(nls, L.prime()) != L.size())
    r.fail("S maximal", "|N_L(S)| = " + std::to_string(nls) + " has larger p-part than |S|");
  return r;
}

// ---------------------------------------------------------------------------
// Fault injection.

enum class MutationKind { ProductPair, ProductSingle, Inverse, DropPair, AddPair, DropDelta, ProductTriple };

inline const char* mutation_name(MutationKind k) {
  switch (k) {
    case MutationKind::ProductPair: return "product-pair";
    case MutationKind::ProductSingle: return "product-single";
    case MutationKind::Inverse: return "inverse";
    case MutationKind::DropPair: return "drop-pair";
    case MutationKind::AddPair: return "add-pair";
    case MutationKind::DropDelta: return "drop-delta";
    case MutationKind::ProductTriple: return "product-triple";
  }
  return "?";
}

struct Mutation {
  MutationKind kind = MutationKind::ProductPair;
  Word word;              // affected word
  uint32_t value = 0;     // new product / inverse
  SubId delta_sub = 0;    // for DropDelta
};

// A locality with one local corruption.
class MutantLocality : public LocalityView {
 public:
  MutantLocality(const LocalityView& base, Mutation m) : b_(&base), m_(std::move(m)) {}

  std::size_t size() const override { return b_->size(); }
  uint32_t one() const override { return b_->one(); }
  uint32_t inv(uint32_t f) const override {
    if (m_.kind == MutationKind::Inverse && f == m_.word[0]) return m_.value;
    return b_->inv(f);
  }
  bool in_domain(std::span<const uint32_t> w) const override {
    if (hit(w)) {
      if (m_.kind == MutationKind::DropPair) return false;
      if (m_.kind == MutationKind::AddPair) return true;
    }
    return b_->in_domain(w);
  }
  uint32_t product(std::span<const uint32_t> w) const override {
    if (hit(w)) {
      switch (m_.kind) {
        case MutationKind::ProductPair:
        case MutationKind::ProductSingle:
        case MutationKind::ProductTriple:
        case MutationKind::AddPair:
          return m_.value;
        default:
          break;
      }
    }
    return b_->product(w);
  }
  std::string name(uint32_t f) const override { return b_->name(f); }
  const PLattice& s_lattice() const override { return b_->s_lattice(); }
  uint32_t s_elem(unsigned x) const override { return b_->s_elem(x); }
  int s_local(uint32_t f) const override { return b_->s_local(f); }
  bool in_delta(SubId P) const override {
    if (m_.kind == MutationKind::DropDelta && P == m_.delta_sub) return false;
    return b_->in_delta(P);
  }
  const Mutation& mutation() const { return m_; }

 private:
  bool hit(std::span<const uint32_t> w) const {
    return m_.kind != MutationKind::Inverse && m_.kind != MutationKind::DropDelta && w.size() == m_.word.size() &&
           std::equal(w.begin(), w.end(), m_.word.begin());
  }
  const LocalityView* b_;
  Mutation m_;
};

// Draws a mutation that provably breaks an axiom of `base`.
inline Mutation random_mutation(const LocalityView& base, std::mt19937_64& rng) {
  const uint32_t m = static_cast<uint32_t>(base.size());
  if (m < 2) throw LabError(ErrorKind::InvalidInput, "a one-element locality has no mutations");
  auto pick = [&]() { return static_cast<uint32_t>(rng() % m); };
  auto other = [&](uint32_t not_this) {
    uint32_t v = pick();
    if (v == not_this) v = (v + 1) % m;
    return v;
  };
  const PLattice& L = base.s_lattice();
  for (;;) {
    Mutation mu;
    mu.kind = static_cast<MutationKind>(rng() % 7);
    switch (mu.kind) {
      case MutationKind::ProductPair:
      case MutationKind::DropPair: {
        uint32_t a = pick(), b = pick();
        if (!base.pair_in_domain(a, b)) continue;
        mu.word = {a, b};
        mu.value = other(base.pair_product(a, b));
        return mu;
      }
      case MutationKind::ProductSingle: {
        uint32_t a = pick();
        mu.word = {a};
        mu.value = other(a);
        return mu;
      }
      case MutationKind::Inverse: {
        if (m < 2) continue;
        uint32_t a = pick();
        mu.word = {a};
        mu.value = other(base.inv(a));
        return mu;
      }
      case MutationKind::AddPair: {
        uint32_t a = pick(), b = pick();
        if (base.pair_in_domain(a, b)) continue;
        mu.word = {a, b};
        mu.value = pick();
        return mu;
      }
      case MutationKind::DropDelta: {
        std::vector<SubId> cand;
        for (SubId P = 1; P < L.num_subgroups(); ++P) {
          if (!base.in_delta(P)) continue;
          for (SubId Q = 0; Q < P; ++Q)
            if (L.le(Q, P) && base.in_delta(Q)) {
              cand.push_back(P);
              break;
            }
        }
        if (cand.empty()) continue;
        mu.delta_sub = cand[rng() % cand.size()];
        return mu;
      }
      case MutationKind::ProductTriple: {
        uint32_t w[3] = {pick(), pick(), pick()};
        if (!base.in_domain(w)) continue;
        mu.word = {w[0], w[1], w[2]};
        mu.value = other(base.product(w));
        return mu;
      }
    }
  }
}

}  // namespace llab
