#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace llab {

// Dynamic bitset used for subsets of groups and partial groups.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t universe() const { return n_; }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }
  bool none() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }
  bool subset_of(const Bits& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  Bits& operator&=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  Bits& operator|=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
  friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const Bits& o) const { return !(*this == o); }

  // Canonical order: compare the sorted member lists lexicographically.
  bool canon_less(const Bits& o) const {
    std::size_t a = first(), b = o.first();
    while (a < n_ && b < o.n_) {
      if (a != b) return a < b;
      a = next(a);
      b = o.next(b);
    }
    return a >= n_ && b < o.n_;
  }

  std::size_t first() const { return next_from(0); }
  std::size_t next(std::size_t i) const { return next_from(i + 1); }
  std::size_t next_from(std::size_t i) const {
    if (i >= n_) return n_;
    std::size_t k = i >> 6;
    uint64_t w = w_[k] & (~uint64_t{0} << (i & 63));
    while (true) {
      if (w) return std::min(n_, (k << 6) + std::countr_zero(w));
      if (++k >= w_.size()) return n_;
      w = w_[k];
    }
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      uint64_t w = w_[k];
      while (w) {
        f((k << 6) + std::countr_zero(w));
        w &= w - 1;
      }
    }
  }
  std::vector<uint32_t> members() const {
    std::vector<uint32_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(static_cast<uint32_t>(i)); });
    return out;
  }

  const std::vector<uint64_t>& words() const { return w_; }
  std::size_t hash() const {
    uint64_t h = 1469598103934665603ull ^ n_;
    for (auto w : w_) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const { return b.hash(); }
};

inline uint64_t mask_bit(unsigned i) { return uint64_t{1} << i; }

template <class F>
inline void for_each_bit(uint64_t m, F&& f) {
  while (m) {
    f(static_cast<unsigned>(std::countr_zero(m)));
    m &= m - 1;
  }
}

}  // namespace llab
