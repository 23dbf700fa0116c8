#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ngrem {

// Upper bound on the number of coordinate groups n. Lattice sweeps are 2^n.
inline constexpr int kMaxGroups = 24;

// A subset of I = {1, ..., n} stored as a bitmask. Bit i-1 represents group i.
class SubsetMask {
 public:
  using bits_type = std::uint32_t;

  constexpr SubsetMask() noexcept = default;
  constexpr explicit SubsetMask(bits_type bits) noexcept : bits_(bits) {}

  static constexpr SubsetMask full(int n) noexcept {
    return SubsetMask(n >= 32 ? ~bits_type{0} : (bits_type{1} << n) - 1);
  }
  // zero-based group index
  static constexpr SubsetMask single(int group) noexcept {
    return SubsetMask(bits_type{1} << group);
  }

  constexpr bits_type bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr bool contains(int group) const noexcept { return (bits_ >> group) & 1U; }

  constexpr bool subset_of(SubsetMask other) const noexcept {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool strict_subset_of(SubsetMask other) const noexcept {
    return subset_of(other) && bits_ != other.bits_;
  }
  constexpr bool intersects(SubsetMask other) const noexcept {
    return (bits_ & other.bits_) != 0;
  }

  friend constexpr SubsetMask operator|(SubsetMask a, SubsetMask b) noexcept {
    return SubsetMask(a.bits_ | b.bits_);
  }
  friend constexpr SubsetMask operator&(SubsetMask a, SubsetMask b) noexcept {
    return SubsetMask(a.bits_ & b.bits_);
  }
  // set difference a \ b
  friend constexpr SubsetMask operator-(SubsetMask a, SubsetMask b) noexcept {
    return SubsetMask(a.bits_ & ~b.bits_);
  }
  SubsetMask& operator|=(SubsetMask o) noexcept {
    bits_ |= o.bits_;
    return *this;
  }

  friend constexpr auto operator<=>(SubsetMask, SubsetMask) noexcept = default;

  // Sorted one-based indices, the form used in files and reports.
  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (bits_type b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
    return out;
  }

  // Zero-based group indices in increasing order.
  std::vector<int> groups() const {
    std::vector<int> out;
    for (bits_type b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

 private:
  bits_type bits_ = 0;
};

inline std::string to_string(SubsetMask s) {
  std::string out = "{";
  bool first = true;
  for (int i : s.indices()) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  out += '}';
  return out;
}

// Calls f(A) for every A with base ⊊ A ⊆ universe, in increasing order of the
// added bits. base must be a subset of universe.
template <class F>
void for_each_strict_superset(SubsetMask base, SubsetMask universe, F&& f) {
  const auto free_bits = (universe - base).bits();
  // Enumerate nonempty submasks of free_bits in increasing numeric order.
  SubsetMask::bits_type sub = 0;
  do {
    sub = (sub - free_bits) & free_bits;
    if (sub == 0) break;
    f(base | SubsetMask(sub));
  } while (true);
}

// Calls f(A) for every A ⊆ universe, including the empty set.
template <class F>
void for_each_subset(SubsetMask universe, F&& f) {
  const auto bits = universe.bits();
  SubsetMask::bits_type sub = 0;
  do {
    f(SubsetMask(sub));
    sub = (sub - bits) & bits;
  } while (sub != 0);
}

}  // namespace ngrem

template <>
struct std::hash<ngrem::SubsetMask> {
  std::size_t operator()(ngrem::SubsetMask s) const noexcept {
    return std::hash<ngrem::SubsetMask::bits_type>{}(s.bits());
  }
};
