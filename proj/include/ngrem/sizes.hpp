#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ngrem/error.hpp"
#include "ngrem/model.hpp"

namespace ngrem {

// Largest total number of spin bits a finite system may have.
inline constexpr int kMaxTotalBits = 62;

// Integer bit counts per group for a finite system of nominal size N.
// Group i holds 2^bits[i] states; the configuration space has 2^n_effective states.
struct SizeAssignment {
  int n_nominal = 0;
  int n_effective = 0;
  std::vector<int> bits;
  // Bit position of group i inside a packed configuration index.
  std::vector<int> offsets;

  // Sum of bits over the groups in A.
  int bits_in(SubsetMask a) const {
    int total = 0;
    for (int g : a.groups()) total += bits[static_cast<std::size_t>(g)];
    return total;
  }
  std::uint64_t configurations() const { return std::uint64_t{1} << n_effective; }
};

// b_i = round(gamma_i N), then repaired until sum b_i = round(N sum gamma_i): the group
// with the largest rounding residue gamma_i N - b_i is incremented, or the one with the
// smallest residue (among b_i > 1) decremented. Residue ties go to the lower index.
inline SizeAssignment assign_sizes(const ModelSpec& m, int n_total) {
  if (n_total < m.n())
    throw Error(ErrorCode::InvalidArgument, "N = " + std::to_string(n_total) + " is smaller than n = " +
                                                std::to_string(m.n()));
  if (n_total > kMaxTotalBits)
    throw Error(ErrorCode::BudgetExceeded, "N = " + std::to_string(n_total) + " exceeds " +
                                               std::to_string(kMaxTotalBits) + " bits");
  constexpr double kResidueTie = 1e-9;
  const auto groups = static_cast<std::size_t>(m.n());
  std::vector<double> target(groups);
  std::vector<int> bits(groups);
  double gamma_total = 0.0;
  for (std::size_t i = 0; i < groups; ++i) {
    target[i] = m.gamma()[i] * n_total;
    bits[i] = static_cast<int>(std::lround(target[i]));
    gamma_total += m.gamma()[i];
  }
  const int wanted = static_cast<int>(std::lround(gamma_total * n_total));
  auto residue = [&](std::size_t i) { return target[i] - bits[i]; };

  int sum = std::accumulate(bits.begin(), bits.end(), 0);
  while (sum < wanted) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < groups; ++i)
      if (residue(i) > residue(pick) + kResidueTie) pick = i;
    ++bits[pick];
    ++sum;
  }
  while (sum > wanted) {
    std::size_t pick = groups;
    for (std::size_t i = 0; i < groups; ++i) {
      if (bits[i] <= 1) continue;
      if (pick == groups || residue(i) < residue(pick) - kResidueTie) pick = i;
    }
    if (pick == groups) break;
    --bits[pick];
    --sum;
  }
  for (std::size_t i = 0; i < groups; ++i)
    if (bits[i] < 1)
      throw Error(ErrorCode::GroupTooSmall,
                  "group " + std::to_string(i + 1) + " gets no spins at N = " + std::to_string(n_total));

  SizeAssignment size;
  size.n_nominal = n_total;
  size.bits = std::move(bits);
  size.offsets.resize(groups);
  int offset = 0;
  for (std::size_t i = 0; i < groups; ++i) {
    size.offsets[i] = offset;
    offset += size.bits[i];
  }
  size.n_effective = offset;
  return size;
}

}  // namespace ngrem
