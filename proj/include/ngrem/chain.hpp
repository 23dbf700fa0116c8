#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "ngrem/error.hpp"
#include "ngrem/model.hpp"
#include "ngrem/subset.hpp"

namespace ngrem {

// Relative tolerance under which two finite rho values count as a tie.
inline constexpr double kTieTolerance = 1e-9;
// Largest n accepted by enumerate_chains / for_each_chain.
inline constexpr int kEnumerationCap = 10;

inline constexpr double kLog2 = std::numbers::ln2;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Arithmetic {
  floating,  // double precision, ties within kTieTolerance
  exact,     // rational arithmetic on the model's exact values, ties exact
};

// A strictly increasing sequence of subsets, empty set first and I last.
struct Chain {
  std::vector<SubsetMask> sets;
  // Thresholds beta_1 < ... < beta_K, present only on chains from build_optimal_chain.
  std::vector<double> betas;
  // Per-level weight increments, sets[j] relative to sets[j-1], j = 1..K.
  std::vector<double> hat_a;
  std::vector<double> hat_gamma;

  std::size_t levels() const noexcept { return sets.empty() ? 0 : sets.size() - 1; }
  bool has_betas() const noexcept { return !betas.empty(); }
};

// Checks the chain shape against the model and fills hat_a / hat_gamma.
inline Chain make_chain(const ModelSpec& m, std::vector<SubsetMask> sets) {
  if (sets.size() < 2 || !sets.front().empty() || sets.back() != m.universe())
    throw Error(ErrorCode::InvalidChain, "a chain must run from the empty set to I");
  Chain c;
  for (std::size_t j = 1; j < sets.size(); ++j) {
    if (!sets[j - 1].strict_subset_of(sets[j]))
      throw Error(ErrorCode::InvalidChain, "chain sets must be strictly increasing at level " + std::to_string(j));
    c.hat_a.push_back(alpha_increment(m, sets[j - 1], sets[j]));
    c.hat_gamma.push_back(gamma_increment(m, sets[j - 1], sets[j]));
  }
  c.sets = std::move(sets);
  return c;
}

// rho(B, A) = sqrt(2 log 2 (gamma(A) - gamma(B)) / (alpha(A) - alpha(B))), +inf when
// no stored subset lies in A but not in B.
inline double rho(const ModelSpec& m, SubsetMask b, SubsetMask a) {
  if (!b.strict_subset_of(a) || !a.subset_of(m.universe()))
    throw Error(ErrorCode::NotStrictSuperset, to_string(a) + " is not a strict superset of " + to_string(b));
  const double dalpha = alpha_increment(m, b, a);
  if (dalpha == 0.0) return kInfinity;
  return std::sqrt(2.0 * kLog2 * gamma_increment(m, b, a) / dalpha);
}

struct RhoHat {
  double value = kInfinity;
  // Every strict superset attaining the minimum, in increasing mask order.
  std::vector<SubsetMask> minimizers;
};

namespace detail {

// The lattice quantities needed by the rho sweep, in either arithmetic.
template <class T>
struct LatticeView {
  SubsetMask universe;
  std::vector<T> gamma;
  std::vector<std::pair<SubsetMask, T>> weights;

  T gamma_increment(SubsetMask b, SubsetMask a) const {
    return sum_over_groups<T>(std::span<const T>(gamma), a - b);
  }
};

inline LatticeView<double> floating_view(const ModelSpec& m) {
  LatticeView<double> v{m.universe(), {m.gamma().begin(), m.gamma().end()}, {}};
  for (const auto& w : m.weights()) v.weights.emplace_back(w.subset, w.a);
  return v;
}

inline LatticeView<Rational> exact_view(const ModelSpec& m) {
  LatticeView<Rational> v{m.universe(), {m.exact_gamma().begin(), m.exact_gamma().end()}, {}};
  for (std::size_t k = 0; k < m.num_weights(); ++k)
    v.weights.emplace_back(m.weights()[k].subset, m.exact_weights()[k]);
  return v;
}

// Compares dgamma_x / dalpha_x against dgamma_y / dalpha_y without division or roots.
// Returns -1, 0 (tie) or +1.
template <class T>
int compare_ratios(const T& dgamma_x, const T& dalpha_x, const T& dgamma_y, const T& dalpha_y) {
  const T lhs = dgamma_x * dalpha_y;
  const T rhs = dgamma_y * dalpha_x;
  if constexpr (std::is_floating_point_v<T>) {
    if (std::abs(lhs - rhs) <= kTieTolerance * std::max(std::abs(lhs), std::abs(rhs))) return 0;
  }
  if (lhs < rhs) return -1;
  if (rhs < lhs) return 1;
  return 0;
}

template <class T>
RhoHat rho_hat_sweep(const LatticeView<T>& view, SubsetMask b) {
  // Only stored sets not already inside B can contribute to an increment.
  std::vector<std::pair<SubsetMask, T>> outside;
  for (const auto& w : view.weights)
    if (!w.first.subset_of(b)) outside.push_back(w);
  auto dalpha_of = [&](SubsetMask a) {
    T total = 0;
    for (const auto& [subset, weight] : outside)
      if (subset.subset_of(a)) total += weight;
    return total;
  };

  // First pass: a minimizing ratio. Second pass: everything tied with it.
  bool found = false;
  T best_dgamma = 0, best_dalpha = 0;
  for_each_strict_superset(b, view.universe, [&](SubsetMask a) {
    T dalpha = dalpha_of(a);
    if (dalpha == 0) return;
    T dgamma = view.gamma_increment(b, a);
    if (!found || compare_ratios(dgamma, dalpha, best_dgamma, best_dalpha) < 0 ||
        (compare_ratios(dgamma, dalpha, best_dgamma, best_dalpha) == 0 &&
         dgamma * best_dalpha < best_dgamma * dalpha)) {
      best_dgamma = std::move(dgamma);
      best_dalpha = std::move(dalpha);
      found = true;
    }
  });

  RhoHat result;
  if (!found) return result;
  for_each_strict_superset(b, view.universe, [&](SubsetMask a) {
    T dalpha = dalpha_of(a);
    if (dalpha == 0) return;
    if (compare_ratios(view.gamma_increment(b, a), dalpha, best_dgamma, best_dalpha) == 0)
      result.minimizers.push_back(a);
  });
  double ratio;
  if constexpr (std::is_floating_point_v<T>) {
    ratio = best_dgamma / best_dalpha;
  } else {
    ratio = to_double(Rational(best_dgamma / best_dalpha));
  }
  result.value = std::sqrt(2.0 * kLog2 * ratio);
  return result;
}

}  // namespace detail

// Minimum of rho(B, .) over strict supersets of B, with all minimizers.
// Supersets with zero alpha increment (rho = +inf) never count as minimizers.
inline RhoHat rho_hat(const ModelSpec& m, SubsetMask b, Arithmetic mode = Arithmetic::floating) {
  if (!b.strict_subset_of(m.universe()))
    throw Error(ErrorCode::NotStrictSuperset, "rho_hat needs B to be a proper subset of I");
  if (mode == Arithmetic::exact) return detail::rho_hat_sweep(detail::exact_view(m), b);
  return detail::rho_hat_sweep(detail::floating_view(m), b);
}

namespace detail {

template <class T>
Chain build_optimal_chain(const ModelSpec& m, const LatticeView<T>& view) {
  std::vector<SubsetMask> sets{SubsetMask{}};
  std::vector<double> betas;
  SubsetMask current;
  while (current != m.universe()) {
    RhoHat step = rho_hat_sweep(view, current);
    if (step.minimizers.empty())
      throw Error(ErrorCode::UncoveredGroup, "no superset of " + to_string(current) + " adds weight");
    // Union of all minimizers: the unique maximal set attaining the minimum.
    SubsetMask next = current;
    for (SubsetMask a : step.minimizers) next |= a;
    betas.push_back(rho(m, current, next));
    sets.push_back(next);
    current = next;
  }
  Chain c = make_chain(m, std::move(sets));
  c.betas = std::move(betas);
  return c;
}

}  // namespace detail

// The chain emptyset = A_0 ⊂ A_1 ⊂ ... ⊂ A_K = I with beta_{k+1} = rho_hat(A_k) and
// A_{k+1} the union of all minimizers of rho(A_k, .).
inline Chain build_optimal_chain(const ModelSpec& m, Arithmetic mode = Arithmetic::floating) {
  if (mode == Arithmetic::exact) return detail::build_optimal_chain(m, detail::exact_view(m));
  return detail::build_optimal_chain(m, detail::floating_view(m));
}

// Regroups the model along a chain into a nested model with one group per level:
// group j has proportion gamma(A_j) - gamma(A_{j-1}) and the prefix {1..j} carries
// hat a_{A_j}. Levels with zero weight keep their group but store no subset.
inline ModelSpec coarse_grain(const ModelSpec& m, const Chain& c) {
  const Chain checked = make_chain(m, c.sets);
  const std::size_t levels = checked.levels();
  if (levels > static_cast<std::size_t>(kMaxGroups))
    throw Error(ErrorCode::TooManyGroups, "chain has too many levels");
  ModelInput in;
  in.n = static_cast<int>(levels);
  std::vector<int> prefix;
  for (std::size_t j = 1; j <= levels; ++j) {
    const SubsetMask lower = checked.sets[j - 1];
    const SubsetMask upper = checked.sets[j];
    Rational dgamma = 0;
    for (int g : (upper - lower).groups()) dgamma += m.exact_gamma()[static_cast<std::size_t>(g)];
    Rational dalpha = 0;
    for (std::size_t k = 0; k < m.num_weights(); ++k) {
      const SubsetMask s = m.weights()[k].subset;
      if (s.subset_of(upper) && !s.subset_of(lower)) dalpha += m.exact_weights()[k];
    }
    in.gamma.push_back(dgamma);
    prefix.push_back(static_cast<int>(j));
    if (dalpha > 0) in.weights.push_back({prefix, dalpha});
  }
  return validate_model(in);
}

// Number of ordered set partitions of an n-set (Fubini numbers).
inline std::uint64_t ordered_partition_count(int n) {
  std::vector<std::uint64_t> fubini(static_cast<std::size_t>(n) + 1, 0);
  fubini[0] = 1;
  std::vector<std::vector<std::uint64_t>> binom(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    binom[i].assign(static_cast<std::size_t>(i) + 1, 1);
    for (int k = 1; k < i; ++k) binom[i][k] = binom[i - 1][k - 1] + binom[i - 1][k];
  }
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= i; ++k) fubini[i] += binom[i][k] * fubini[i - k];
  return fubini[static_cast<std::size_t>(n)];
}

namespace detail {

template <class F>
void extend_chains(SubsetMask universe, std::vector<SubsetMask>& prefix, F& visit) {
  const SubsetMask top = prefix.back();
  if (top == universe) {
    visit(std::span<const SubsetMask>(prefix));
    return;
  }
  for_each_strict_superset(top, universe, [&](SubsetMask next) {
    prefix.push_back(next);
    extend_chains(universe, prefix, visit);
    prefix.pop_back();
  });
}

}  // namespace detail

// Calls visit(span of sets) once for every chain from the empty set to I.
template <class F>
void for_each_chain(const ModelSpec& m, F&& visit) {
  if (m.n() > kEnumerationCap)
    throw Error(ErrorCode::CapExceeded, "chain enumeration is limited to n <= " + std::to_string(kEnumerationCap));
  std::vector<SubsetMask> prefix{SubsetMask{}};
  detail::extend_chains(m.universe(), prefix, visit);
}

inline std::vector<Chain> enumerate_chains(const ModelSpec& m) {
  std::vector<Chain> out;
  for_each_chain(m, [&](std::span<const SubsetMask> sets) {
    out.push_back(make_chain(m, std::vector<SubsetMask>(sets.begin(), sets.end())));
  });
  return out;
}

}  // namespace ngrem
