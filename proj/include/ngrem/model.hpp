#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ngrem/error.hpp"
#include "ngrem/rational.hpp"
#include "ngrem/subset.hpp"

namespace ngrem {

// Relative tolerance on the two normalization sums.
inline constexpr double kNormTolerance = 1e-9;

// One entry of a candidate weight list: a_J for the subset J (one-based indices).
struct WeightInput {
  std::vector<int> subset;
  Rational a;
};

// Unvalidated model description, as read from a file or built in code.
struct ModelInput {
  int n = 0;
  std::vector<Rational> gamma;
  std::vector<WeightInput> weights;

  // Convenience for code and tests. Values go through their shortest decimal form.
  static ModelInput from_doubles(int n, const std::vector<double>& gamma,
                                 const std::vector<std::pair<std::vector<int>, double>>& weights) {
    ModelInput in;
    in.n = n;
    for (double g : gamma) in.gamma.push_back(rational_from_double(g));
    for (const auto& [subset, a] : weights) in.weights.push_back({subset, rational_from_double(a)});
    return in;
  }
};

struct WeightEntry {
  SubsetMask subset;
  double a = 0.0;
};

// A validated model: group proportions gamma_i and the stored subset weights a_J > 0.
// Immutable; only validate_model creates one.
class ModelSpec {
 public:
  int n() const noexcept { return n_; }
  SubsetMask universe() const noexcept { return SubsetMask::full(n_); }

  std::span<const double> gamma() const noexcept { return gamma_; }
  // Stored subsets, sorted by mask value.
  std::span<const WeightEntry> weights() const noexcept { return weights_; }
  std::size_t num_weights() const noexcept { return weights_.size(); }

  // Exactly renormalized rational values, parallel to gamma() and weights().
  std::span<const Rational> exact_gamma() const noexcept { return exact_gamma_; }
  std::span<const Rational> exact_weights() const noexcept { return exact_weights_; }

  // Input sum minus one, before renormalization.
  double gamma_deviation() const noexcept { return gamma_deviation_; }
  double weight_deviation() const noexcept { return weight_deviation_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index_of(SubsetMask subset) const noexcept {
    auto it = std::lower_bound(weights_.begin(), weights_.end(), subset,
                               [](const WeightEntry& w, SubsetMask s) { return w.subset < s; });
    if (it == weights_.end() || it->subset != subset) return npos;
    return static_cast<std::size_t>(it - weights_.begin());
  }

  // Back to the input form (one-based sorted subsets, exact values).
  ModelInput to_input() const {
    ModelInput in;
    in.n = n_;
    in.gamma = exact_gamma_;
    for (std::size_t k = 0; k < weights_.size(); ++k)
      in.weights.push_back({weights_[k].subset.indices(), exact_weights_[k]});
    return in;
  }

  friend ModelSpec validate_model(const ModelInput& raw);

 private:
  ModelSpec() = default;

  int n_ = 0;
  std::vector<double> gamma_;
  std::vector<WeightEntry> weights_;
  std::vector<Rational> exact_gamma_;
  std::vector<Rational> exact_weights_;
  double gamma_deviation_ = 0.0;
  double weight_deviation_ = 0.0;
};

namespace detail {

inline SubsetMask mask_from_indices(const std::vector<int>& indices, int n) {
  if (indices.empty()) throw Error(ErrorCode::EmptySubsetWeight, "weight attached to the empty subset");
  SubsetMask mask;
  int previous = 0;
  for (int i : indices) {
    if (i < 1 || i > n)
      throw Error(ErrorCode::IndexOutOfRange,
                  "group index " + std::to_string(i) + " outside 1.." + std::to_string(n));
    if (i <= previous)
      throw Error(ErrorCode::UnsortedIndices, "subset indices must be strictly increasing");
    previous = i;
    mask |= SubsetMask::single(i - 1);
  }
  return mask;
}

inline void check_normalization(const Rational& sum, const char* what) {
  const double deviation = to_double(sum - 1);
  if (!(std::abs(deviation) <= kNormTolerance))
    throw Error(ErrorCode::NormalizationOutOfTolerance,
                std::string(what) + " sum to " + std::to_string(to_double(sum)) + ", expected 1");
}

}  // namespace detail

inline ModelSpec validate_model(const ModelInput& raw) {
  if (raw.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (raw.n > kMaxGroups)
    throw Error(ErrorCode::TooManyGroups, "n = " + std::to_string(raw.n) + " exceeds " +
                                              std::to_string(kMaxGroups));
  if (static_cast<int>(raw.gamma.size()) != raw.n)
    throw Error(ErrorCode::IndexOutOfRange, "gamma has " + std::to_string(raw.gamma.size()) +
                                                " entries, expected " + std::to_string(raw.n));

  Rational gamma_sum = 0;
  for (std::size_t i = 0; i < raw.gamma.size(); ++i) {
    if (raw.gamma[i] <= 0)
      throw Error(ErrorCode::NonPositiveWeight, "gamma_" + std::to_string(i + 1) + " must be positive");
    gamma_sum += raw.gamma[i];
  }
  detail::check_normalization(gamma_sum, "group proportions");

  std::vector<std::pair<SubsetMask, Rational>> entries;
  Rational weight_sum = 0;
  for (const auto& w : raw.weights) {
    SubsetMask mask = detail::mask_from_indices(w.subset, raw.n);
    if (w.a <= 0)
      throw Error(ErrorCode::NonPositiveWeight, "weight of " + to_string(mask) + " must be positive");
    entries.emplace_back(mask, w.a);
    weight_sum += w.a;
  }
  if (entries.empty()) throw Error(ErrorCode::NormalizationOutOfTolerance, "no subset weights given");
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t k = 1; k < entries.size(); ++k)
    if (entries[k].first == entries[k - 1].first)
      throw Error(ErrorCode::DuplicateSubset, "subset " + to_string(entries[k].first) + " listed twice");
  detail::check_normalization(weight_sum, "subset weights");

  SubsetMask covered;
  for (const auto& e : entries) covered |= e.first;
  if (covered != SubsetMask::full(raw.n))
    throw Error(ErrorCode::UncoveredGroup,
                "groups " + to_string(SubsetMask::full(raw.n) - covered) + " belong to no weighted subset");

  ModelSpec m;
  m.n_ = raw.n;
  m.gamma_deviation_ = to_double(gamma_sum - 1);
  m.weight_deviation_ = to_double(weight_sum - 1);
  for (const auto& g : raw.gamma) {
    m.exact_gamma_.push_back(g / gamma_sum);
    m.gamma_.push_back(to_double(m.exact_gamma_.back()));
  }
  for (const auto& [mask, a] : entries) {
    m.exact_weights_.push_back(a / weight_sum);
    m.weights_.push_back({mask, to_double(m.exact_weights_.back())});
  }
  return m;
}

namespace detail {

template <class T>
T sum_over_groups(std::span<const T> gamma, SubsetMask a) {
  T total = 0;
  for (auto b = a.bits(); b != 0; b &= b - 1) total += gamma[static_cast<std::size_t>(std::countr_zero(b))];
  return total;
}

}  // namespace detail

// gamma(A) = sum of gamma_i over i in A.
inline double gamma_of(const ModelSpec& m, SubsetMask a) {
  if (a == m.universe()) return 1.0;
  return detail::sum_over_groups(m.gamma(), a);
}

// alpha(A) = sum of a_J over stored J contained in A.
inline double alpha_of(const ModelSpec& m, SubsetMask a) {
  if (a == m.universe()) return 1.0;
  double total = 0.0;
  for (const auto& w : m.weights())
    if (w.subset.subset_of(a)) total += w.a;
  return total;
}

// gamma(A) - gamma(B) for B ⊆ A, summed directly over A \ B.
inline double gamma_increment(const ModelSpec& m, SubsetMask b, SubsetMask a) {
  return detail::sum_over_groups(m.gamma(), a - b);
}

// alpha(A) - alpha(B) for B ⊆ A, summed directly over the stored J with J ⊆ A, J ⊄ B.
// Exactly zero when no such J exists.
inline double alpha_increment(const ModelSpec& m, SubsetMask b, SubsetMask a) {
  double total = 0.0;
  for (const auto& w : m.weights())
    if (w.subset.subset_of(a) && !w.subset.subset_of(b)) total += w.a;
  return total;
}

// True iff the stored subsets form a chain under inclusion.
inline bool is_nested(const ModelSpec& m) {
  std::vector<SubsetMask> sets;
  for (const auto& w : m.weights()) sets.push_back(w.subset);
  std::sort(sets.begin(), sets.end(),
            [](SubsetMask x, SubsetMask y) { return x.size() < y.size() || (x.size() == y.size() && x < y); });
  for (std::size_t k = 1; k < sets.size(); ++k)
    if (!sets[k - 1].strict_subset_of(sets[k])) return false;
  return true;
}

}  // namespace ngrem
