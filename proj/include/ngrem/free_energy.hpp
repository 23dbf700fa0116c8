#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ngrem/chain.hpp"
#include "ngrem/error.hpp"
#include "ngrem/model.hpp"

namespace ngrem {

// Energy densities lambda_J, one per stored subset J, in the model's weight order.
class LambdaVector {
 public:
  LambdaVector() = default;
  explicit LambdaVector(const ModelSpec& m, double fill = 0.0) : values_(m.num_weights(), fill) {
    keys_.reserve(m.num_weights());
    for (const auto& w : m.weights()) keys_.push_back(w.subset);
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const SubsetMask> keys() const noexcept { return keys_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double& operator[](SubsetMask j) { return values_[position(j)]; }
  double operator[](SubsetMask j) const { return values_[position(j)]; }

 private:
  std::size_t position(SubsetMask j) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), j);
    if (it == keys_.end() || *it != j) throw Error(ErrorCode::InvalidArgument, to_string(j) + " is not a stored subset");
    return static_cast<std::size_t>(it - keys_.begin());
  }

  std::vector<SubsetMask> keys_;
  std::vector<double> values_;
};

// psi(lambda, beta) = sum_J (beta lambda_J - lambda_J^2 / (2 a_J)).
inline double psi(const ModelSpec& m, const LambdaVector& lam, double beta) {
  if (lam.size() != m.num_weights()) throw Error(ErrorCode::InvalidArgument, "lambda does not match the model");
  double total = 0.0;
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const double l = lam.values()[k];
    total += beta * l - l * l / (2.0 * m.weights()[k].a);
  }
  return total;
}

// f(beta) = c2 beta^2 / 2 + c1 beta + c0 on [beta_low, beta_high].
struct CurveSegment {
  double beta_low = 0.0;
  double beta_high = kInfinity;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double value(double beta) const noexcept { return 0.5 * c2 * beta * beta + c1 * beta + c0; }
  double slope(double beta) const noexcept { return c2 * beta + c1; }
};

// Piecewise quadratic-then-linear limiting free energy.
class FreeEnergyCurve {
 public:
  FreeEnergyCurve() = default;
  explicit FreeEnergyCurve(std::vector<CurveSegment> segments) : segments_(std::move(segments)) {}

  std::span<const CurveSegment> segments() const noexcept { return segments_; }

  // A joint beta_k belongs to the lower segment.
  std::size_t segment_index(double beta) const {
    if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
    for (std::size_t k = 0; k < segments_.size(); ++k)
      if (beta <= segments_[k].beta_high) return k;
    return segments_.size() - 1;
  }

  double operator()(double beta) const { return segments_[segment_index(beta)].value(beta); }

 private:
  std::vector<CurveSegment> segments_;
};

// Segment k lives on [beta_k, beta_{k+1}] with c2 = 1 - alpha(A_k),
// c1 = sum_{i<=k} beta_i (alpha(A_i) - alpha(A_{i-1})), c0 = -gamma(A_k) log 2.
inline FreeEnergyCurve curve_from_optimal_chain(const ModelSpec& m, const Chain& c) {
  if (!c.has_betas() || c.betas.size() != c.levels())
    throw Error(ErrorCode::InvalidChain, "curve construction needs the thresholds of the optimal chain");
  std::vector<CurveSegment> segments;
  double c1 = 0.0;
  for (std::size_t k = 0; k <= c.levels(); ++k) {
    if (k > 0) c1 += c.betas[k - 1] * c.hat_a[k - 1];
    CurveSegment s;
    s.beta_low = k == 0 ? 0.0 : c.betas[k - 1];
    s.beta_high = k == c.levels() ? kInfinity : c.betas[k];
    s.c2 = 1.0 - alpha_of(m, c.sets[k]);
    s.c1 = c1;
    s.c0 = 0.0 - gamma_of(m, c.sets[k]) * kLog2;
    segments.push_back(s);
  }
  return FreeEnergyCurve(std::move(segments));
}

inline FreeEnergyCurve closed_form_free_energy(const ModelSpec& m, Arithmetic mode = Arithmetic::floating) {
  return curve_from_optimal_chain(m, build_optimal_chain(m, mode));
}

// The maximizer of psi on the segment containing beta: a_J beta_m for J first contained
// in a frozen level A_m, a_J beta for the rest.
inline LambdaVector lambda_star(const ModelSpec& m, const Chain& c, double beta) {
  if (!c.has_betas()) throw Error(ErrorCode::InvalidChain, "lambda_star needs the optimal chain");
  if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  // Levels 1..frozen have beta_m < beta.
  std::size_t frozen = 0;
  while (frozen < c.betas.size() && c.betas[frozen] < beta) ++frozen;
  LambdaVector lam(m);
  for (std::size_t k = 0; k < m.num_weights(); ++k) {
    const auto& w = m.weights()[k];
    double level_beta = beta;
    for (std::size_t level = 1; level <= frozen; ++level) {
      if (w.subset.subset_of(c.sets[level])) {
        level_beta = c.betas[level - 1];
        break;
      }
    }
    lam.values()[k] = w.a * level_beta;
  }
  return lam;
}

// The free energy of the GREM obtained by coarse-graining m along c.
inline FreeEnergyCurve chain_free_energy_curve(const ModelSpec& m, const Chain& c) {
  return closed_form_free_energy(coarse_grain(m, c));
}

inline double chain_free_energy(const ModelSpec& m, const Chain& c, double beta) {
  return chain_free_energy_curve(m, c)(beta);
}

}  // namespace ngrem
