#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "ngrem/chain.hpp"
#include "ngrem/error.hpp"
#include "ngrem/free_energy.hpp"
#include "ngrem/model.hpp"
#include "ngrem/sizes.hpp"

namespace ngrem {

// Absolute tolerance on constraint margins.
inline constexpr double kFeasTolerance = 1e-10;

struct FeasibleRegionReport {
  bool feasible = true;
  // Sets A whose constraint sum_{J in P_A} (lambda_J^+)^2 / 2a_J <= gamma(A) log 2 fails.
  std::vector<SubsetMask> violated_sets;
  // Stored J with lambda_J < 0 (outside the positive orthant).
  std::vector<SubsetMask> negative_components;
  // margins[A.bits()] = gamma(A) log 2 - sum_{J in P_A} (lambda_J^+)^2 / 2a_J, for every A ⊆ I.
  std::vector<double> margins;

  double margin(SubsetMask a) const { return margins.at(a.bits()); }
};

inline FeasibleRegionReport check_delta_plus(const ModelSpec& m, const LambdaVector& lam) {
  if (lam.size() != m.num_weights()) throw Error(ErrorCode::InvalidArgument, "lambda does not match the model");
  FeasibleRegionReport report;
  std::vector<double> cost(m.num_weights());
  for (std::size_t k = 0; k < m.num_weights(); ++k) {
    const double plus = std::max(lam.values()[k], 0.0);
    cost[k] = plus * plus / (2.0 * m.weights()[k].a);
    if (lam.values()[k] < 0.0) report.negative_components.push_back(m.weights()[k].subset);
  }
  report.margins.assign(std::size_t{1} << m.n(), 0.0);
  for_each_subset(m.universe(), [&](SubsetMask a) {
    double used = 0.0;
    for (std::size_t k = 0; k < m.num_weights(); ++k)
      if (m.weights()[k].subset.subset_of(a)) used += cost[k];
    const double margin = gamma_of(m, a) * kLog2 - used;
    report.margins[a.bits()] = margin;
    if (margin < -kFeasTolerance) report.violated_sets.push_back(a);
  });
  std::sort(report.violated_sets.begin(), report.violated_sets.end(), [&](SubsetMask x, SubsetMask y) {
    const double mx = report.margins[x.bits()], my = report.margins[y.bits()];
    return mx < my || (mx == my && x < y);
  });
  report.feasible = report.violated_sets.empty() && report.negative_components.empty();
  return report;
}

struct VariationalOptions {
  // Barrier parameter growth per outer step.
  double barrier_growth = 10.0;
  // Newton decrement below which a centering step is considered done.
  double centering_tolerance = 1e-13;
  std::size_t max_newton_steps = 1'000'000;
};

struct VariationalResult {
  double value = 0.0;
  LambdaVector argmax;
  // False when the Newton step cap was hit; value/argmax are then the last feasible iterate.
  bool converged = true;
  std::size_t newton_steps = 0;
  // Central-path duality gap at the returned point: value >= sup - gap_bound.
  double gap_bound = 0.0;
};

namespace detail {

struct BarrierConstraint {
  std::vector<std::size_t> members;  // indices into the model weights
  double capacity = 0.0;             // gamma(A) log 2
};

// One constraint per distinct P_A, keeping the smallest capacity.
inline std::vector<BarrierConstraint> distinct_constraints(const ModelSpec& m) {
  std::map<std::vector<std::size_t>, double> tightest;
  for_each_subset(m.universe(), [&](SubsetMask a) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < m.num_weights(); ++k)
      if (m.weights()[k].subset.subset_of(a)) members.push_back(k);
    if (members.empty()) return;
    const double capacity = gamma_of(m, a) * kLog2;
    auto [it, inserted] = tightest.emplace(std::move(members), capacity);
    if (!inserted) it->second = std::min(it->second, capacity);
  });
  std::vector<BarrierConstraint> out;
  for (auto& [members, capacity] : tightest) out.push_back({members, capacity});
  return out;
}

}  // namespace detail

// sup of psi(., beta) over Delta+, by a log-barrier interior-point ascent.
//
// Works in the scaled coordinates y_J = lambda_J / sqrt(a_J), where psi has Hessian -I and
// each constraint reads sum_{J in P_A} y_J^2 / 2 <= gamma(A) log 2. Starts from the
// equipartition point a_J beta pulled strictly inside, follows the central path with damped
// Newton steps and stops once the duality gap bound (#barrier terms) / t is below tol.
inline VariationalResult solve_variational(const ModelSpec& m, double beta, double tol,
                                           const VariationalOptions& options = {}) {
  if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  VariationalResult result;
  result.argmax = LambdaVector(m);
  if (beta == 0.0) return result;

  const auto dim = static_cast<Eigen::Index>(m.num_weights());
  const auto constraints = detail::distinct_constraints(m);
  Eigen::VectorXd root_a(dim);
  for (Eigen::Index k = 0; k < dim; ++k) root_a[k] = std::sqrt(m.weights()[static_cast<std::size_t>(k)].a);

  auto slack = [&](const detail::BarrierConstraint& c, const Eigen::VectorXd& y) {
    double used = 0.0;
    for (std::size_t k : c.members) used += 0.5 * y[static_cast<Eigen::Index>(k)] * y[static_cast<Eigen::Index>(k)];
    return c.capacity - used;
  };
  auto strictly_feasible = [&](const Eigen::VectorXd& y) {
    if ((y.array() <= 0.0).any()) return false;
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const auto& c) { return slack(c, y) > 0.0; });
  };

  // Equipartition y_J = beta sqrt(a_J), scaled into the interior.
  double scale = 1.0;
  for (const auto& c : constraints) {
    double used = 0.0;
    for (std::size_t k : c.members) used += 0.5 * beta * beta * m.weights()[k].a;
    scale = std::min(scale, std::sqrt(c.capacity / used));
  }
  Eigen::VectorXd y = 0.9 * scale * beta * root_a;

  const double barrier_terms = static_cast<double>(constraints.size()) + static_cast<double>(dim);
  double t = 1.0;
  std::size_t steps = 0;
  Eigen::VectorXd grad(dim);
  Eigen::MatrixXd neg_hess(dim, dim);
  while (true) {
    // Centering: maximize t psi + sum log slack + sum log y.
    for (std::size_t inner = 0; inner < 200; ++inner) {
      if (steps >= options.max_newton_steps) {
        result.converged = false;
        break;
      }
      grad = t * (beta * root_a - y) + y.cwiseInverse();
      neg_hess.setZero();
      neg_hess.diagonal().array() = t + y.array().square().inverse();
      for (const auto& c : constraints) {
        const double s = slack(c, y);
        for (std::size_t i : c.members) {
          const auto ii = static_cast<Eigen::Index>(i);
          grad[ii] -= y[ii] / s;
          neg_hess(ii, ii) += 1.0 / s;
          for (std::size_t j : c.members) {
            const auto jj = static_cast<Eigen::Index>(j);
            neg_hess(ii, jj) += y[ii] * y[jj] / (s * s);
          }
        }
      }
      const Eigen::VectorXd step = neg_hess.llt().solve(grad);
      const double decrement_sq = grad.dot(step);
      ++steps;
      if (!(decrement_sq > 2.0 * options.centering_tolerance)) break;
      const double decrement = std::sqrt(decrement_sq);
      double length = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
      Eigen::VectorXd trial = y + length * step;
      while (!strictly_feasible(trial) && length > 1e-16) {
        length *= 0.5;
        trial = y + length * step;
      }
      if (!strictly_feasible(trial)) break;
      y = trial;
    }
    if (!result.converged) break;
    if (barrier_terms / t <= tol) break;
    t *= options.barrier_growth;
  }

  result.newton_steps = steps;
  result.gap_bound = barrier_terms / t;
  for (Eigen::Index k = 0; k < dim; ++k) result.argmax.values()[static_cast<std::size_t>(k)] = y[k] * root_a[k];
  result.value = psi(m, result.argmax, beta);
  return result;
}

// Standard Gaussian upper tail P(Z >= x).
inline double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Exact expectation of the exceedance count over the projected configurations of A:
// 2^{bits in A} prod_{J in P_A} P(X^J >= lambda_J N), with X^J ~ N(0, a_J N), N = N_effective.
inline double expected_count(const ModelSpec& m, const SizeAssignment& size, SubsetMask a, const LambdaVector& lam) {
  if (lam.size() != m.num_weights()) throw Error(ErrorCode::InvalidArgument, "lambda does not match the model");
  const double n_eff = size.n_effective;
  double result = std::ldexp(1.0, size.bits_in(a));
  for (std::size_t k = 0; k < m.num_weights(); ++k) {
    const auto& w = m.weights()[k];
    if (!w.subset.subset_of(a)) continue;
    result *= gaussian_upper_tail(lam.values()[k] * std::sqrt(n_eff / w.a));
  }
  return result;
}

inline double expected_count(const ModelSpec& m, SubsetMask a, const LambdaVector& lam, int n_total) {
  return expected_count(m, assign_sizes(m, n_total), a, lam);
}

}  // namespace ngrem
