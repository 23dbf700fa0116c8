#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ngrem/ngrem.hpp"

namespace ngrem::testing {

inline ModelSpec symmetric3() {
  ModelInput in;
  in.n = 3;
  in.gamma = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  in.weights = {{{1, 2}, Rational(1, 3)}, {{1, 3}, Rational(1, 3)}, {{2, 3}, Rational(1, 3)}};
  return validate_model(in);
}

inline ModelSpec two_level() {
  ModelInput in;
  in.n = 3;
  in.gamma = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  in.weights = {{{1, 2}, Rational(4, 5)}, {{1, 3}, Rational(1, 10)}, {{2, 3}, Rational(1, 10)}};
  return validate_model(in);
}

inline ModelSpec rem() { return validate_model(ModelInput::from_doubles(1, {1.0}, {{{1}, 1.0}})); }

// Random model on n groups: positive gamma, a random nonempty family of subsets covering I.
// gamma_low bounds the spread of the group proportions (each drawn from [gamma_low, 1]).
inline ModelSpec random_model(std::mt19937_64& rng, int n, double gamma_low = 0.05) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_real_distribution<double> proportion(gamma_low, 1.0);
  std::uniform_int_distribution<SubsetMask::bits_type> mask(1, (SubsetMask::bits_type{1} << n) - 1);
  std::bernoulli_distribution keep(0.4);
  ModelInput in;
  in.n = n;
  Rational total = 0;
  for (int i = 0; i < n; ++i) {
    in.gamma.push_back(rational_from_double(proportion(rng)));
    total += in.gamma.back();
  }
  for (auto& g : in.gamma) g /= total;

  std::vector<SubsetMask> chosen;
  for_each_strict_superset(SubsetMask{}, SubsetMask::full(n), [&](SubsetMask s) {
    if (keep(rng)) chosen.push_back(s);
  });
  SubsetMask covered;
  for (auto s : chosen) covered |= s;
  while (covered != SubsetMask::full(n)) {
    const SubsetMask s(mask(rng));
    if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
    covered |= s;
  }
  Rational weight_total = 0;
  for (auto s : chosen) {
    in.weights.push_back({s.indices(), rational_from_double(weight(rng))});
    weight_total += in.weights.back().a;
  }
  for (auto& w : in.weights) w.a /= weight_total;
  return validate_model(in);
}

// Random nested model: a chain of sets J_1 ⊂ ... ⊂ J_k = I, each carrying a weight.
inline ModelSpec random_nested_model(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution cut(0.5);
  std::vector<double> gamma;
  for (int i = 0; i < n; ++i) gamma.push_back(weight(rng));
  double gsum = 0;
  for (double g : gamma) gsum += g;
  for (double& g : gamma) g /= gsum;

  std::vector<std::pair<std::vector<int>, double>> weights;
  SubsetMask current;
  double wsum = 0;
  for (int k = 0; k < n; ++k) {
    current |= SubsetMask::single(order[static_cast<std::size_t>(k)]);
    if (k == n - 1 || cut(rng)) {
      weights.emplace_back(current.indices(), weight(rng));
      wsum += weights.back().second;
    }
  }
  for (auto& w : weights) w.second /= wsum;
  ModelInput in = ModelInput::from_doubles(n, gamma, weights);
  // from_doubles rounds through decimals; renormalize exactly.
  Rational gt = 0, wt = 0;
  for (auto& g : in.gamma) gt += g;
  for (auto& w : in.weights) wt += w.a;
  for (auto& g : in.gamma) g /= gt;
  for (auto& w : in.weights) w.a /= wt;
  return validate_model(in);
}

}  // namespace ngrem::testing
