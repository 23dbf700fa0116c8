#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ngrem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kSqrt2Log2 = 1.177410022515474691012;
constexpr double kBeta2 = 1.520029802953377741674;
constexpr double kTwoLevelAtBeta2 = 1.075961797771414485813;
// 256 Q(1.8), Q the standard Gaussian upper tail.
constexpr double kCount256Q18 = 9.198161692909005813843;

}  // namespace

TEST_CASE("feasible region") {
  const auto sym = testing::symmetric3();
  const auto zero = check_delta_plus(sym, LambdaVector(sym));
  CHECK(zero.feasible);
  CHECK_THAT(zero.margin(SubsetMask(0b011)), WithinAbs(2.0 / 3.0 * std::log(2.0), 1e-15));
  CHECK(zero.margin(SubsetMask{}) == 0.0);

  const auto critical = check_delta_plus(sym, LambdaVector(sym, kSqrt2Log2 / 3.0));
  CHECK(critical.feasible);
  CHECK_THAT(critical.margin(sym.universe()), WithinAbs(0.0, 1e-14));

  const auto two = testing::two_level();
  LambdaVector lam(two);
  for (std::size_t k = 0; k < lam.size(); ++k) lam.values()[k] = two.weights()[k].a * 1.3;
  const auto report = check_delta_plus(two, lam);
  CHECK_FALSE(report.feasible);
  REQUIRE_FALSE(report.violated_sets.empty());
  CHECK(report.violated_sets.front() == SubsetMask(0b011));

  LambdaVector negative(two);
  negative[SubsetMask(0b101)] = -0.5;
  const auto neg = check_delta_plus(two, negative);
  CHECK(neg.violated_sets.empty());
  CHECK(neg.negative_components == std::vector<SubsetMask>{SubsetMask(0b101)});
  CHECK_FALSE(neg.feasible);
}

TEST_CASE("variational solver on the reference models") {
  const auto sym = testing::symmetric3();
  const auto two = testing::two_level();
  const auto zero = solve_variational(two, 0.0, 1e-9);
  CHECK(zero.value == 0.0);
  for (double v : zero.argmax.values()) CHECK(v == 0.0);

  const auto low = solve_variational(two, 0.5, 1e-10);
  CHECK(low.converged);
  CHECK_THAT(low.value, WithinAbs(0.125, 1e-9));
  for (std::size_t k = 0; k < two.num_weights(); ++k)
    CHECK_THAT(low.argmax.values()[k], WithinAbs(two.weights()[k].a * 0.5, 1e-4));

  const auto at_beta2 = solve_variational(two, kBeta2, 1e-10);
  CHECK_THAT(at_beta2.value, WithinAbs(kTwoLevelAtBeta2, 1e-8));
  CHECK(at_beta2.value <= kTwoLevelAtBeta2 + 1e-12);
  CHECK(check_delta_plus(two, at_beta2.argmax).feasible);

  const auto high = solve_variational(sym, 3.0, 1e-10);
  CHECK_THAT(high.value, WithinAbs(3.0 * kSqrt2Log2 - std::log(2.0), 1e-8));
  CHECK(high.gap_bound <= 1e-10);

  CHECK_THROWS_AS(solve_variational(sym, -1.0, 1e-9), Error);
  CHECK_THROWS_AS(solve_variational(sym, 1.0, 0.0), Error);
}

TEST_CASE("expected exceedance counts") {
  const auto sym = testing::symmetric3();
  const auto size = assign_sizes(sym, 12);
  CHECK(expected_count(sym, size, SubsetMask{}, LambdaVector(sym, 5.0)) == 1.0);
  CHECK(expected_count(sym, size, sym.universe(), LambdaVector(sym)) == std::ldexp(1.0, 12 - 3));
  CHECK(expected_count(sym, size, SubsetMask(0b011), LambdaVector(sym)) == std::ldexp(1.0, 8 - 1));

  LambdaVector lam(sym);
  lam[SubsetMask(0b011)] = 0.3;
  CHECK_THAT(expected_count(sym, SubsetMask(0b011), lam, 12), WithinRel(kCount256Q18, 1e-13));
  CHECK(gaussian_upper_tail(0.0) == 0.5);
}
