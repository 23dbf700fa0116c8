#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ngrem;
using Catch::Matchers::WithinAbs;

namespace {

// 40-digit reference values.
constexpr double kSqrt2Log2 = 1.177410022515474691012;
constexpr double kTwoSqrtLog2 = 1.665109222315395512706;
constexpr double kBeta1 = 1.074823381273985024748;
constexpr double kBeta2 = 1.520029802953377741674;

const SubsetMask k12(0b011);
const SubsetMask k1(0b001);

}  // namespace

TEST_CASE("rho") {
  const auto sym = testing::symmetric3();
  const auto two = testing::two_level();
  CHECK_THAT(rho(sym, SubsetMask{}, sym.universe()), WithinAbs(kSqrt2Log2, 1e-14));
  CHECK_THAT(rho(sym, SubsetMask{}, k12), WithinAbs(kTwoSqrtLog2, 1e-14));
  CHECK_THAT(rho(two, SubsetMask{}, k12), WithinAbs(kBeta1, 1e-14));
  CHECK(rho(two, SubsetMask{}, k1) == kInfinity);
  CHECK_THROWS_AS(rho(two, k12, k12), Error);
  CHECK_THROWS_AS(rho(two, k12, k1), Error);
}

TEST_CASE("rho_hat and its minimizers") {
  const auto two = testing::two_level();
  for (auto mode : {Arithmetic::floating, Arithmetic::exact}) {
    const auto first = rho_hat(two, SubsetMask{}, mode);
    CHECK_THAT(first.value, WithinAbs(kBeta1, 1e-14));
    CHECK(first.minimizers == std::vector<SubsetMask>{k12});
    const auto second = rho_hat(two, k12, mode);
    CHECK_THAT(second.value, WithinAbs(kBeta2, 1e-14));
    CHECK(second.minimizers == std::vector<SubsetMask>{two.universe()});
  }
  const auto sym = testing::symmetric3();
  const auto r = rho_hat(sym, SubsetMask{});
  CHECK_THAT(r.value, WithinAbs(kSqrt2Log2, 1e-14));
  CHECK(std::find(r.minimizers.begin(), r.minimizers.end(), sym.universe()) != r.minimizers.end());
  CHECK_THROWS_AS(rho_hat(sym, sym.universe()), Error);
}

TEST_CASE("optimal chains of the reference models") {
  for (auto mode : {Arithmetic::floating, Arithmetic::exact}) {
    const auto sym = build_optimal_chain(testing::symmetric3(), mode);
    REQUIRE(sym.sets == std::vector<SubsetMask>{SubsetMask{}, SubsetMask(0b111)});
    CHECK_THAT(sym.betas[0], WithinAbs(kSqrt2Log2, 1e-14));
    CHECK_THAT(sym.hat_a[0], WithinAbs(1.0, 1e-15));

    const auto two = build_optimal_chain(testing::two_level(), mode);
    REQUIRE(two.sets == std::vector<SubsetMask>{SubsetMask{}, k12, SubsetMask(0b111)});
    CHECK_THAT(two.betas[0], WithinAbs(kBeta1, 1e-14));
    CHECK_THAT(two.betas[1], WithinAbs(kBeta2, 1e-14));
    CHECK_THAT(two.hat_a[0], WithinAbs(0.8, 1e-15));
    CHECK_THAT(two.hat_a[1], WithinAbs(0.2, 1e-15));
    CHECK_THAT(two.hat_gamma[0], WithinAbs(2.0 / 3.0, 1e-15));

    const auto r = build_optimal_chain(testing::rem(), mode);
    CHECK(r.levels() == 1);
    CHECK_THAT(r.betas[0], WithinAbs(kSqrt2Log2, 1e-14));
  }
}

TEST_CASE("ties are merged into the union of minimizers") {
  // {1} and {2} reach the same ratio from the empty set; the chain takes {1,2} in one step.
  const auto m = validate_model(
      ModelInput::from_doubles(3, {0.2, 0.2, 0.6}, {{{1}, 0.3}, {{2}, 0.3}, {{1, 2, 3}, 0.4}}));
  const auto c = build_optimal_chain(m, Arithmetic::exact);
  REQUIRE(c.levels() == 2);
  CHECK(c.sets[1] == k12);
  CHECK(build_optimal_chain(m).sets == c.sets);
}

TEST_CASE("make_chain rejects malformed chains") {
  const auto m = testing::symmetric3();
  CHECK_THROWS_AS(make_chain(m, {SubsetMask{}}), Error);
  CHECK_THROWS_AS(make_chain(m, {k1, m.universe()}), Error);
  CHECK_THROWS_AS(make_chain(m, {SubsetMask{}, k12}), Error);
  CHECK_THROWS_AS(make_chain(m, {SubsetMask{}, k12, k12, m.universe()}), Error);
  CHECK_THROWS_AS(make_chain(m, {SubsetMask{}, k12, k1, m.universe()}), Error);
}

TEST_CASE("coarse graining") {
  const auto two = testing::two_level();
  const auto cg = coarse_grain(two, build_optimal_chain(two));
  CHECK(cg.n() == 2);
  CHECK(cg.exact_gamma()[0] == Rational(2, 3));
  CHECK(cg.exact_gamma()[1] == Rational(1, 3));
  REQUIRE(cg.num_weights() == 2);
  CHECK(cg.exact_weights()[0] == Rational(4, 5));
  CHECK(cg.exact_weights()[1] == Rational(1, 5));
  CHECK(is_nested(cg));

  const auto sym = testing::symmetric3();
  const auto rem = coarse_grain(sym, make_chain(sym, {SubsetMask{}, sym.universe()}));
  CHECK(rem.n() == 1);
  CHECK(rem.exact_weights()[0] == 1);

  const auto three = coarse_grain(sym, make_chain(sym, {SubsetMask{}, k1, k12, sym.universe()}));
  CHECK(three.n() == 3);
  CHECK(three.exact_gamma()[0] == Rational(1, 3));
  // The level {1} adds no weight and stores no subset.
  REQUIRE(three.num_weights() == 2);
  CHECK(three.weights()[0].subset == k12);
  CHECK(three.exact_weights()[0] == Rational(1, 3));
  CHECK(three.exact_weights()[1] == Rational(2, 3));
}

TEST_CASE("chain enumeration") {
  CHECK(ordered_partition_count(1) == 1);
  CHECK(ordered_partition_count(2) == 3);
  CHECK(ordered_partition_count(3) == 13);
  CHECK(ordered_partition_count(4) == 75);
  CHECK(ordered_partition_count(10) == 102247563);

  CHECK(enumerate_chains(testing::rem()).size() == 1);
  const auto two = validate_model(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1, 2}, 1.0}}));
  const auto chains = enumerate_chains(two);
  REQUIRE(chains.size() == 3);
  CHECK(chains[0].sets == std::vector<SubsetMask>{SubsetMask{}, SubsetMask(0b01), SubsetMask(0b11)});
  CHECK(chains[1].sets == std::vector<SubsetMask>{SubsetMask{}, SubsetMask(0b10), SubsetMask(0b11)});
  CHECK(chains[2].sets == std::vector<SubsetMask>{SubsetMask{}, SubsetMask(0b11)});
  CHECK(enumerate_chains(testing::symmetric3()).size() == 13);

  ModelInput wide;
  wide.n = 11;
  for (int i = 0; i < 11; ++i) wide.gamma.push_back(Rational(1, 11));
  wide.weights.push_back({SubsetMask::full(11).indices(), 1});
  const auto m = validate_model(wide);
  try {
    for_each_chain(m, [](auto) {});
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}
