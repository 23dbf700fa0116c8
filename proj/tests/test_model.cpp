#include <catch_amalgamated.hpp>

#include "ngrem/model_io.hpp"
#include "support.hpp"

using namespace ngrem;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const ModelInput& in) {
  try {
    validate_model(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a model error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("valid models") {
  const auto sym = testing::symmetric3();
  CHECK(sym.n() == 3);
  CHECK(sym.num_weights() == 3);
  const auto r = testing::rem();
  CHECK(r.n() == 1);
  CHECK(r.weights()[0].a == 1.0);
  CHECK(r.weights()[0].subset == SubsetMask(1));
}

TEST_CASE("weights below tolerance are rejected") {
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1, 2}, 0.9}})) == ErrorCode::NormalizationOutOfTolerance);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.4}, {{{1, 2}, 1.0}})) == ErrorCode::NormalizationOutOfTolerance);
}

TEST_CASE("small deviations are renormalized exactly") {
  const auto m = validate_model(ModelInput::from_doubles(2, {0.5, 0.5 + 1e-10}, {{{1}, 0.5}, {{1, 2}, 0.5}}));
  CHECK(m.gamma_deviation() == Catch::Approx(1e-10).margin(1e-15));
  CHECK(m.exact_gamma()[0] + m.exact_gamma()[1] == 1);
}

TEST_CASE("malformed models") {
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{}, 1.0}})) == ErrorCode::EmptySubsetWeight);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1, 3}, 1.0}})) == ErrorCode::IndexOutOfRange);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{2, 1}, 1.0}})) == ErrorCode::UnsortedIndices);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1, 2}, 0.5}, {{1, 2}, 0.5}})) ==
        ErrorCode::DuplicateSubset);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1, 2}, 1.5}, {{1}, -0.5}})) ==
        ErrorCode::NonPositiveWeight);
  CHECK(code_of(ModelInput::from_doubles(2, {1.0, 0.0}, {{{1, 2}, 1.0}})) == ErrorCode::NonPositiveWeight);
  CHECK(code_of(ModelInput::from_doubles(2, {0.5, 0.5}, {{{1}, 1.0}})) == ErrorCode::UncoveredGroup);
  CHECK(code_of(ModelInput::from_doubles(2, {1.0}, {{{1}, 1.0}})) == ErrorCode::IndexOutOfRange);
  ModelInput big;
  big.n = 25;
  CHECK(code_of(big) == ErrorCode::TooManyGroups);
  CHECK(is_model_error(ErrorCode::UncoveredGroup));
  CHECK_FALSE(is_model_error(ErrorCode::CapExceeded));
}

TEST_CASE("gamma and alpha of subsets") {
  const auto sym = testing::symmetric3();
  const auto two = testing::two_level();
  CHECK_THAT(gamma_of(sym, SubsetMask(0b011)), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(gamma_of(sym, SubsetMask{}) == 0.0);
  CHECK(gamma_of(sym, sym.universe()) == 1.0);
  CHECK_THAT(alpha_of(sym, SubsetMask(0b011)), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(alpha_of(two, SubsetMask(0b011)), WithinAbs(0.8, 1e-15));
  CHECK(alpha_of(two, SubsetMask(0b001)) == 0.0);
  CHECK(alpha_of(two, two.universe()) == 1.0);
  CHECK(alpha_increment(two, SubsetMask{}, SubsetMask(0b001)) == 0.0);
  CHECK_THAT(gamma_increment(two, SubsetMask(0b011), two.universe()), WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("nested families") {
  const auto nested =
      validate_model(ModelInput::from_doubles(3, {0.5, 0.25, 0.25}, {{{1}, 0.2}, {{1, 2}, 0.3}, {{1, 2, 3}, 0.5}}));
  CHECK(is_nested(nested));
  CHECK_FALSE(is_nested(testing::symmetric3()));
  CHECK(is_nested(testing::rem()));
}

TEST_CASE("model files") {
  const auto m = load_model(NGREM_MODELS_DIR "/two_level.json");
  CHECK(m.n() == 3);
  CHECK(m.weights()[m.index_of(SubsetMask(0b011))].a == 0.8);
  CHECK(m.exact_weights()[m.index_of(SubsetMask(0b011))] == Rational(4, 5));
  CHECK(m.exact_gamma()[0] == Rational(1, 3));

  const auto again = validate_model(parse_model_json(model_to_json(m).dump()));
  CHECK(again.n() == m.n());
  for (std::size_t k = 0; k < m.num_weights(); ++k) CHECK(again.weights()[k].a == m.weights()[k].a);

  try {
    load_model(NGREM_TEST_DATA_DIR "/bad_sum.json");
    FAIL("bad_sum.json should not validate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NormalizationOutOfTolerance);
  }
  CHECK_THROWS_AS(parse_model_json("{\"n\": 2}"), Error);
  CHECK_THROWS_AS(parse_model_json("not json"), Error);
  CHECK_THROWS_AS(parse_model_json(R"({"n": 1, "gamma": ["x"], "weights": []})"), Error);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("08") == Rational(8));
  CHECK(parse_rational("-2.5e-1") == Rational(-1, 4));
  CHECK(parse_rational("1e2") == Rational(100));
  CHECK(rational_from_double(0.1) == Rational(1, 10));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
}
