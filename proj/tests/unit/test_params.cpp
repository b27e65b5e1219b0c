#include <gtest/gtest.h>

#include <cmath>

#include "bcnls/params.hpp"

using namespace bcnls;

TEST(CriticalExponents, DimensionFourHasInfiniteUpperBound) {
  const auto ce = critical_exponents(4);
  EXPECT_DOUBLE_EQ(ce.lower, 2.0);
  EXPECT_TRUE(std::isinf(ce.upper));
}

TEST(CriticalExponents, FiniteDimensions) {
  EXPECT_DOUBLE_EQ(critical_exponents(5).lower, 1.8);
  EXPECT_DOUBLE_EQ(critical_exponents(5).upper, 5.0);
  EXPECT_DOUBLE_EQ(critical_exponents(8).lower, 1.5);
  EXPECT_DOUBLE_EQ(critical_exponents(8).upper, 2.0);
  for (int n = 5; n <= 40; ++n) {
    const auto ce = critical_exponents(n);
    EXPECT_GT(ce.lower, 1.0);
    EXPECT_LT(ce.lower, ce.upper);
  }
}

TEST(CriticalExponents, RejectsLowDimension) {
  try {
    critical_exponents(3);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ValidationKind::dimension);
  }
}

TEST(ExpandCoupling, ReducedForm) {
  const auto a = expand_coupling({{1.0, 2.0}, 0.5}, 2);
  EXPECT_EQ(a.row_major(), (std::vector<double>{1.0, 0.5, 0.5, 2.0}));
  const auto single = expand_coupling({{3.0}, 1.0}, 1);
  EXPECT_EQ(single.row_major(), (std::vector<double>{3.0}));
  const auto three = expand_coupling({{1.0, 1.0, 1.0}, 2.0}, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(three(j, k), j == k ? 1.0 : 2.0);
  EXPECT_TRUE(three.symmetric());
}

TEST(ExpandCoupling, RejectsNonPositiveEntries) {
  EXPECT_THROW(expand_coupling({{1.0, -1.0}, 0.5}, 2), ValidationError);
  EXPECT_THROW(expand_coupling({{1.0, 1.0}, 0.0}, 2), ValidationError);
  EXPECT_THROW(expand_coupling({{1.0}, 0.5}, 2), ValidationError);
  EXPECT_NO_THROW(expand_coupling({{1.0, 1.0}, 0.0}, 2, true));
}

TEST(ExpandCoupling, AlwaysSymmetric) {
  for (double beta : {0.01, 0.5, 3.0, 100.0}) {
    const auto a = expand_coupling({{0.3, 1.7, 2.2, 9.0}, beta}, 4);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) EXPECT_EQ(a(j, k), a(k, j));
  }
}

TEST(Validate, AcceptsInRange) {
  const auto v = validate({5, 2, 2.0, CouplingMatrix(2, {1, 0.1, 0.1, 1})});
  EXPECT_EQ(v.dimension(), 5);
  EXPECT_FALSE(v.out_of_range());
  EXPECT_DOUBLE_EQ(v.pohozaev_denominator(), 3.0);
}

TEST(Validate, ReportsFirstViolation) {
  auto kind_of = [](const ProblemParams& p, ValidationOptions o = {}) {
    try {
      validate(p, o);
    } catch (const ValidationError& e) {
      return e.kind();
    }
    return ValidationKind::options;
  };
  EXPECT_EQ(kind_of({5, 2, 6.0, CouplingMatrix(2, {1, 0.1, 0.1, 1})}), ValidationKind::exponent_range);
  EXPECT_EQ(kind_of({5, 2, 2.0, CouplingMatrix(2, {1, 0.1, 0.2, 1})}), ValidationKind::coupling_symmetry);
  EXPECT_EQ(kind_of({5, 2, 2.0, CouplingMatrix(2, {1, -0.1, -0.1, 1})}), ValidationKind::coupling_positivity);
  EXPECT_EQ(kind_of({3, 1, 2.0, CouplingMatrix(1, {1})}), ValidationKind::dimension);
  EXPECT_EQ(kind_of({5, 3, 2.0, CouplingMatrix(2, {1, 0.1, 0.1, 1})}), ValidationKind::coupling_shape);
  // p_* itself is outside the open window.
  EXPECT_EQ(kind_of({4, 1, 2.0, CouplingMatrix(1, {1})}), ValidationKind::exponent_range);
}

TEST(Validate, EscapeHatchFlagsOutOfRange) {
  const auto v = validate({4, 1, 2.0, CouplingMatrix(1, {1})}, {.allow_out_of_range = true});
  EXPECT_TRUE(v.out_of_range());
  const auto low = validate({2, 1, 3.0, CouplingMatrix(1, {1})}, {.allow_out_of_range = true});
  EXPECT_TRUE(low.out_of_range());
}

TEST(Validate, DimensionFourAcceptsLargeExponent) {
  EXPECT_FALSE(validate({4, 1, 50.0, CouplingMatrix(1, {1})}).out_of_range());
}

TEST(Validate, Idempotent) {
  const auto v = validate({6, 2, 2.0, CouplingMatrix(2, {1, 0.3, 0.3, 2})});
  const auto w = validate(v.raw());
  EXPECT_EQ(w.raw().coupling, v.raw().coupling);
  EXPECT_EQ(w.dimension(), v.dimension());
  EXPECT_EQ(w.exponent(), v.exponent());
  EXPECT_EQ(w.out_of_range(), v.out_of_range());
}

TEST(ScalingPairTest, RejectsOrigin) {
  EXPECT_THROW(checked_pair(0.0, 0.0), ValidationError);
  EXPECT_THROW(checked_pair(-1.0, 1.0), ValidationError);
  EXPECT_NO_THROW(checked_pair(0.0, 1.0));
}
