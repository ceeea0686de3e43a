// SPDX-License-Identifier: Apache-2.0

#include "qed/synth.hpp"

#include <gtest/gtest.h>

namespace qed {
namespace {

SchemeMix complete_only_mix() {
  SchemeMix m;
  m.fraction(Scheme::complete_nontruncated) = 1.0;
  return m;
}

TEST(SchemeMix, ValidatesFractionsAndWindows) {
  SchemeMix m = complete_only_mix();
  EXPECT_NO_THROW(m.validate());
  m.fraction(Scheme::complete_nontruncated) = 0.5;
  EXPECT_THROW(m.validate(), std::invalid_argument);  // sum != 1
  m.fraction(Scheme::complete_nontruncated) = 1.0;
  m.left_trunc = {0.5, 0.4};
  EXPECT_THROW(m.validate(), std::invalid_argument);  // hi < lo
}

TEST(SchemeMix, DoublyTruncatedWindowsMustBeOrdered) {
  SchemeMix m;
  m.fraction(Scheme::complete_doubly_truncated) = 1.0;
  m.left_trunc = {0.1, 0.7};
  m.right_trunc = {0.6, 0.9};  // overlaps: t1 < t2 not guaranteed
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m.left_trunc = {0.1, 0.5};
  EXPECT_NO_THROW(m.validate());
}

TEST(GenerateSample, CompleteMixGivesExactUntruncatedObservations) {
  DistSpec d = DistSpec::gamma(4.0, 1.7);
  Rng rng(1);
  SynthSample s = generate_sample(d, complete_only_mix(), 200, rng);
  ASSERT_EQ(s.observations.size(), 200u);
  EXPECT_EQ(s.rejected, 0);
  EXPECT_EQ(s.censor_fraction(), 0.0);
  EXPECT_EQ(s.trunc_fraction(), 0.0);
  for (std::size_t i = 0; i < s.observations.size(); ++i) {
    const Observation& o = s.observations[i];
    EXPECT_FALSE(o.censored());
    EXPECT_TRUE(o.censor.contains1(s.truths[i]));
  }
}

TEST(GenerateSample, TruthsSatisfyRegionInvariants) {
  DistSpec d = DistSpec::weibull(5.0, 10.0);
  Rng rng(7);
  SynthSample s = generate_sample(d, table3_example7_mix(), 800, rng);
  for (std::size_t i = 0; i < s.observations.size(); ++i) {
    const Observation& o = s.observations[i];
    EXPECT_TRUE(o.censor.contains1(s.truths[i])) << i;
    EXPECT_FALSE(o.trunc.contains1(s.truths[i])) << i;
    EXPECT_TRUE(o.censor.disjoint_with(o.trunc)) << i;
  }
  EXPECT_LT(s.degraded, 8);  // conditioned draws almost never degrade
}

TEST(GenerateSample, SameSeedBitIdentical) {
  DistSpec d = DistSpec::tweedie(1.7, 1.0, 1.0);
  Rng a(42), b(42);
  SynthSample s1 = generate_sample(d, table3_example9_mix(), 300, a);
  SynthSample s2 = generate_sample(d, table3_example9_mix(), 300, b);
  ASSERT_EQ(s1.truths.size(), s2.truths.size());
  for (std::size_t i = 0; i < s1.truths.size(); ++i) {
    EXPECT_EQ(s1.truths[i], s2.truths[i]);
  }
  EXPECT_EQ(s1.rejected, s2.rejected);
}

TEST(GenerateSample, SchemeFractionsWithinMultinomialTolerance) {
  DistSpec d = DistSpec::gamma(4.0, 1.7);
  Rng rng(99);
  SchemeMix mix = table3_example7_mix();
  const int n = 4000;
  SynthSample s = generate_sample(d, mix, n, rng);
  std::array<int, 13> counts{};
  for (const auto& o : s.observations) {
    counts[static_cast<std::size_t>(o.label)]++;
  }
  const double tol = 2.0 / std::sqrt(static_cast<double>(n));
  for (Scheme sc : kAllSchemes) {
    double realized =
        static_cast<double>(counts[static_cast<std::size_t>(sc)]) / n;
    EXPECT_NEAR(realized, mix.fraction(sc), tol + 0.01)
        << scheme_name(sc);
  }
}

TEST(GenerateSample, RealizedDegreesTrackConfiguredFractions) {
  DistSpec d = DistSpec::weibull(5.0, 10.0);
  Rng rng(5);
  SchemeMix mix = table3_example7_mix();
  SynthSample s = generate_sample(d, mix, 6000, rng);
  EXPECT_NEAR(s.censor_fraction(), 0.80, 0.02);
  // Windows sit inside the support, so realized truncation matches the mix.
  EXPECT_NEAR(s.trunc_fraction(), 0.55, 0.02);
}

TEST(GenerateSample, Example7CompleteSampleInflation) {
  // The latent complete sample behind the structure runs near twice the
  // observed size: N/n about 1.98.
  DistSpec d = DistSpec::weibull(5.0, 10.0);
  Rng rng(12);
  SynthSample s = generate_sample(d, table3_example7_mix(), 20000, rng);
  EXPECT_NEAR(s.complete_sample_ratio(), 1.98, 0.1);
}

TEST(GenerateSample, Example6TruncationDegreeAfterCalibration) {
  DistSpec d = DistSpec::tweedie(1.7, 1.0, 1.0);
  Rng rng(31);
  SchemeMix mix = example6_lt_rc_mix();
  DegreeTargets t;
  t.truncation = 0.645;
  mix = calibrate_mix(d, mix, t, rng);
  SynthSample s = generate_sample(d, mix, 20000, rng);
  EXPECT_GE(s.trunc_fraction(), 0.61);
  EXPECT_LE(s.trunc_fraction(), 0.68);
  EXPECT_NEAR(s.censor_fraction(), 0.385, 0.02);
}

TEST(CalibrateMix, CensoringTargetReallocatesFractions) {
  DistSpec d = DistSpec::gamma(4.0, 1.7);
  Rng rng(8);
  SchemeMix mix = table3_example7_mix();  // censored fraction 0.80
  DegreeTargets t;
  t.censoring = 0.4;
  SchemeMix cal = calibrate_mix(d, mix, t, rng);
  EXPECT_NEAR(cal.censored_fraction(), 0.4, 1e-9);
  // Truncation-class totals are preserved.
  EXPECT_NEAR(cal.truncated_fraction(), mix.truncated_fraction(), 1e-9);
  SynthSample s = generate_sample(d, cal, 4000, rng);
  EXPECT_NEAR(s.censor_fraction(), 0.4, 0.03);
}

TEST(CalibrateMix, ZeroCensoringTarget) {
  DistSpec d = DistSpec::gamma(4.0, 1.7);
  Rng rng(9);
  DegreeTargets t;
  t.censoring = 0.0;
  SchemeMix cal = calibrate_mix(d, table3_example7_mix(), t, rng);
  SynthSample s = generate_sample(d, cal, 2000, rng);
  EXPECT_EQ(s.censor_fraction(), 0.0);
}

TEST(CalibrateMix, TruncationTargetViaWindowShift) {
  DistSpec d = DistSpec::weibull(5.0, 10.0);
  Rng rng(10);
  DegreeTargets t;
  t.truncation = 0.55;
  SchemeMix cal = calibrate_mix(d, table3_example7_mix(), t, rng);
  Rng check(11);
  SynthSample s = generate_sample(d, cal, 20000, check);
  EXPECT_NEAR(s.trunc_fraction(), 0.55, 0.03);
}

TEST(CalibrateMix, RejectsOutOfRangeTargets) {
  DistSpec d = DistSpec::gamma(4.0, 1.7);
  Rng rng(13);
  DegreeTargets t;
  t.truncation = 0.99;
  EXPECT_THROW(calibrate_mix(d, table3_example7_mix(), t, rng),
               std::invalid_argument);
  DegreeTargets t2;
  t2.censoring = 0.5;  // complete-only mix cannot censor anything
  EXPECT_THROW(calibrate_mix(d, complete_only_mix(), t2, rng),
               std::invalid_argument);
  DegreeTargets t3;
  t3.truncation = 0.5;  // nothing to truncate either
  EXPECT_THROW(calibrate_mix(d, complete_only_mix(), t3, rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace qed
