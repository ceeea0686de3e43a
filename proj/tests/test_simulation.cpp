// SPDX-License-Identifier: Apache-2.0

#include "qed/simulation.hpp"

#include <gtest/gtest.h>

namespace qed {
namespace {

StudyConfig small_study() {
  StudyConfig cfg;
  cfg.dist = DistSpec::gamma(4.0, 1.7);
  cfg.mix = example8_scheme_mix(Scheme::right_censored_nontruncated);
  cfg.n = 60;
  cfg.replications = 8;
  cfg.seed = 77;
  cfg.estimator.tol = 1e-7;
  return cfg;
}

TEST(RunStudy, DeterministicAcrossJobCounts) {
  StudyConfig cfg = small_study();
  cfg.collect_curves = true;
  StudyResult serial = run_study(cfg);
  cfg.jobs = 2;
  StudyResult parallel = run_study(cfg);
  ASSERT_EQ(serial.replications.size(), parallel.replications.size());
  for (std::size_t r = 0; r < serial.replications.size(); ++r) {
    const auto& a = serial.replications[r].by_estimator[0];
    const auto& b = parallel.replications[r].by_estimator[0];
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.delta_median, b.delta_median);
    EXPECT_EQ(a.curve, b.curve);
  }
}

TEST(RunStudy, KmAndQedNearIdenticalOnLtRcData) {
  StudyConfig cfg;
  cfg.dist = DistSpec::tweedie(1.7, 1.0, 1.0);
  cfg.mix = example6_lt_rc_mix();
  cfg.n = 250;
  cfg.replications = 4;
  cfg.seed = 5;
  cfg.estimators = {EstimatorKind::qed, EstimatorKind::km};
  cfg.estimator.tol = 1e-10;
  cfg.estimator.max_iter = 200000;
  StudyResult r = run_study(cfg);
  for (const auto& rep : r.replications) {
    EXPECT_NEAR(rep.by_estimator[0].rho, rep.by_estimator[1].rho, 1e-5);
    EXPECT_EQ(rep.by_estimator[0].delta_median,
              rep.by_estimator[1].delta_median);
  }
}

TEST(RunStudy, KmRejectsUnsupportedSchemes) {
  StudyConfig cfg = small_study();
  cfg.mix = example8_scheme_mix(Scheme::interval_censored_nontruncated);
  cfg.estimators = {EstimatorKind::km};
  EXPECT_THROW(run_study(cfg), std::invalid_argument);
}

TEST(RunStudy, TurnbullRunsOnAllSchemes) {
  StudyConfig cfg = small_study();
  cfg.mix = table3_example9_mix();
  cfg.estimators = {EstimatorKind::qed, EstimatorKind::turnbull};
  cfg.replications = 3;
  StudyResult r = run_study(cfg);
  for (const auto& rep : r.replications) {
    EXPECT_GT(rep.by_estimator[0].rho, 0.0);
    EXPECT_GT(rep.by_estimator[1].rho, 0.0);
    EXPECT_LT(rep.by_estimator[0].rho, 1.0);
    EXPECT_LT(rep.by_estimator[1].rho, 1.0);
  }
}

TEST(RunStudy, CurvesAreCdfValuesOnLattice) {
  StudyConfig cfg = small_study();
  cfg.collect_curves = true;
  cfg.replications = 2;
  StudyResult r = run_study(cfg);
  ASSERT_EQ(r.lattice.size(), cfg.lattice_levels.size());
  for (const auto& rep : r.replications) {
    const auto& curve = rep.by_estimator[0].curve;
    ASSERT_EQ(curve.size(), r.lattice.size());
    for (std::size_t j = 1; j < curve.size(); ++j) {
      EXPECT_LE(curve[j - 1], curve[j] + 1e-12);  // nondecreasing
    }
    EXPECT_GE(curve.front(), 0.0);
    EXPECT_LE(curve.back(), 1.0);
  }
  SummaryRow row = r.summary(EstimatorKind::qed);
  EXPECT_GT(row.rho_mean, 0.0);
  Bands b = r.band(EstimatorKind::qed, 0.5);
  EXPECT_EQ(b.mean.size(), r.lattice.size());
}

}  // namespace
}  // namespace qed
