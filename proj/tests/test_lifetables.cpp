// SPDX-License-Identifier: Apache-2.0

#include "qed/lifetables.hpp"

#include <gtest/gtest.h>

namespace qed {
namespace {

std::vector<double> int_knots(double lo, double hi) {
  std::vector<double> k;
  for (double a = lo; a <= hi + 1e-9; a += 1.0) k.push_back(a);
  return k;
}

EmployeeSummary summary(double entry_age, double entry_service,
                        double exit_age, double exit_service, int reason) {
  EmployeeSummary s;
  s.entry_age = entry_age;
  s.entry_service = entry_service;
  s.exit_age = exit_age;
  s.exit_service = exit_service;
  s.reason = reason;
  return s;
}

TEST(EmployeeRegions, DeathGivesExactPair) {
  auto knots = int_knots(16, 80);
  Observation o = employee_regions(summary(30, 0, 60, 30, 1), knots);
  EXPECT_FALSE(o.censored());
  std::vector<double> pt{60, 30};
  EXPECT_TRUE(o.censor.contains(pt));
  pt = {60, 29};
  EXPECT_FALSE(o.censor.contains(pt));
}

TEST(EmployeeRegions, ResignationCensorsAgeAlongFixedService) {
  auto knots = int_knots(16, 80);
  Observation o = employee_regions(summary(30, 0, 45, 15, 2), knots);
  std::vector<double> in{50, 15}, wrong_service{50, 16}, behind{45, 15};
  EXPECT_TRUE(o.censor.contains(in));
  EXPECT_FALSE(o.censor.contains(wrong_service));
  EXPECT_FALSE(o.censor.contains(behind));  // x > x_k is strict
}

TEST(EmployeeRegions, ActiveSubjectOnFutureDiagonalWedge) {
  // Hired at 30 inside the window, still active at age 40 with service 10:
  // censor membership on lattice atoms equals e <= x - 30 (with e >= 0).
  auto knots = int_knots(16, 80);
  Observation o = employee_regions(summary(30, 0, 40, 10, 3), knots);
  for (double x = 16; x <= 80; x += 1.0) {
    for (double e = 0; e <= std::min(x, 60.0); e += 1.0) {
      std::vector<double> pt{x, e};
      bool expected = x >= 30.0 && e <= x - 30.0;
      EXPECT_EQ(o.censor.contains(pt), expected) << x << "," << e;
    }
  }
  // Truth retained on the diagonal: e.g. exit at 52 with service 22.
  std::vector<double> future{52, 22};
  EXPECT_TRUE(o.censor.contains(future));
}

TEST(EmployeeRegions, TruncationPerEntryAgeAndService) {
  // Hired before the window: entry at age 35 with 5 years of service.
  auto knots = int_knots(16, 80);
  Observation o = employee_regions(summary(35, 5, 42, 12, 3), knots);
  // Exits before entry age were unobservable (any service below the age).
  std::vector<double> pre{30, 8};
  EXPECT_TRUE(o.trunc.contains(pre));
  // Exits after entry age with less service than the entry service too.
  std::vector<double> low_service{50, 3};
  EXPECT_TRUE(o.trunc.contains(low_service));
  std::vector<double> observable{50, 20};
  EXPECT_FALSE(o.trunc.contains(observable));
  // Censoring stays clear of the truncation set.
  EXPECT_TRUE(o.censor.disjoint_with(o.trunc));
}

TEST(EmployeeRegions, HireAtPeriodStartHasNoServiceTruncation) {
  auto knots = int_knots(16, 80);
  Observation o = employee_regions(summary(30, 0, 40, 10, 1), knots);
  // tau = 0: the only truncation is the age part below 30.
  std::vector<double> pre{25, 3};
  EXPECT_TRUE(o.trunc.contains(pre));
  std::vector<double> post{35, 0};
  EXPECT_FALSE(o.trunc.contains(post));
}

TEST(EmployeeRegions, CensorAtomsRespectServiceLeAge) {
  auto knots = int_knots(16, 80);
  for (int reason : {1, 2, 3}) {
    Observation o = employee_regions(summary(25, 2, 48, 25, reason), knots);
    for (const auto& box : o.censor.boxes()) {
      for (double x = 16; x <= 80; x += 1.0) {
        for (double e = 0; e <= 80; e += 1.0) {
          std::vector<double> pt{x, e};
          if (box.contains(pt)) EXPECT_LE(e, x) << reason;
        }
      }
    }
  }
}

TEST(SummarizeEmployee, ComputesAgesFromDates) {
  EmployeeRecord r;
  r.birth_days = 0;
  r.hire_days = static_cast<long>(30 * kDaysPerYear);
  r.period_start_days = static_cast<long>(35 * kDaysPerYear);
  r.period_end_days = static_cast<long>(45 * kDaysPerYear);
  r.term_days = static_cast<long>(40 * kDaysPerYear);
  r.reason = 2;
  EmployeeSummary s = summarize_employee(r);
  // Dates are integer day counts, so ages carry sub-0.01 rounding.
  EXPECT_NEAR(s.entry_age, 35.0, 0.01);
  EXPECT_NEAR(s.entry_service, 5.0, 0.01);
  EXPECT_NEAR(s.exit_age, 40.0, 0.01);
  EXPECT_NEAR(s.exit_service, 10.0, 0.01);
  EXPECT_EQ(s.reason, 2);
  // Termination after the period end: treated as active at the snapshot.
  r.term_days = static_cast<long>(50 * kDaysPerYear);
  s = summarize_employee(r);
  EXPECT_EQ(s.reason, 3);
  EXPECT_NEAR(s.exit_age, 45.0, 0.01);
}

TEST(SummarizeEmployee, RejectsBadRecords) {
  EmployeeRecord r;
  r.birth_days = 1000;
  r.hire_days = 100;  // hire before birth
  r.period_start_days = 2000;
  r.period_end_days = 3000;
  EXPECT_THROW(summarize_employee(r), std::invalid_argument);
  r.hire_days = 100000;
  r.reason = 7;
  EXPECT_THROW(summarize_employee(r), std::invalid_argument);
}

TEST(JointLife, FourCensoringCases) {
  // Both dead inside the window.
  JointLifeRecord both{30, 28, 10, 36, 33, true, true};
  Observation o = joint_life_regions(both);
  std::vector<double> pt{36, 33};
  EXPECT_TRUE(o.censor.contains(pt));
  EXPECT_FALSE(o.censored());

  // Both alive at the valuation date: open upper quadrant.
  JointLifeRecord alive{30, 28, 10, 40, 38, false, false};
  o = joint_life_regions(alive);
  pt = {41, 39};
  EXPECT_TRUE(o.censor.contains(pt));
  pt = {40, 39};
  EXPECT_FALSE(o.censor.contains(pt));

  // Husband alive, wife dead.
  JointLifeRecord wife_dead{30, 28, 10, 40, 33, false, true};
  o = joint_life_regions(wife_dead);
  pt = {45, 33};
  EXPECT_TRUE(o.censor.contains(pt));
  pt = {45, 34};
  EXPECT_FALSE(o.censor.contains(pt));

  // Husband dead, wife alive.
  JointLifeRecord husband_dead{30, 28, 10, 36, 38, true, false};
  o = joint_life_regions(husband_dead);
  pt = {36, 40};
  EXPECT_TRUE(o.censor.contains(pt));
}

TEST(JointLife, TruncationIsUnionOfEntryStrips) {
  JointLifeRecord alive{30, 28, 10, 40, 38, false, false};
  Observation o = joint_life_regions(alive);
  std::vector<double> pt{29, 50};
  EXPECT_TRUE(o.trunc.contains(pt));
  pt = {50, 27};
  EXPECT_TRUE(o.trunc.contains(pt));
  pt = {31, 29};
  EXPECT_FALSE(o.trunc.contains(pt));
}

TEST(JointLife, InconsistentRecordThrows) {
  // Claims both alive but exit ages disagree with the elapsed time.
  JointLifeRecord bad{30, 28, 10, 44, 38, false, false};
  EXPECT_THROW(joint_life_regions(bad), std::invalid_argument);
}

TEST(SelectionTable, HireAgeAxisIndependenceReducesToMarginal) {
  // Product mass on (age, hire-age): the conditional CDF of age equals the
  // age marginal for every hire-age stratum.
  Grid g({{40.0, 50.0, 60.0}, {20.0, 30.0}});
  std::vector<double> age_m{0.2, 0.5, 0.3};
  std::vector<double> hire_m{0.4, 0.6};
  std::vector<double> w;
  for (double a : age_m) {
    for (double h : hire_m) w.push_back(a * h);
  }
  MassFunction p = MassFunction::from_weights(g, w);
  for (double h : {20.0, 30.0}) {
    ConditionalCdf c = selection_table(p, h, 10.0, SelectionAxis::hire_age);
    EXPECT_NEAR(c.cdf[0], 0.2, 1e-12);
    EXPECT_NEAR(c.cdf[1], 0.7, 1e-12);
    EXPECT_NEAR(c.cdf[2], 1.0, 1e-12);
  }
}

TEST(SelectionTable, DiagonalConcentration) {
  // Mass on the diagonal e = x - 20 only.
  Grid g({{30.0, 40.0}, {10.0, 20.0}});
  MassFunction p(g, {0.5, 0.0, 0.0, 0.5});
  ConditionalCdf c = selection_table(p, 20.0, 1.0);
  EXPECT_NEAR(c.cdf[0], 0.5, 1e-12);
  EXPECT_NEAR(c.cdf[1], 1.0, 1e-12);
  // Stratum away from the diagonal is empty.
  EXPECT_THROW(selection_table(p, 25.0, 1.0), std::runtime_error);
}

TEST(CdfTable, SingleAtomStepsAndMonotone) {
  Grid g({{30.0}, {5.0}});
  MassFunction p(g, {1.0});
  CdfMatrix m = cdf_table(p, 2.0, 4.0);
  EXPECT_EQ(m.values.back().back(), 1.0);
  for (std::size_t i = 0; i < m.ages.size(); ++i) {
    for (std::size_t j = 0; j < m.services.size(); ++j) {
      double expected = (m.ages[i] >= 30.0 && m.services[j] >= 5.0) ? 1.0 : 0.0;
      EXPECT_EQ(m.values[i][j], expected);
      if (i > 0) EXPECT_GE(m.values[i][j], m.values[i - 1][j]);
      if (j > 0) EXPECT_GE(m.values[i][j], m.values[i][j - 1]);
    }
  }
}

TEST(CdfTable, MatchesCdfEvalAtLatticePoints) {
  Grid g({{30.0, 32.0, 34.0}, {0.0, 4.0}});
  std::vector<double> w{0.1, 0.2, 0.15, 0.15, 0.1, 0.3};
  MassFunction p = MassFunction::from_weights(g, w);
  CdfMatrix m = cdf_table(p, 2.0, 4.0);
  for (std::size_t i = 0; i < m.ages.size(); ++i) {
    for (std::size_t j = 0; j < m.services.size(); ++j) {
      std::vector<double> pt{m.ages[i], m.services[j]};
      EXPECT_DOUBLE_EQ(m.values[i][j], p.cdf(pt));
    }
  }
}

TEST(BuildEmployeeDataset, FitsSmokeAndSkipsOutOfWindow) {
  std::vector<EmployeeRecord> records;
  long y = static_cast<long>(kDaysPerYear);
  for (int i = 0; i < 40; ++i) {
    EmployeeRecord r;
    r.birth_days = 0;
    r.hire_days = (25 + (i % 10)) * y;
    r.period_start_days = 30 * y;
    r.period_end_days = 40 * y;
    if (i % 3 == 0) {
      r.term_days = (33 + (i % 6)) * y;
      r.reason = (i % 2) ? 1 : 2;
    }
    records.push_back(r);
  }
  // One record that left before the window.
  EmployeeRecord gone;
  gone.birth_days = 0;
  gone.hire_days = 25 * y;
  gone.term_days = 28 * y;
  gone.reason = 2;
  gone.period_start_days = 30 * y;
  gone.period_end_days = 40 * y;
  records.push_back(gone);

  EmployeeDataset ds = build_employee_dataset(records);
  EXPECT_EQ(ds.skipped, 1u);
  EXPECT_EQ(ds.observations.size(), 40u);
  EstimatorConfig cfg;
  cfg.tol = 1e-8;
  FitResult fr = fit(ds.observations, ds.grid, cfg);
  EXPECT_TRUE(fr.converged);
  long double total = 0;
  for (double m : fr.estimate.mass()) total += m;
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-12);
}

}  // namespace
}  // namespace qed
