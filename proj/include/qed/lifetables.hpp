// SPDX-License-Identifier: Apache-2.0
//
// Applied layer: turn HR and joint-life records into truncated-censored
// observations over (age at exit, service at exit) or (husband age, wife
// age), run the bivariate estimator, and emit distribution and selection
// decrement tables.
//
// Employee observations live on an age/service lattice. The censoring set of
// a subject still employed at the snapshot (and the age<entry part of the
// truncation set) is bounded by a diagonal (service grows with age), which a
// box union cannot carry exactly; it is realized as one thin box per age
// knot, exact at every lattice atom. Censoring sets are clipped to the
// complement of the truncation set, which the self-consistency theory
// requires.

#pragma once

#include "qed/estimator.hpp"

namespace qed {

// Calendar date as days since the civil epoch (1970-01-01); only differences
// are used, converted to years through 365.25.
struct EmployeeRecord {
  long birth_days = 0;
  long hire_days = 0;
  std::optional<long> term_days;  // empty = still employed at period end
  int reason = 3;                 // 1 death, 2 resignation/retirement, 3 other
  long period_start_days = 0;
  long period_end_days = 0;
};

inline constexpr double kDaysPerYear = 365.25;

struct EmployeeSummary {
  double entry_age = 0.0;      // age at max(hire, period start)
  double entry_service = 0.0;  // service at max(hire, period start)
  double exit_age = 0.0;       // age at termination or period end
  double exit_service = 0.0;
  int reason = 3;              // effective reason (3 when active at period end)
};

struct EmployeeTableConfig {
  double age_step = 1.0;
  double service_step = 1.0;
  double min_age = 14.0;   // plausibility bounds for records
  double max_age = 110.0;
};

inline EmployeeSummary summarize_employee(const EmployeeRecord& r,
                                          const EmployeeTableConfig& cfg = {}) {
  if (r.period_end_days < r.period_start_days) {
    throw std::invalid_argument("employee record: period end before start");
  }
  if (!(r.birth_days < r.hire_days)) {
    throw std::invalid_argument("employee record: hire date not after birth");
  }
  if (r.reason != 1 && r.reason != 2 && r.reason != 3) {
    throw std::invalid_argument("employee record: reason must be 1, 2 or 3");
  }
  long exit_days = r.period_end_days;
  int reason = 3;
  if (r.term_days) {
    if (*r.term_days < r.hire_days) {
      throw std::invalid_argument("employee record: termination before hire");
    }
    if (*r.term_days < r.period_start_days) {
      throw std::invalid_argument(
          "employee record: termination before the observation window");
    }
    if (*r.term_days <= r.period_end_days) {
      exit_days = *r.term_days;
      reason = r.reason;
    }
  }
  EmployeeSummary s;
  long entry_days = std::max(r.hire_days, r.period_start_days);
  s.entry_age = static_cast<double>(entry_days - r.birth_days) / kDaysPerYear;
  s.entry_service = static_cast<double>(entry_days - r.hire_days) / kDaysPerYear;
  s.exit_age = static_cast<double>(exit_days - r.birth_days) / kDaysPerYear;
  s.exit_service = static_cast<double>(exit_days - r.hire_days) / kDaysPerYear;
  s.reason = reason;
  if (s.exit_service > s.exit_age) {
    throw std::invalid_argument("employee record: service exceeds age");
  }
  if (s.entry_age < cfg.min_age || s.exit_age > cfg.max_age) {
    throw std::invalid_argument("employee record: age outside plausible bounds");
  }
  return s;
}

namespace detail {

inline double snap(double v, double step) {
  return std::round(v / step) * step;
}
inline double snap_down(double v, double step) {
  return std::floor(v / step + 1e-9) * step;
}

// Lattice knots covering [lo, hi] at the given step.
inline std::vector<double> lattice(double lo, double hi, double step) {
  std::vector<double> out;
  long first = static_cast<long>(std::floor(lo / step + 1e-9));
  long last = static_cast<long>(std::ceil(hi / step - 1e-9));
  for (long i = first; i <= last; ++i) {
    out.push_back(static_cast<double>(i) * step);
  }
  return out;
}

}  // namespace detail

// Observation over (age at exit x, service at exit e) on the given age
// lattice. Truncation: exits before the entry age were never observable, and
// exits at or after it with less service than the entry service belong to
// other careers:
//   T = (x < t, e < x)  U  (x >= t, e < tau).
// Censoring by termination reason: death observes the exact pair; resignation
// fixes the service and right-censors the age; anything else leaves the
// subject on a future diagonal, e <= x - x_k + e_k, with e >= tau to stay
// clear of T.
inline Observation employee_regions(const EmployeeSummary& s,
                                    std::span<const double> age_knots,
                                    const EmployeeTableConfig& cfg = {}) {
  const double t = detail::snap_down(s.entry_age, cfg.age_step);
  const double tau = detail::snap_down(s.entry_service, cfg.service_step);
  const double x_k = detail::snap(s.exit_age, cfg.age_step);
  const double e_k =
      std::min(detail::snap(s.exit_service, cfg.service_step),
               x_k);  // keep e <= x on the lattice
  const double hire_gap = x_k - e_k;  // lattice hire age

  Region trunc(2);
  {
    std::vector<Box> pieces;
    for (double a : age_knots) {
      if (a >= t) break;
      // x = a, e < a
      pieces.push_back(Box{Interval::point(a), Interval::below(a)});
    }
    if (tau > 0.0) {
      pieces.push_back(Box{Interval::above(t, /*open=*/false),
                           Interval::below(tau)});
    }
    trunc = Region(2, std::move(pieces));
  }

  Region censor(2);
  switch (s.reason) {
    case 1:
      censor = Region::from_box(Box{Interval::point(x_k), Interval::point(e_k)});
      break;
    case 2:
      censor = Region::from_box(
          Box{Interval::above(x_k), Interval::point(e_k)});
      break;
    default: {
      // Diagonal wedge e in [tau, x - hire_gap], one box per age knot; the
      // service floor at tau and the age floor at t keep the wedge outside T
      // even when snapping moves the bounds by a knot.
      std::vector<Box> cols;
      for (double a : age_knots) {
        if (a < t) continue;
        double top = a - hire_gap;
        if (top < tau) continue;
        cols.push_back(Box{Interval::point(a),
                           Interval{tau, top, false, false}});
      }
      if (cols.empty()) {
        // No knot reaches the diagonal; fall back to the exact snapshot.
        cols.push_back(Box{Interval::point(x_k), Interval::point(e_k)});
      }
      censor = Region(2, std::move(cols));
      break;
    }
  }
  return Observation(std::move(censor), std::move(trunc), Scheme::general);
}

inline Observation employee_regions(const EmployeeRecord& rec,
                                    const EmployeeTableConfig& cfg = {}) {
  EmployeeSummary s = summarize_employee(rec, cfg);
  auto knots = detail::lattice(cfg.min_age, cfg.max_age, cfg.age_step);
  return employee_regions(s, knots, cfg);
}

struct EmployeeDataset {
  std::vector<Observation> observations;
  Grid grid;
  std::size_t skipped = 0;  // records outside the observation window
};

// Builds observations and the estimation grid (age x service lattice with
// the service <= age constraint) from per-subject summaries.
inline EmployeeDataset build_employee_dataset(
    std::span<const EmployeeSummary> summaries,
    const EmployeeTableConfig& cfg = {}) {
  if (summaries.empty()) {
    throw std::invalid_argument("build_employee_dataset: no usable records");
  }
  double min_a = kPosInf, max_a = kNegInf, max_s = 0.0;
  for (const auto& s : summaries) {
    min_a = std::min(min_a, s.entry_age);
    max_a = std::max(max_a, s.exit_age);
    max_s = std::max(max_s, s.exit_service);
  }
  // One padding knot beyond the top so right-open censor rays have an atom.
  auto ages = detail::lattice(min_a, max_a + cfg.age_step, cfg.age_step);
  auto services =
      detail::lattice(0.0, max_s + cfg.service_step, cfg.service_step);

  EmployeeDataset out{
      {},
      Grid({ages, services},
           [](std::span<const double> p) { return p[1] <= p[0] + 1e-9; }),
      0};
  for (const auto& s : summaries) {
    out.observations.push_back(employee_regions(s, ages, cfg));
  }
  return out;
}

// Record-level convenience: records terminating before the window are
// counted in `skipped` and dropped.
inline EmployeeDataset build_employee_dataset(
    std::span<const EmployeeRecord> records,
    const EmployeeTableConfig& cfg = {}) {
  std::vector<EmployeeSummary> summaries;
  std::size_t skipped = 0;
  for (const auto& r : records) {
    if (r.term_days && *r.term_days < r.period_start_days) {
      ++skipped;
      continue;
    }
    summaries.push_back(summarize_employee(r, cfg));
  }
  if (summaries.empty()) {
    throw std::invalid_argument("build_employee_dataset: no usable records");
  }
  EmployeeDataset out = build_employee_dataset(summaries, cfg);
  out.skipped = skipped;
  return out;
}

// Conditional CDF of exit age given the entry age falling in the lattice
// cell containing hire_age. The second grid axis either carries the service
// at exit (entry age = age - service) or the hire age directly.
enum class SelectionAxis { service, hire_age };

struct ConditionalCdf {
  double hire_age = 0.0;
  std::vector<double> ages;
  std::vector<double> cdf;
};

inline ConditionalCdf selection_table(
    const MassFunction& p, double hire_age, double stratum_width,
    SelectionAxis axis = SelectionAxis::service) {
  if (p.grid().dim() != 2) {
    throw std::invalid_argument("selection_table: bivariate estimate required");
  }
  if (!(stratum_width > 0)) {
    throw std::invalid_argument("selection_table: stratum width must be > 0");
  }
  const Grid& g = p.grid();
  const auto& ages = g.axis(0);
  const auto& second = g.axis(1);
  double support_lo, support_hi;
  if (axis == SelectionAxis::service) {
    support_lo = ages.front() - second.back();
    support_hi = ages.back() - second.front();
  } else {
    support_lo = second.front();
    support_hi = second.back();
  }
  if (hire_age < support_lo - stratum_width ||
      hire_age > support_hi + stratum_width) {
    throw std::invalid_argument("selection_table: hire age outside grid support");
  }
  std::vector<double> mass_by_age(ages.size(), 0.0);
  double total = 0.0;
  std::vector<double> pt(2);
  for (std::size_t c = 0; c < p.size(); ++c) {
    g.atom(c, pt);
    double entry = axis == SelectionAxis::service ? pt[0] - pt[1] : pt[1];
    if (std::fabs(entry - hire_age) <= 0.5 * stratum_width + 1e-9) {
      std::size_t i = static_cast<std::size_t>(
          std::lower_bound(ages.begin(), ages.end(), pt[0]) - ages.begin());
      mass_by_age[i] += p.mass()[c];
      total += p.mass()[c];
    }
  }
  if (!(total > 0.0)) {
    throw std::runtime_error("selection_table: empty stratum at hire age " +
                             std::to_string(hire_age));
  }
  ConditionalCdf out;
  out.hire_age = hire_age;
  double cum = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    cum += mass_by_age[i] / total;
    out.ages.push_back(ages[i]);
    out.cdf.push_back(std::min(1.0, cum));
  }
  if (!out.cdf.empty()) out.cdf.back() = 1.0;
  return out;
}

// F(age, service) on a regular lattice; rows = ages, columns = services.
struct CdfMatrix {
  std::vector<double> ages;
  std::vector<double> services;
  std::vector<std::vector<double>> values;  // [age][service]
};

inline CdfMatrix cdf_table(const MassFunction& p, double age_step,
                           double service_step) {
  if (p.grid().dim() != 2) {
    throw std::invalid_argument("cdf_table: bivariate estimate required");
  }
  if (!(age_step > 0) || !(service_step > 0)) {
    throw std::invalid_argument("cdf_table: steps must be positive");
  }
  const auto& ga = p.grid().axis(0);
  const auto& gs = p.grid().axis(1);
  CdfMatrix m;
  m.ages = detail::lattice(ga.front(), ga.back(), age_step);
  m.services = detail::lattice(std::max(0.0, gs.front()), gs.back(), service_step);
  m.values.resize(m.ages.size());
  std::vector<double> pt(2);
  for (std::size_t i = 0; i < m.ages.size(); ++i) {
    m.values[i].resize(m.services.size());
    for (std::size_t j = 0; j < m.services.size(); ++j) {
      pt[0] = m.ages[i];
      pt[1] = m.services[j];
      m.values[i][j] = p.cdf(pt);
    }
  }
  return m;
}

// --- Joint-life (two lives) observations -----------------------------------

struct JointLifeRecord {
  double entry_age_1 = 0.0;  // age at contract conclusion, first life
  double entry_age_2 = 0.0;
  double elapsed = 0.0;      // time from conclusion to the data date
  double exit_age_1 = 0.0;   // death age, or current age when alive
  double exit_age_2 = 0.0;
  bool dead_1 = false;
  bool dead_2 = false;
};

// Censoring per the four joint-life cases (both dead: exact; one dead: ray;
// both alive: open upper quadrant) and truncation
//   T = (m < t, w < inf) U (m < inf, w < tau).
inline Observation joint_life_regions(const JointLifeRecord& r) {
  const double t = r.entry_age_1, tau = r.entry_age_2, y = r.elapsed;
  const double m_k = r.exit_age_1, w_k = r.exit_age_2;
  if (!(y > 0)) {
    throw std::invalid_argument("joint-life record: elapsed time must be > 0");
  }
  if (m_k < t || w_k < tau) {
    throw std::invalid_argument("joint-life record: exit age before entry age");
  }
  const double tol = 1e-9;
  auto close_to = [tol](double a, double b) { return std::fabs(a - b) <= tol; };

  Region censor(2);
  if (r.dead_1 && r.dead_2) {
    if (!(m_k - t < y + tol) || !(w_k - tau < y + tol)) {
      throw std::invalid_argument(
          "joint-life record: death ages inconsistent with elapsed time");
    }
    censor = Region::from_box(Box{Interval::point(m_k), Interval::point(w_k)});
  } else if (!r.dead_1 && r.dead_2) {
    if (!close_to(m_k - t, y) || !(y > w_k - tau - tol)) {
      throw std::invalid_argument("joint-life record: matches no censoring case");
    }
    censor = Region::from_box(Box{Interval::above(m_k), Interval::point(w_k)});
  } else if (r.dead_1 && !r.dead_2) {
    if (!close_to(w_k - tau, y) || !(y > m_k - t - tol)) {
      throw std::invalid_argument("joint-life record: matches no censoring case");
    }
    censor = Region::from_box(Box{Interval::point(m_k), Interval::above(w_k)});
  } else {
    if (!close_to(m_k - t, y) || !close_to(w_k - tau, y)) {
      throw std::invalid_argument("joint-life record: matches no censoring case");
    }
    censor = Region::from_box(Box{Interval::above(m_k), Interval::above(w_k)});
  }
  Region trunc(2);
  {
    std::vector<Box> pieces;
    if (t > 0) pieces.push_back(Box{Interval::below(t), Interval::all()});
    if (tau > 0) pieces.push_back(Box{Interval::all(), Interval::below(tau)});
    trunc = Region(2, std::move(pieces));
  }
  return Observation(std::move(censor), std::move(trunc), Scheme::general);
}

}  // namespace qed
