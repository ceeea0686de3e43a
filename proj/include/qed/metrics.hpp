// SPDX-License-Identifier: Apache-2.0
//
// Accuracy criteria for the simulation studies: Chebyshev (sup-norm) distance
// between an estimated and a reference CDF, quantile relative errors, and
// pointwise confidence bands across replications.

#pragma once

#include <functional>
#include <map>
#include <string>

#include "qed/mass_function.hpp"
#include "qed/observation.hpp"

namespace qed {

// Step-CDF evaluation helper over sorted atoms with per-atom masses.
struct StepCdf {
  std::vector<double> atoms;
  std::vector<double> cum;  // cumulative mass at each atom (right-continuous)

  explicit StepCdf(const MassFunction& p) {
    if (p.grid().dim() != 1) {
      throw std::invalid_argument("StepCdf: univariate mass function required");
    }
    atoms = p.grid().axis(0);
    cum.resize(atoms.size());
    long double c = 0.0L;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      c += p.mass()[i];
      cum[i] = static_cast<double>(c);
    }
  }

  double value(double x) const {  // F(x)
    auto it = std::upper_bound(atoms.begin(), atoms.end(), x);
    if (it == atoms.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - atoms.begin()) - 1];
  }
  double left_limit(double x) const {  // F(x-)
    auto it = std::lower_bound(atoms.begin(), atoms.end(), x);
    if (it == atoms.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - atoms.begin()) - 1];
  }
};

using CdfFn = std::function<double(double)>;

// sup |F_est - F| over the default candidate set: every estimate atom
// evaluated from the right and from just below (which reads a step
// reference's left limit and a continuous reference's value), plus midpoints
// between consecutive atoms. For a step estimate against a monotone
// reference this finite set attains the supremum, because the discrepancy is
// extremal at jump points of either function.
inline double chebyshev(const MassFunction& est, const CdfFn& truth_cdf) {
  StepCdf f(est);
  double sup = 0.0;
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    double a = f.atoms[i];
    sup = std::max(sup, std::fabs(f.value(a) - truth_cdf(a)));
    sup = std::max(sup, std::fabs(f.left_limit(a) -
                                  truth_cdf(std::nextafter(a, kNegInf))));
    if (i + 1 < f.atoms.size()) {
      double mid = 0.5 * (a + f.atoms[i + 1]);
      sup = std::max(sup, std::fabs(f.value(mid) - truth_cdf(mid)));
    }
  }
  return sup;
}

// sup over an explicit candidate set.
inline double chebyshev(const MassFunction& est, const CdfFn& truth_cdf,
                        std::span<const double> eval_points) {
  if (eval_points.empty()) {
    throw std::invalid_argument("chebyshev: empty evaluation point set");
  }
  StepCdf f(est);
  double sup = 0.0;
  for (double x : eval_points) {
    sup = std::max(sup, std::fabs(f.value(x) - truth_cdf(x)));
  }
  return sup;
}

// Step-vs-step distance on the union of both atom sets, evaluated from both
// sides of every atom; symmetric in its arguments.
inline double chebyshev(const MassFunction& a, const MassFunction& b) {
  StepCdf fa(a), fb(b);
  double sup = 0.0;
  auto probe = [&](double x) {
    sup = std::max(sup, std::fabs(fa.value(x) - fb.value(x)));
    sup = std::max(sup, std::fabs(fa.left_limit(x) - fb.left_limit(x)));
  };
  for (double x : fa.atoms) probe(x);
  for (double x : fb.atoms) probe(x);
  return sup;
}

// Multivariate sup over a candidate lattice built from each axis' atoms,
// midpoints between consecutive atoms, and one point beyond the last atom.
inline double chebyshev_md(
    const MassFunction& est,
    const std::function<double(std::span<const double>)>& truth_cdf) {
  const Grid& g = est.grid();
  const std::size_t d = g.dim();
  if (d == 1) {
    return chebyshev(est, [&](double x) {
      return truth_cdf(std::span(&x, 1));
    });
  }
  // Candidate coordinates per axis: atoms, points just below each atom
  // (left limits), midpoints, and one point beyond each end.
  std::vector<std::vector<double>> pts(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto& ax = g.axis(k);
    for (std::size_t i = 0; i < ax.size(); ++i) {
      pts[k].push_back(ax[i]);
      pts[k].push_back(std::nextafter(ax[i], kNegInf));
      pts[k].push_back(i + 1 < ax.size() ? 0.5 * (ax[i] + ax[i + 1])
                                         : ax[i] + 1.0);
      if (i == 0) pts[k].push_back(ax[0] - 1.0);
    }
    std::sort(pts[k].begin(), pts[k].end());
  }
  // CDF of the estimate on the full (unconstrained) lattice via a running
  // prefix over each dimension.
  std::vector<std::size_t> n(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    n[k] = g.axis(k).size();
    total *= n[k];
  }
  std::vector<double> cdf(total, 0.0);
  std::vector<double> pt(d);
  for (std::size_t c = 0; c < est.size(); ++c) {
    g.atom(c, pt);
    std::size_t flat = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& ax = g.axis(k);
      std::size_t i = static_cast<std::size_t>(
          std::lower_bound(ax.begin(), ax.end(), pt[k]) - ax.begin());
      flat = flat * n[k] + i;
    }
    cdf[flat] += est.mass()[c];
  }
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t stride = 1;
    for (std::size_t j = k + 1; j < d; ++j) stride *= n[j];
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t idx_k = (f / stride) % n[k];
      if (idx_k > 0) cdf[f] += cdf[f - stride];
    }
  }
  auto est_cdf_at = [&](std::span<const double> x) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& ax = g.axis(k);
      auto it = std::upper_bound(ax.begin(), ax.end(), x[k]);
      if (it == ax.begin()) return 0.0;
      flat = flat * n[k] + static_cast<std::size_t>(it - ax.begin()) - 1;
    }
    return cdf[flat];
  };
  // Walk the candidate lattice.
  double sup = 0.0;
  std::vector<std::size_t> cur(d, 0);
  std::vector<double> x(d);
  for (;;) {
    for (std::size_t k = 0; k < d; ++k) x[k] = pts[k][cur[k]];
    sup = std::max(sup, std::fabs(est_cdf_at(x) - truth_cdf(x)));
    std::size_t k = d;
    while (k-- > 0) {
      if (++cur[k] < pts[k].size()) break;
      cur[k] = 0;
      if (k == 0) return sup;
    }
  }
}

// Relative error of a quantile estimate.
inline double quantile_error(const MassFunction& est, double truth_quantile,
                             double q) {
  if (!(truth_quantile > 0.0)) {
    throw std::invalid_argument("quantile_error: reference quantile must be > 0");
  }
  return est.quantile(q) / truth_quantile;
}

struct Bands {
  std::vector<double> lower, mean, upper;
};

// Pointwise empirical alpha/2 and 1-alpha/2 quantiles plus the mean of CDF
// values across replications. rows[r][j] is replication r evaluated at the
// j-th common atom.
inline Bands bands(const std::vector<std::vector<double>>& rows, double alpha) {
  if (rows.size() < 2) {
    throw std::invalid_argument("bands: need at least two replications");
  }
  const std::size_t m = rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != m) {
      throw std::invalid_argument("bands: mismatched atom sets");
    }
  }
  const std::size_t n = rows.size();
  auto order_stat = [n](std::vector<double>& v, double p) {
    double k = std::ceil(p * static_cast<double>(n));
    std::size_t idx = k <= 1.0 ? 0 : std::min(n - 1, static_cast<std::size_t>(k) - 1);
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[idx];
  };
  Bands out;
  out.lower.resize(m);
  out.mean.resize(m);
  out.upper.resize(m);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    long double s = 0.0L;
    for (std::size_t r = 0; r < n; ++r) {
      col[r] = rows[r][j];
      s += col[r];
    }
    out.mean[j] = static_cast<double>(s / n);
    out.lower[j] = order_stat(col, alpha / 2.0);
    out.upper[j] = order_stat(col, 1.0 - alpha / 2.0);
  }
  return out;
}

// One replication's accuracy metrics.
struct ReplicationReport {
  double rho = 0.0;                       // Chebyshev distance to the truth
  std::map<double, double> delta;         // q -> relative quantile error
  Scheme scheme = Scheme::general;
  int n = 0;
  std::uint64_t seed = 0;
};

// One row of the per-scheme accuracy summary (quantiles and means of rho and
// of the median's relative error).
struct SummaryRow {
  std::string label;
  double rho_q01 = 0, rho_mean = 0, rho_q99 = 0;
  double delta_q01 = 0, delta_mean = 0, delta_q99 = 0;
};

inline double empirical_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("empirical_quantile: empty");
  double k = std::ceil(p * static_cast<double>(v.size()));
  std::size_t idx =
      k <= 1.0 ? 0 : std::min(v.size() - 1, static_cast<std::size_t>(k) - 1);
  std::nth_element(v.begin(), v.begin() + idx, v.end());
  return v[idx];
}

inline SummaryRow summarize(const std::string& label,
                            std::span<const ReplicationReport> reports,
                            double delta_q = 0.5) {
  if (reports.empty()) throw std::invalid_argument("summarize: no reports");
  std::vector<double> rho, del;
  rho.reserve(reports.size());
  del.reserve(reports.size());
  long double rs = 0.0L, ds = 0.0L;
  for (const auto& r : reports) {
    rho.push_back(r.rho);
    rs += r.rho;
    auto it = r.delta.find(delta_q);
    if (it != r.delta.end()) {
      del.push_back(it->second);
      ds += it->second;
    }
  }
  SummaryRow row;
  row.label = label;
  row.rho_mean = static_cast<double>(rs / reports.size());
  row.rho_q01 = empirical_quantile(rho, 0.01);
  row.rho_q99 = empirical_quantile(rho, 0.99);
  if (!del.empty()) {
    row.delta_mean = static_cast<double>(ds / del.size());
    row.delta_q01 = empirical_quantile(del, 0.01);
    row.delta_q99 = empirical_quantile(del, 0.99);
  }
  return row;
}

}  // namespace qed
