// SPDX-License-Identifier: Apache-2.0
//
// Discrete probability distribution over grid atoms: the estimator state and
// output of everything in this library. Mass sits on atoms (point masses),
// matching the step-function character of empirical-type estimators.

#pragma once

#include <cmath>
#include <numeric>

#include "qed/grid.hpp"

namespace qed {

class MassFunction {
 public:
  MassFunction(Grid grid, std::vector<double> mass)
      : grid_(std::move(grid)), mass_(std::move(mass)) {
    if (mass_.size() != grid_.size()) {
      throw std::invalid_argument("MassFunction: mass size != cell count");
    }
    long double total = 0.0L;
    for (double m : mass_) {
      if (!(m >= 0.0)) {
        throw std::invalid_argument("MassFunction: negative or NaN mass");
      }
      total += m;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9) {
      throw std::invalid_argument("MassFunction: total mass is not 1");
    }
  }

  static MassFunction uniform(Grid grid) {
    std::size_t n = grid.size();
    return MassFunction(std::move(grid), std::vector<double>(n, 1.0 / n));
  }

  // Normalizes arbitrary nonnegative weights.
  static MassFunction from_weights(Grid grid, std::vector<double> w) {
    long double total = 0.0L;
    for (double x : w) {
      if (!(x >= 0.0)) {
        throw std::invalid_argument("MassFunction: negative weight");
      }
      total += x;
    }
    if (!(total > 0.0L)) {
      throw std::invalid_argument("MassFunction: zero total weight");
    }
    for (double& x : w) x = static_cast<double>(x / total);
    return MassFunction(std::move(grid), std::move(w));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }

  // P(r): total mass of atoms inside the region.
  double measure(const Region& r) const {
    if (r.dim() != grid_.dim()) {
      throw std::invalid_argument("measure: dimension mismatch");
    }
    long double s = 0.0L;
    for (const auto& [b, e] : grid_.ranges(r)) {
      for (std::uint32_t i = b; i < e; ++i) s += mass_[i];
    }
    return static_cast<double>(s);
  }

  // P(b | c). When P(c) falls below eps_cond the ratio is taken against a
  // uniform spread over the cells of c, which keeps EM iterations defined
  // when mass transiently vanishes on a censoring set. Conditioning on a
  // region with no cells is ill-posed.
  double conditional(const Region& b, const Region& c,
                     double eps_cond = 1e-12) const {
    if (b.dim() != grid_.dim() || c.dim() != grid_.dim()) {
      throw std::invalid_argument("conditional: dimension mismatch");
    }
    std::size_t c_cells = grid_.count_cells(c);
    if (c_cells == 0) {
      throw std::invalid_argument(
          "conditional: conditioning region contains no grid cells");
    }
    Region bc = b.intersect(c);
    double pc = measure(c);
    if (pc < eps_cond) {
      return static_cast<double>(grid_.count_cells(bc)) /
             static_cast<double>(c_cells);
    }
    double r = measure(bc) / pc;
    return std::min(1.0, std::max(0.0, r));
  }

  // F(t) = P(X_j <= t_j for all j).
  double cdf(std::span<const double> t) const {
    if (t.size() != grid_.dim()) {
      throw std::invalid_argument("cdf: dimension mismatch");
    }
    Box orthant(grid_.dim());
    for (std::size_t d = 0; d < t.size(); ++d) {
      orthant.axes[d] = Interval::below(t[d], /*open=*/false);
    }
    return measure(Region::from_box(std::move(orthant)));
  }
  double cdf1(double t) const { return cdf(std::span(&t, 1)); }

  // Mass of the marginal distribution along one axis.
  std::vector<double> marginal_mass(std::size_t axis) const {
    const auto& ax = grid_.axis(axis);
    std::vector<double> out(ax.size(), 0.0);
    std::vector<double> pt(grid_.dim());
    for (std::size_t i = 0; i < mass_.size(); ++i) {
      grid_.atom(i, pt);
      auto it = std::lower_bound(ax.begin(), ax.end(), pt[axis]);
      out[static_cast<std::size_t>(it - ax.begin())] += mass_[i];
    }
    return out;
  }

  // Smallest atom value v with marginal CDF(v) >= q; ties resolve to the
  // smallest atom. A 1e-12 slack absorbs accumulated rounding.
  double quantile(double q, std::size_t axis = 0) const {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument("quantile: q must lie in (0,1)");
    }
    const auto& ax = grid_.axis(axis);
    std::vector<double> marg = marginal_mass(axis);
    long double cum = 0.0L;
    for (std::size_t i = 0; i < marg.size(); ++i) {
      cum += marg[i];
      if (static_cast<double>(cum) >= q - 1e-12) return ax[i];
    }
    return ax.back();
  }

  // In-place access for the estimator loops; invariants are the caller's
  // responsibility between renormalizations.
  std::vector<double>& mutable_mass() { return mass_; }

 private:
  Grid grid_;
  std::vector<double> mass_;
};

}  // namespace qed
