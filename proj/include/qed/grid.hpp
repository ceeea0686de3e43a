// SPDX-License-Identifier: Apache-2.0
//
// Discretization carrier for mass functions: a product grid of atoms per
// dimension, optionally thinned by a domain constraint (e.g. service <= age).
// Regions are compiled to sorted disjoint ranges of active cell indices,
// which is what every estimator loop consumes.

#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <utility>

#include "qed/region.hpp"

namespace qed {

// Synthetic tail atom convention shared by grid padding and the baseline
// estimators' deficit-mass placement.
inline double padded_tail_atom(double finite_min, double finite_max) {
  return finite_max + 0.5 * std::max(1.0, finite_max - finite_min);
}

using CellRange = std::pair<std::uint32_t, std::uint32_t>;  // [begin, end)

class Grid {
 public:
  using Constraint = std::function<bool(std::span<const double>)>;

  explicit Grid(std::vector<std::vector<double>> axes,
                Constraint constraint = nullptr)
      : axes_(std::move(axes)), constraint_(std::move(constraint)) {
    if (axes_.empty()) throw std::invalid_argument("Grid: no axes");
    std::size_t flat_total = 1;
    for (const auto& ax : axes_) {
      if (ax.empty()) throw std::invalid_argument("Grid: empty axis");
      for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
        if (!(ax[i] < ax[i + 1])) {
          throw std::invalid_argument(
              "Grid: atom coordinates must be strictly increasing");
        }
      }
      if (!std::isfinite(ax.front()) || !std::isfinite(ax.back())) {
        throw std::invalid_argument("Grid: atoms must be finite");
      }
      flat_total *= ax.size();
      if (flat_total > (std::size_t{1} << 27)) {
        throw std::invalid_argument("Grid: too many cells");
      }
    }
    rank_.assign(flat_total + 1, 0);
    std::vector<double> pt(axes_.size());
    for (std::size_t f = 0; f < flat_total; ++f) {
      bool active = true;
      if (constraint_) {
        unflatten(f, pt);
        active = constraint_(pt);
      }
      rank_[f + 1] = rank_[f] + (active ? 1u : 0u);
      if (active) cells_.push_back(static_cast<std::uint32_t>(f));
    }
    if (cells_.empty()) {
      throw std::invalid_argument("Grid: domain constraint excludes every cell");
    }
  }

  static Grid univariate(std::vector<double> atoms) {
    std::vector<std::vector<double>> axes;
    axes.push_back(std::move(atoms));
    return Grid(std::move(axes));
  }

  std::size_t dim() const { return axes_.size(); }
  std::size_t size() const { return cells_.size(); }  // active cells
  const std::vector<double>& axis(std::size_t d) const { return axes_.at(d); }
  bool has_constraint() const { return static_cast<bool>(constraint_); }

  // Coordinates of the active cell with the given index.
  void atom(std::size_t cell, std::span<double> out) const {
    unflatten(cells_.at(cell), out);
  }
  std::vector<double> atom_vec(std::size_t cell) const {
    std::vector<double> p(dim());
    atom(cell, p);
    return p;
  }
  double atom1(std::size_t cell) const {
    if (dim() != 1) throw std::logic_error("Grid::atom1: grid is not 1-d");
    return axes_[0][cells_.at(cell)];
  }

  // Index range [first, last) of axis atoms inside an interval.
  std::pair<std::size_t, std::size_t> axis_range(std::size_t d,
                                                 const Interval& itv) const {
    const auto& ax = axes_.at(d);
    auto first = itv.lo_open ? std::upper_bound(ax.begin(), ax.end(), itv.lo)
                             : std::lower_bound(ax.begin(), ax.end(), itv.lo);
    auto last = itv.hi_open ? std::lower_bound(ax.begin(), ax.end(), itv.hi)
                            : std::upper_bound(ax.begin(), ax.end(), itv.hi);
    if (last < first) last = first;
    return {static_cast<std::size_t>(first - ax.begin()),
            static_cast<std::size_t>(last - ax.begin())};
  }

  // Sorted disjoint ranges of active cell indices covered by the region.
  std::vector<CellRange> ranges(const Region& region) const {
    if (region.dim() != dim()) {
      throw std::invalid_argument("Grid::ranges: dimension mismatch");
    }
    std::vector<CellRange> out;
    const std::size_t d = dim();
    std::vector<std::pair<std::size_t, std::size_t>> idx(d);
    std::vector<std::size_t> cursor(d);
    for (const auto& box : region.boxes()) {
      bool any_empty = false;
      for (std::size_t k = 0; k < d; ++k) {
        idx[k] = axis_range(k, box.axes[k]);
        if (idx[k].first >= idx[k].second) {
          any_empty = true;
          break;
        }
      }
      if (any_empty) continue;
      // Walk the index product over dimensions 0..d-2; each setting yields
      // one contiguous flat range along the last dimension.
      for (std::size_t k = 0; k + 1 < d; ++k) cursor[k] = idx[k].first;
      bool more = true;
      while (more) {
        std::size_t base = 0;
        for (std::size_t k = 0; k + 1 < d; ++k) {
          base = base * axes_[k].size() + cursor[k];
        }
        const std::size_t last_n = axes_[d - 1].size();
        std::size_t f0 = base * last_n + idx[d - 1].first;
        std::size_t f1 = base * last_n + idx[d - 1].second;
        std::uint32_t a0 = rank_[f0];
        std::uint32_t a1 = rank_[f1];
        if (a1 > a0) out.emplace_back(a0, a1);
        // Advance the odometer over dimensions 0..d-2, last one fastest.
        more = false;
        for (std::size_t k = d - 1; k-- > 0;) {
          if (++cursor[k] < idx[k].second) {
            more = true;
            break;
          }
          cursor[k] = idx[k].first;
        }
      }
    }
    return merge_ranges(std::move(out));
  }

  std::size_t count_cells(const Region& region) const {
    std::size_t n = 0;
    for (const auto& [b, e] : ranges(region)) n += e - b;
    return n;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.axes_ == b.axes_ && a.cells_ == b.cells_;
  }

 private:
  static std::vector<CellRange> merge_ranges(std::vector<CellRange> r) {
    if (r.size() <= 1) return r;
    std::sort(r.begin(), r.end());
    std::vector<CellRange> merged;
    merged.push_back(r[0]);
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (r[i].first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, r[i].second);
      } else {
        merged.push_back(r[i]);
      }
    }
    return merged;
  }

  void unflatten(std::size_t flat, std::span<double> out) const {
    for (std::size_t k = axes_.size(); k-- > 0;) {
      std::size_t n = axes_[k].size();
      out[k] = axes_[k][flat % n];
      flat /= n;
    }
  }

  std::vector<std::vector<double>> axes_;
  Constraint constraint_;
  std::vector<std::uint32_t> rank_;   // flat index -> #active cells before it
  std::vector<std::uint32_t> cells_;  // active index -> flat index
};

}  // namespace qed
