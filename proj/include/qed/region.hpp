// SPDX-License-Identifier: Apache-2.0
//
// Axis-aligned interval/box/region primitives. A Region is a finite union of
// boxes with independently open or closed edges; bounds may be infinite.
// All probability queries in this library reduce to membership of grid atoms
// in such regions, so openness only matters where an atom coincides with a
// boundary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace qed {

// Extended-real bound. IEEE doubles already carry +/-inf with the total
// order -inf < finite < +inf; NaN is rejected wherever bounds are built.
using Bound = double;

inline constexpr Bound kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr Bound kPosInf = std::numeric_limits<double>::infinity();

// One axis of a box: an interval with independently open/closed endpoints.
struct Interval {
  Bound lo = kNegInf;
  Bound hi = kPosInf;
  bool lo_open = false;
  bool hi_open = false;

  static Interval all() { return {}; }
  static Interval point(double x) { return {x, x, false, false}; }
  static Interval open(Bound lo, Bound hi) { return {lo, hi, true, true}; }
  static Interval closed(Bound lo, Bound hi) { return {lo, hi, false, false}; }
  // (-inf, hi) or (-inf, hi]
  static Interval below(Bound hi, bool open = true) {
    return {kNegInf, hi, false, open};
  }
  // (lo, +inf) or [lo, +inf)
  static Interval above(Bound lo, bool open = true) {
    return {lo, kPosInf, open, false};
  }

  bool empty() const {
    if (std::isnan(lo) || std::isnan(hi)) {
      throw std::invalid_argument("Interval bound is NaN");
    }
    if (lo > hi) return true;
    if (lo == hi) return lo_open || hi_open || !std::isfinite(lo);
    return false;
  }

  bool is_point() const {
    return lo == hi && !lo_open && !hi_open && std::isfinite(lo);
  }

  bool contains(double x) const {
    if (x < lo || (lo_open && x == lo)) return false;
    if (x > hi || (hi_open && x == hi)) return false;
    return true;
  }

  Interval intersect(const Interval& o) const {
    Interval r;
    if (lo > o.lo) {
      r.lo = lo;
      r.lo_open = lo_open;
    } else if (lo < o.lo) {
      r.lo = o.lo;
      r.lo_open = o.lo_open;
    } else {
      r.lo = lo;
      r.lo_open = lo_open || o.lo_open;
    }
    if (hi < o.hi) {
      r.hi = hi;
      r.hi_open = hi_open;
    } else if (hi > o.hi) {
      r.hi = o.hi;
      r.hi_open = o.hi_open;
    } else {
      r.hi = hi;
      r.hi_open = hi_open || o.hi_open;
    }
    return r;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Product of per-dimension intervals.
struct Box {
  std::vector<Interval> axes;

  Box() = default;
  explicit Box(std::size_t dim) : axes(dim) {}
  Box(std::initializer_list<Interval> a) : axes(a) {}
  explicit Box(std::vector<Interval> a) : axes(std::move(a)) {}

  static Box whole(std::size_t dim) { return Box(dim); }

  std::size_t dim() const { return axes.size(); }

  bool empty() const {
    for (const auto& a : axes) {
      if (a.empty()) return true;
    }
    return false;
  }

  bool contains(std::span<const double> p) const {
    if (p.size() != axes.size()) {
      throw std::invalid_argument("Box::contains: dimension mismatch");
    }
    for (std::size_t d = 0; d < axes.size(); ++d) {
      if (!axes[d].contains(p[d])) return false;
    }
    return true;
  }

  Box intersect(const Box& o) const {
    if (o.dim() != dim()) {
      throw std::invalid_argument("Box::intersect: dimension mismatch");
    }
    Box r(dim());
    for (std::size_t d = 0; d < axes.size(); ++d) {
      r.axes[d] = axes[d].intersect(o.axes[d]);
    }
    return r;
  }
};

namespace detail {

// Subtract `cut` from `piece`, appending the (disjoint) remainder boxes.
// Standard axis sweep: peel off the slabs outside `cut` one dimension at a
// time, then discard the overlapping core.
inline void subtract_box(const Box& piece, const Box& cut,
                         std::vector<Box>& out) {
  Box inter = piece.intersect(cut);
  if (inter.empty()) {
    out.push_back(piece);
    return;
  }
  Box rest = piece;
  for (std::size_t d = 0; d < piece.dim(); ++d) {
    const Interval& p = rest.axes[d];
    const Interval& c = inter.axes[d];
    // Slab below the intersection on axis d.
    Interval below = p;
    below.hi = c.lo;
    below.hi_open = !c.lo_open;
    if (!below.empty()) {
      Box b = rest;
      b.axes[d] = below;
      out.push_back(std::move(b));
    }
    // Slab above.
    Interval above = p;
    above.lo = c.hi;
    above.lo_open = !c.hi_open;
    if (!above.empty()) {
      Box b = rest;
      b.axes[d] = above;
      out.push_back(std::move(b));
    }
    rest.axes[d] = c;
  }
}

}  // namespace detail

// Finite union of boxes. Boxes may overlap; membership is the union.
class Region {
 public:
  explicit Region(std::size_t dim) : dim_(dim) {}
  Region(std::size_t dim, std::vector<Box> boxes) : dim_(dim) {
    for (auto& b : boxes) {
      if (b.dim() != dim) {
        throw std::invalid_argument("Region: box dimension mismatch");
      }
      if (!b.empty()) boxes_.push_back(std::move(b));
    }
  }

  static Region empty(std::size_t dim) { return Region(dim); }
  static Region whole(std::size_t dim) {
    return Region(dim, {Box::whole(dim)});
  }
  static Region from_box(Box b) {
    std::size_t d = b.dim();
    return Region(d, {std::move(b)});
  }

  // Univariate conveniences.
  static Region point1(double x) { return from_box(Box{Interval::point(x)}); }
  static Region interval1(Bound lo, Bound hi, bool lo_open = true,
                          bool hi_open = true) {
    return Region(1, {Box{Interval{lo, hi, lo_open, hi_open}}});
  }
  static Region below1(Bound hi, bool open = true) {
    return from_box(Box{Interval::below(hi, open)});
  }
  static Region above1(Bound lo, bool open = true) {
    return from_box(Box{Interval::above(lo, open)});
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }

  bool contains(std::span<const double> p) const {
    for (const auto& b : boxes_) {
      if (b.contains(p)) return true;
    }
    return false;
  }
  bool contains1(double x) const { return contains(std::span(&x, 1)); }

  Region unite(const Region& o) const {
    check_dim(o);
    Region r = *this;
    r.boxes_.insert(r.boxes_.end(), o.boxes_.begin(), o.boxes_.end());
    return r;
  }

  Region intersect(const Region& o) const {
    check_dim(o);
    Region r(dim_);
    for (const auto& a : boxes_) {
      for (const auto& b : o.boxes_) {
        Box i = a.intersect(b);
        if (!i.empty()) r.boxes_.push_back(std::move(i));
      }
    }
    return r;
  }

  // Set difference this \ o, as a box union.
  Region subtract(const Region& o) const {
    check_dim(o);
    std::vector<Box> cur = boxes_;
    for (const auto& cut : o.boxes_) {
      std::vector<Box> next;
      for (const auto& piece : cur) {
        detail::subtract_box(piece, cut, next);
      }
      cur = std::move(next);
    }
    return Region(dim_, std::move(cur));
  }

  Region complement_within(const Box& domain) const {
    return from_box(domain).subtract(*this);
  }

  bool disjoint_with(const Region& o) const {
    check_dim(o);
    for (const auto& a : boxes_) {
      for (const auto& b : o.boxes_) {
        if (!a.intersect(b).empty()) return false;
      }
    }
    return true;
  }

 private:
  void check_dim(const Region& o) const {
    if (o.dim_ != dim_) {
      throw std::invalid_argument("Region: dimension mismatch");
    }
  }

  std::size_t dim_;
  std::vector<Box> boxes_;
};

}  // namespace qed
