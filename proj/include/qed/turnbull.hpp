// SPDX-License-Identifier: Apache-2.0
//
// Turnbull self-consistency estimator for univariate interval-censored data,
// with the truncation correction of Frydman: ghost mass proportional to
// P(T_k)/(1 - P(T_k)) is allocated on each truncation set during the E-step.
// Mass can only live on the innermost intervals; truncation-set boundaries
// refine the candidate set so every censoring or truncation region is an
// exact union of candidates.

#pragma once

#include "qed/estimator.hpp"

namespace qed {

struct TurnbullInterval {
  double left = 0.0;
  double right = 0.0;
  bool left_open = false;
  bool right_open = false;

  bool is_point() const { return left == right && !left_open && !right_open; }
};

namespace detail {

// Endpoint with an infinitesimal offset encoding openness: a left endpoint
// of an open interval sits just above its value, a right endpoint just
// below. Ordering ties put left endpoints first so exact observations close
// into singletons.
struct Endpoint {
  double v;
  int tier;   // -1 just below, 0 at, +1 just above
  bool left;  // left endpoint?

  friend bool operator<(const Endpoint& a, const Endpoint& b) {
    if (a.v != b.v) return a.v < b.v;
    if (a.tier != b.tier) return a.tier < b.tier;
    return a.left && !b.left;
  }
};

// Lexicographic positions of an interval's two sides.
inline std::pair<double, int> left_pos(const TurnbullInterval& i) {
  return {i.left, i.left_open ? +1 : 0};
}
inline std::pair<double, int> right_pos(const TurnbullInterval& i) {
  return {i.right, i.right_open ? -1 : 0};
}

inline Interval censor_interval_of(const Observation& o, std::size_t k) {
  if (o.dim() != 1 || o.censor.boxes().size() != 1) {
    throw std::invalid_argument(
        "turnbull: observation " + std::to_string(k) +
        " does not have a univariate interval censoring region");
  }
  return o.censor.boxes()[0].axes[0];
}

inline bool subset_of(const TurnbullInterval& i, const Interval& c) {
  std::pair<double, int> clo{c.lo, c.lo_open ? +1 : 0};
  std::pair<double, int> chi{c.hi, c.hi_open ? -1 : 0};
  return !(left_pos(i) < clo) && !(chi < right_pos(i));
}

}  // namespace detail

// Innermost intervals of a univariate interval-censored sample: (l, r] with
// l a left endpoint, r a right endpoint and no other endpoint strictly
// inside; exact observations contribute singletons. Candidates come from the
// censoring intervals alone (the classical construction); truncation sets
// receive ghost mass only through candidates lying wholly inside them, so
// the correction is partial when a candidate straddles a truncation edge.
inline std::vector<TurnbullInterval> turnbull_intervals(
    std::span<const Observation> obs) {
  std::vector<detail::Endpoint> eps;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    Interval c = detail::censor_interval_of(obs[k], k);
    eps.push_back({c.lo, c.lo_open ? +1 : 0, true});
    eps.push_back({c.hi, c.hi_open ? -1 : 0, false});
  }
  std::sort(eps.begin(), eps.end());
  std::vector<TurnbullInterval> out;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    if (eps[i].left && !eps[i + 1].left) {
      TurnbullInterval t{eps[i].v, eps[i + 1].v, eps[i].tier > 0,
                         eps[i + 1].tier < 0};
      if (out.empty() || !(out.back().left == t.left &&
                           out.back().right == t.right &&
                           out.back().left_open == t.left_open &&
                           out.back().right_open == t.right_open)) {
        out.push_back(t);
      }
    }
  }
  return out;
}

// EM self-consistency fit over the innermost intervals. Shares the
// tolerance, iteration-cap, degeneracy-clamp and conditional-fallback
// contract of the qED fit. The returned estimate places each interval's
// mass on one representative atom: the value for singletons, the right
// endpoint when it is closed, the midpoint of finite open intervals, and a
// padded synthetic atom for unbounded tails.
inline FitResult turnbull_frydman_fit(std::span<const Observation> obs,
                                      const EstimatorConfig& cfg = {}) {
  cfg.validate();
  if (obs.empty()) {
    throw std::invalid_argument("turnbull_frydman_fit: no observations");
  }
  std::vector<TurnbullInterval> intervals = turnbull_intervals(obs);
  const std::size_t J = intervals.size();
  if (J == 0) {
    throw std::runtime_error("turnbull_frydman_fit: no candidate intervals");
  }

  // Compile per-observation index ranges over the (sorted, disjoint)
  // candidate intervals.
  std::vector<detail::CompiledObs> compiled(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    Interval c = detail::censor_interval_of(obs[k], k);
    std::uint32_t b = 0, e = 0;
    while (b < J && !detail::subset_of(intervals[b], c)) ++b;
    e = b;
    while (e < J && detail::subset_of(intervals[e], c)) ++e;
    if (b == e) {
      throw std::runtime_error(
          "turnbull_frydman_fit: censoring region of observation " +
          std::to_string(k) + " contains no candidate interval");
    }
    compiled[k].censor.emplace_back(b, e);
    compiled[k].censor_cells = e - b;
    for (const auto& box : obs[k].trunc.boxes()) {
      const Interval& t = box.axes[0];
      std::uint32_t tb = 0, te = 0;
      while (tb < J && !detail::subset_of(intervals[tb], t)) ++tb;
      te = tb;
      while (te < J && detail::subset_of(intervals[te], t)) ++te;
      if (tb < te) compiled[k].trunc.emplace_back(tb, te);
    }
  }

  std::vector<double> s(J, 1.0 / static_cast<double>(J));
  if (cfg.init && cfg.init->size() == J) s = *cfg.init;
  std::vector<double> next(J);
  std::vector<char> flags(obs.size(), 0);
  detail::StepScratch ws;
  EstimatorConfig step_cfg = cfg;
  step_cfg.variant = EstimatorConfig::Variant::eq20;

  double residual = std::numeric_limits<double>::infinity();
  double adjusted_n = static_cast<double>(obs.size());
  int iter = 0;
  bool converged = false;
  while (iter < cfg.max_iter) {
    adjusted_n = detail::qed_step(s, compiled, step_cfg, /*strict=*/false,
                                  next, &flags, ws);
    ++iter;
    residual = detail::linf_diff(next, s);
    s.swap(next);
    if (residual < cfg.tol) {
      converged = true;
      break;
    }
  }

  // Representative atoms, one per interval.
  double fin_min = kPosInf, fin_max = kNegInf;
  for (const auto& t : intervals) {
    if (std::isfinite(t.left)) {
      fin_min = std::min(fin_min, t.left);
      fin_max = std::max(fin_max, t.left);
    }
    if (std::isfinite(t.right)) {
      fin_min = std::min(fin_min, t.right);
      fin_max = std::max(fin_max, t.right);
    }
  }
  if (!std::isfinite(fin_min)) {
    fin_min = 0.0;
    fin_max = 0.0;
  }
  std::vector<double> atoms(J);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& t = intervals[j];
    if (t.is_point()) {
      atoms[j] = t.left;
    } else if (!std::isfinite(t.right)) {
      atoms[j] = padded_tail_atom(fin_min, fin_max);
    } else if (!std::isfinite(t.left)) {
      atoms[j] = t.right - 0.5 * std::max(1.0, fin_max - fin_min);
    } else if (!t.right_open) {
      atoms[j] = t.right;
    } else {
      atoms[j] = 0.5 * (t.left + t.right);
    }
    if (j > 0 && !(atoms[j] > atoms[j - 1])) {
      throw std::runtime_error(
          "turnbull_frydman_fit: representative atoms not increasing");
    }
  }

  FitResult r{MassFunction(Grid::univariate(std::move(atoms)), std::move(s)),
              iter, residual, adjusted_n, converged,
              {}};
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (flags[k]) r.degenerate.push_back(static_cast<int>(k));
  }
  return r;
}

}  // namespace qed
