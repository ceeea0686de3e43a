// SPDX-License-Identifier: Apache-2.0
//
// The quasi-empirical-distribution estimator: a fixed-point iteration over a
// discrete mass function that solves, in any dimension,
//
//   p(B) = (1/N) sum_k [ p(B | C_k) + p(B & T_k) / (1 - p(T_k)) ],
//   N    = sum_k 1 / (1 - p(T_k)),
//
// or the equivalent reweighted form
//
//   p(B) = (1/n) sum_k [ p(B | C_k) (1 - p(T_k)) + p(B & T_k) ].
//
// Every update of a cell's mass is the current mass times a per-cell weight
// accumulated over the observations whose censoring or truncation region
// contains the cell (plus a rare additive term when a censoring set carries
// no mass and the conditional falls back to uniform). Regions are therefore
// compiled once into disjoint cell-index ranges and each sweep uses
// difference arrays, making one iteration O(#cells + #ranges).

#pragma once

#include <optional>
#include <string>

#include "qed/mass_function.hpp"
#include "qed/observation.hpp"

namespace qed {

struct EstimatorConfig {
  enum class Variant { eq20, eq22 };

  double tol = 1e-9;        // L-inf change threshold between sweeps
  int max_iter = 10000;
  Variant variant = Variant::eq20;
  double trunc_guard = 1e-8;  // clamp P(T_k) at 1 - trunc_guard
  double cond_eps = 1e-12;    // conditional fallback threshold
  std::optional<std::vector<double>> init;  // custom start, else uniform

  void validate() const {
    if (!(tol > 0)) throw std::invalid_argument("EstimatorConfig: tol <= 0");
    if (max_iter < 1) throw std::invalid_argument("EstimatorConfig: max_iter < 1");
    if (!(trunc_guard > 0 && trunc_guard < 1)) {
      throw std::invalid_argument("EstimatorConfig: trunc_guard out of (0,1)");
    }
  }
};

struct FitResult {
  MassFunction estimate;
  int iterations = 0;
  double final_residual = 0.0;
  double adjusted_n = 0.0;  // N = sum 1/(1 - P(T_k)) at the final state
  bool converged = false;
  std::vector<int> degenerate;  // observations whose P(T_k) hit the guard
};

// Raised when a truncation probability reaches the degeneracy guard in a
// context that cannot clamp (strict single-step evaluation).
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(int index, double p_trunc)
      : std::runtime_error("degenerate truncation: P(T_" +
                           std::to_string(index) + ") = " +
                           std::to_string(p_trunc)),
        index(index),
        p_trunc(p_trunc) {}
  int index;
  double p_trunc;
};

namespace detail {

struct CompiledObs {
  std::vector<CellRange> censor;
  std::vector<CellRange> trunc;
  std::uint32_t censor_cells = 0;
};

inline CompiledObs compile_observation(const Grid& grid, const Observation& o) {
  CompiledObs c;
  c.censor = grid.ranges(o.censor);
  c.trunc = grid.ranges(o.trunc);
  for (const auto& [b, e] : c.censor) c.censor_cells += e - b;
  return c;
}

inline std::vector<CompiledObs> compile_observations(
    const Grid& grid, std::span<const Observation> obs,
    bool require_censor_atoms) {
  std::vector<CompiledObs> out;
  out.reserve(obs.size());
  std::string offenders;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (obs[k].dim() != grid.dim()) {
      throw std::invalid_argument("observation " + std::to_string(k) +
                                  ": dimension mismatch with grid");
    }
    out.push_back(compile_observation(grid, obs[k]));
    if (require_censor_atoms && out.back().censor_cells == 0) {
      if (!offenders.empty()) offenders += ", ";
      offenders += std::to_string(k);
    }
  }
  if (!offenders.empty()) {
    throw std::runtime_error(
        "censoring regions contain no grid atoms for observations [" +
        offenders + "]");
  }
  return out;
}

struct StepScratch {
  std::vector<long double> prefix;
  std::vector<double> mult;  // difference array, multiplicative weights
  std::vector<double> add;   // difference array, additive fallback terms
};

// One sweep of the fixed-point map. Writes the renormalized next state into
// `next` and returns the adjusted sample size N computed from `m`. In strict
// mode a truncation probability at or beyond the guard throws
// DegeneracyError; otherwise it is clamped and the observation recorded in
// `flags` (when non-null).
inline double qed_step(const std::vector<double>& m,
                       const std::vector<CompiledObs>& obs,
                       const EstimatorConfig& cfg, bool strict,
                       std::vector<double>& next, std::vector<char>* flags,
                       StepScratch& ws) {
  const std::size_t cells = m.size();
  const bool eq20 = cfg.variant == EstimatorConfig::Variant::eq20;
  ws.prefix.assign(cells + 1, 0.0L);
  for (std::size_t i = 0; i < cells; ++i) {
    ws.prefix[i + 1] = ws.prefix[i] + m[i];
  }
  ws.mult.assign(cells + 1, 0.0);
  ws.add.assign(cells + 1, 0.0);

  auto mass_of = [&](const std::vector<CellRange>& ranges) {
    long double s = 0.0L;
    for (const auto& [b, e] : ranges) s += ws.prefix[e] - ws.prefix[b];
    return static_cast<double>(s);
  };

  long double adjusted_n = 0.0L;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const CompiledObs& o = obs[k];
    double pt = mass_of(o.trunc);
    if (pt >= 1.0 - cfg.trunc_guard) {
      if (strict && eq20) throw DegeneracyError(static_cast<int>(k), pt);
      pt = 1.0 - cfg.trunc_guard;
      if (flags) (*flags)[k] = 1;
    }
    adjusted_n += 1.0 / (1.0 - pt);

    double pc = mass_of(o.censor);
    const double censor_scale = eq20 ? 1.0 : 1.0 - pt;
    if (pc < cfg.cond_eps) {
      // Uniform-over-C fallback: an additive contribution per cell.
      double u = censor_scale / static_cast<double>(o.censor_cells);
      for (const auto& [b, e] : o.censor) {
        ws.add[b] += u;
        ws.add[e] -= u;
      }
    } else {
      double wc = censor_scale / pc;
      for (const auto& [b, e] : o.censor) {
        ws.mult[b] += wc;
        ws.mult[e] -= wc;
      }
    }
    const double wt = eq20 ? 1.0 / (1.0 - pt) : 1.0;
    for (const auto& [b, e] : o.trunc) {
      ws.mult[b] += wt;
      ws.mult[e] -= wt;
    }
  }

  next.resize(cells);
  long double total = 0.0L;
  double w = 0.0, a = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    w += ws.mult[i];
    a += ws.add[i];
    // The weights are sums of nonnegative terms; running differences can
    // leave cancellation dust below zero.
    double v = m[i] * std::max(0.0, w) + std::max(0.0, a);
    next[i] = v;
    total += v;
  }
  // The exact total is N (eq20) or n (eq22); dividing by the accumulated sum
  // renormalizes and absorbs float drift in one go.
  if (!(total > 0.0L)) {
    throw std::runtime_error("estimator step produced zero total mass");
  }
  for (std::size_t i = 0; i < cells; ++i) {
    next[i] = static_cast<double>(next[i] / total);
  }
  return static_cast<double>(adjusted_n);
}

inline double linf_diff(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::fabs(a[i] - b[i]));
  }
  return d;
}

}  // namespace detail

// Builds the default estimation grid for a set of observations: per
// dimension, the sorted set of all finite bounds appearing in any censoring
// or truncation region (singleton coordinates included). Censoring regions
// that end up containing no atom are repaired with one synthetic atom each —
// beyond a right-open bound, before a left-open bound, or at the midpoint of
// an empty-interior finite interval — so that every censoring set can carry
// mass. Unrepairable observations raise an error listing their indices.
inline Grid default_grid(std::span<const Observation> obs) {
  if (obs.empty()) throw std::invalid_argument("default_grid: no observations");
  const std::size_t d = obs[0].dim();
  std::vector<std::vector<double>> axes(d);
  auto add_bounds = [&](const Region& r) {
    if (r.dim() != d) {
      throw std::invalid_argument("default_grid: mixed observation dimensions");
    }
    for (const auto& box : r.boxes()) {
      for (std::size_t k = 0; k < d; ++k) {
        if (std::isfinite(box.axes[k].lo)) axes[k].push_back(box.axes[k].lo);
        if (std::isfinite(box.axes[k].hi)) axes[k].push_back(box.axes[k].hi);
      }
    }
  };
  for (const auto& o : obs) {
    add_bounds(o.censor);
    add_bounds(o.trunc);
  }
  for (auto& ax : axes) {
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
  }

  auto axis_pad = [](const std::vector<double>& ax) {
    if (ax.empty()) return 0.5;
    return 0.5 * std::max(1.0, ax.back() - ax.front());
  };
  auto axis_has_atom_in = [](const std::vector<double>& ax, const Interval& itv) {
    auto it = itv.lo_open ? std::upper_bound(ax.begin(), ax.end(), itv.lo)
                          : std::lower_bound(ax.begin(), ax.end(), itv.lo);
    if (it == ax.end()) return false;
    return itv.contains(*it);
  };

  // Repair passes: each pass inserts at least one atom or stops.
  for (int pass = 0; pass < 64; ++pass) {
    bool inserted = false;
    for (const auto& o : obs) {
      bool covered = false;
      for (const auto& box : o.censor.boxes()) {
        bool all = true;
        for (std::size_t k = 0; k < d; ++k) {
          if (!axis_has_atom_in(axes[k], box.axes[k])) {
            all = false;
            break;
          }
        }
        if (all) {
          covered = true;
          break;
        }
      }
      if (covered) continue;
      // Synthesize coordinates for the first repairable box.
      for (const auto& box : o.censor.boxes()) {
        std::vector<std::pair<std::size_t, double>> fixes;
        bool ok = true;
        for (std::size_t k = 0; k < d; ++k) {
          const Interval& itv = box.axes[k];
          if (axis_has_atom_in(axes[k], itv)) continue;
          double v;
          if (std::isfinite(itv.lo) && !std::isfinite(itv.hi)) {
            v = itv.lo + axis_pad(axes[k]);
          } else if (!std::isfinite(itv.lo) && std::isfinite(itv.hi)) {
            v = itv.hi - axis_pad(axes[k]);
          } else if (std::isfinite(itv.lo) && std::isfinite(itv.hi)) {
            v = 0.5 * (itv.lo + itv.hi);
          } else {
            v = 0.0;  // whole axis, no atoms yet
          }
          if (!itv.contains(v)) {
            ok = false;
            break;
          }
          fixes.emplace_back(k, v);
        }
        if (ok) {
          for (const auto& [k, v] : fixes) {
            auto& ax = axes[k];
            ax.insert(std::lower_bound(ax.begin(), ax.end(), v), v);
          }
          inserted = true;
          break;
        }
      }
    }
    if (!inserted) break;
  }

  for (auto& ax : axes) {
    if (ax.empty()) {
      throw std::runtime_error("default_grid: a dimension has no atoms");
    }
  }
  Grid grid(std::move(axes));
  // Final verification; throws listing offenders if repair failed.
  detail::compile_observations(grid, obs, /*require_censor_atoms=*/true);
  return grid;
}

// N = sum_k 1/(1 - P(T_k)). Throws DegeneracyError when any P(T_k) reaches
// the guard.
inline double adjusted_sample_size(const MassFunction& p,
                                   std::span<const Observation> obs,
                                   double trunc_guard = 1e-8) {
  long double n = 0.0L;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    double pt = p.measure(obs[k].trunc);
    if (pt >= 1.0 - trunc_guard) {
      throw DegeneracyError(static_cast<int>(k), pt);
    }
    n += 1.0 / (1.0 - pt);
  }
  return static_cast<double>(n);
}

// One strict sweep of the fixed-point map starting from p.
inline MassFunction iterate_once(const MassFunction& p,
                                 std::span<const Observation> obs,
                                 const EstimatorConfig& cfg = {}) {
  cfg.validate();
  auto compiled =
      detail::compile_observations(p.grid(), obs, /*require_censor_atoms=*/true);
  detail::StepScratch ws;
  std::vector<double> next;
  detail::qed_step(p.mass(), compiled, cfg, /*strict=*/true, next, nullptr, ws);
  return MassFunction(p.grid(), std::move(next));
}

// L-inf distance between p and one application of the fixed-point map;
// zero exactly at a solution.
inline double self_consistency_residual(const MassFunction& p,
                                        std::span<const Observation> obs,
                                        const EstimatorConfig& cfg = {}) {
  MassFunction next = iterate_once(p, obs, cfg);
  return detail::linf_diff(next.mass(), p.mass());
}

inline FitResult fit(std::span<const Observation> obs, const Grid& grid,
                     const EstimatorConfig& cfg = {}) {
  cfg.validate();
  if (obs.empty()) throw std::invalid_argument("fit: no observations");
  auto compiled =
      detail::compile_observations(grid, obs, /*require_censor_atoms=*/true);

  std::vector<double> m;
  if (cfg.init) {
    if (cfg.init->size() != grid.size()) {
      throw std::invalid_argument("fit: init mass size != grid cell count");
    }
    m = MassFunction::from_weights(grid, *cfg.init).mass();
  } else {
    m.assign(grid.size(), 1.0 / static_cast<double>(grid.size()));
  }

  detail::StepScratch ws;
  std::vector<double> next(m.size());
  std::vector<char> flags(obs.size(), 0);
  double residual = std::numeric_limits<double>::infinity();
  double adjusted_n = static_cast<double>(obs.size());
  int iter = 0;
  bool converged = false;
  while (iter < cfg.max_iter) {
    adjusted_n =
        detail::qed_step(m, compiled, cfg, /*strict=*/false, next, &flags, ws);
    ++iter;
    residual = detail::linf_diff(next, m);
    m.swap(next);
    if (residual < cfg.tol) {
      converged = true;
      break;
    }
  }

  FitResult r{MassFunction(grid, std::move(m)), iter, residual, adjusted_n,
              converged,
              {}};
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (flags[k]) r.degenerate.push_back(static_cast<int>(k));
  }
  return r;
}

inline FitResult fit(std::span<const Observation> obs,
                     const EstimatorConfig& cfg = {}) {
  return fit(obs, default_grid(obs), cfg);
}

}  // namespace qed
