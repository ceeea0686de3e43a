// SPDX-License-Identifier: Apache-2.0
//
// Replication harness for the Monte-Carlo accuracy studies: generates
// truncated-censored samples, fits the requested estimators on each, and
// collects per-replication accuracy reports plus CDF curves on a common
// evaluation lattice. Replications run on a worker pool; results are stored
// by replication index, so output is canonical regardless of scheduling.

#pragma once

#include <atomic>
#include <mutex>
#include <thread>

#include "qed/estimator.hpp"
#include "qed/metrics.hpp"
#include "qed/product_limit.hpp"
#include "qed/synth.hpp"
#include "qed/turnbull.hpp"

namespace qed {

enum class EstimatorKind { qed, km, turnbull };

inline std::string_view estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::qed: return "qed";
    case EstimatorKind::km: return "km";
    case EstimatorKind::turnbull: return "turnbull";
  }
  return "qed";
}

struct StudyConfig {
  DistSpec dist = DistSpec::gamma(4.0, 1.7);
  SchemeMix mix;
  int n = 250;
  int replications = 100;
  std::vector<EstimatorKind> estimators{EstimatorKind::qed};
  std::uint64_t seed = 1;
  EstimatorConfig estimator;
  int jobs = 1;
  bool collect_curves = false;
  // Common evaluation lattice for bands: truth quantiles at these levels.
  std::vector<double> lattice_levels = default_lattice_levels();

  static std::vector<double> default_lattice_levels() {
    std::vector<double> q;
    for (int i = 1; i <= 99; ++i) q.push_back(i / 100.0);
    return q;
  }
};

struct EstimatorOutcome {
  double rho = 0.0;
  double delta_median = 0.0;
  bool converged = true;
  bool degenerate = false;
  int iterations = 0;
  std::vector<double> curve;  // CDF on the common lattice (if collected)
};

struct ReplicationOutcome {
  int replication = 0;
  std::uint64_t seed = 0;
  double censor_fraction = 0.0;
  double trunc_fraction = 0.0;
  double complete_sample_ratio = 1.0;
  std::vector<EstimatorOutcome> by_estimator;  // parallel to config order
};

struct StudyResult {
  StudyConfig config;
  std::vector<double> lattice;  // x positions of the common lattice
  std::vector<ReplicationOutcome> replications;

  std::size_t estimator_index(EstimatorKind k) const {
    for (std::size_t i = 0; i < config.estimators.size(); ++i) {
      if (config.estimators[i] == k) return i;
    }
    throw std::invalid_argument("estimator not part of the study");
  }

  std::vector<ReplicationReport> reports(EstimatorKind k) const {
    std::size_t e = estimator_index(k);
    std::vector<ReplicationReport> out;
    out.reserve(replications.size());
    for (const auto& r : replications) {
      ReplicationReport rep;
      rep.rho = r.by_estimator[e].rho;
      rep.delta[0.5] = r.by_estimator[e].delta_median;
      rep.n = config.n;
      rep.seed = r.seed;
      out.push_back(std::move(rep));
    }
    return out;
  }

  SummaryRow summary(EstimatorKind k, const std::string& label = "") const {
    auto rep = reports(k);
    return summarize(label.empty() ? std::string(estimator_name(k)) : label,
                     rep);
  }

  Bands band(EstimatorKind k, double alpha) const {
    std::size_t e = estimator_index(k);
    std::vector<std::vector<double>> rows;
    rows.reserve(replications.size());
    for (const auto& r : replications) {
      if (!r.by_estimator[e].curve.empty()) {
        rows.push_back(r.by_estimator[e].curve);
      }
    }
    return bands(rows, alpha);
  }
};

namespace detail {

// Left-truncated right-censored records from observations, for the KM
// baseline. Throws if an observation is not of that shape.
inline std::vector<LtRcRecord> to_ltrc_records(
    std::span<const Observation> obs) {
  std::vector<LtRcRecord> recs;
  recs.reserve(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const Observation& o = obs[k];
    if (o.dim() != 1) {
      throw std::invalid_argument("km: univariate observations required");
    }
    LtRcRecord r;
    for (const auto& box : o.trunc.boxes()) {
      const Interval& t = box.axes[0];
      if (std::isfinite(t.lo) || !std::isfinite(t.hi)) {
        throw std::invalid_argument(
            "km: observation " + std::to_string(k) +
            " has a truncation set that is not left truncation");
      }
      r.entry = std::max(r.entry, t.hi);
    }
    if (o.censor.boxes().size() != 1) {
      throw std::invalid_argument("km: interval censoring regions required");
    }
    const Interval& c = o.censor.boxes()[0].axes[0];
    if (c.is_point()) {
      r.exit = c.lo;
      r.event = true;
    } else if (std::isfinite(c.lo) && !std::isfinite(c.hi)) {
      r.exit = c.lo;
      r.event = false;
    } else {
      throw std::invalid_argument(
          "km: observation " + std::to_string(k) +
          " is neither exact nor right-censored");
    }
    recs.push_back(r);
  }
  return recs;
}

}  // namespace detail

// Checks that every scheme with positive fraction can be handled by the
// estimator; throws on unsupported pairings (e.g. km on interval-censored).
inline void check_estimator_supports(EstimatorKind k, const SchemeMix& mix) {
  if (k != EstimatorKind::km) return;
  for (Scheme s : kAllSchemes) {
    if (mix.fraction(s) <= 0.0) continue;
    bool ok = (censoring_of(s) == Censoring::none ||
               censoring_of(s) == Censoring::right) &&
              (truncation_of(s) == Truncation::none ||
               truncation_of(s) == Truncation::left);
    if (!ok) {
      throw std::invalid_argument(
          "estimator km does not support scheme " +
          std::string(scheme_name(s)));
    }
  }
}

inline ReplicationOutcome run_replication(const StudyConfig& cfg,
                                          int replication,
                                          std::span<const double> lattice) {
  ReplicationOutcome out;
  out.replication = replication;
  out.seed = splitmix64(cfg.seed ^ splitmix64(replication + 1));
  Rng rng = Rng::for_replication(cfg.seed, replication);
  SynthSample sample = generate_sample(cfg.dist, cfg.mix, cfg.n, rng);
  out.censor_fraction = sample.censor_fraction();
  out.trunc_fraction = sample.trunc_fraction();
  out.complete_sample_ratio = sample.complete_sample_ratio();

  const double true_median = cfg.dist.median();
  auto truth_cdf = [&](double x) { return cfg.dist.cdf(x); };

  for (EstimatorKind kind : cfg.estimators) {
    EstimatorOutcome eo;
    MassFunction est = MassFunction::uniform(Grid::univariate({0.0}));
    switch (kind) {
      case EstimatorKind::qed: {
        FitResult fr = fit(sample.observations, cfg.estimator);
        eo.converged = fr.converged;
        eo.degenerate = !fr.degenerate.empty();
        eo.iterations = fr.iterations;
        est = std::move(fr.estimate);
        break;
      }
      case EstimatorKind::km: {
        auto recs = detail::to_ltrc_records(sample.observations);
        ProductLimitResult pr = product_limit_lt_rc(recs);
        eo.degenerate = pr.degenerate || !pr.flagged_times.empty();
        est = std::move(pr.estimate);
        break;
      }
      case EstimatorKind::turnbull: {
        FitResult fr = turnbull_frydman_fit(sample.observations, cfg.estimator);
        eo.converged = fr.converged;
        eo.degenerate = !fr.degenerate.empty();
        eo.iterations = fr.iterations;
        est = std::move(fr.estimate);
        break;
      }
    }
    eo.rho = chebyshev(est, truth_cdf);
    eo.delta_median = est.quantile(0.5) / true_median;
    if (cfg.collect_curves) {
      eo.curve.reserve(lattice.size());
      for (double x : lattice) eo.curve.push_back(est.cdf1(x));
    }
    out.by_estimator.push_back(std::move(eo));
  }
  return out;
}

inline StudyResult run_study(const StudyConfig& cfg) {
  cfg.mix.validate();
  cfg.estimator.validate();
  if (cfg.replications < 1) {
    throw std::invalid_argument("run_study: replications < 1");
  }
  for (EstimatorKind k : cfg.estimators) check_estimator_supports(k, cfg.mix);

  StudyResult result;
  result.config = cfg;
  for (double q : cfg.lattice_levels) {
    result.lattice.push_back(cfg.dist.quantile(q));
  }
  result.replications.resize(cfg.replications);

  const int jobs = std::max(1, cfg.jobs);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= cfg.replications || failed.load()) break;
      try {
        result.replications[r] = run_replication(cfg, r, result.lattice);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) {
          error_message = "replication " + std::to_string(r) + ": " + e.what();
        }
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("run_study: " + error_message);
  return result;
}

}  // namespace qed
