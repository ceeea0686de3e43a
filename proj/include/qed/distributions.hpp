// SPDX-License-Identifier: Apache-2.0
//
// Sampling distributions for the simulation studies, each with an exact CDF
// and quantile for truth comparisons: Gamma, Lognormal, Weibull and Tweedie
// with index p in (1,2) realized as a compound Poisson-Gamma sum (point mass
// at zero plus a continuous positive part).

#pragma once

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "qed/random.hpp"

namespace qed {

class DistSpec {
 public:
  enum class Family { gamma, lognormal, weibull, tweedie };

  static DistSpec gamma(double shape, double scale) {
    require(shape > 0 && scale > 0, "gamma: parameters must be positive");
    return DistSpec(Family::gamma, shape, scale, 0.0);
  }
  static DistSpec lognormal(double log_location, double log_scale) {
    require(log_scale > 0, "lognormal: scale must be positive");
    return DistSpec(Family::lognormal, log_location, log_scale, 0.0);
  }
  static DistSpec weibull(double shape, double scale) {
    require(shape > 0 && scale > 0, "weibull: parameters must be positive");
    return DistSpec(Family::weibull, shape, scale, 0.0);
  }
  // Tweedie with power parameter p in (1,2), mean mu, dispersion phi.
  // Values of p outside (1,2) require positive-stable machinery and are not
  // supported.
  static DistSpec tweedie(double p, double mu, double phi) {
    require(mu > 0 && phi > 0, "tweedie: mu and phi must be positive");
    if (!(p > 1.0 && p < 2.0)) {
      throw std::invalid_argument("tweedie: index parameter must lie in (1,2)");
    }
    DistSpec d(Family::tweedie, p, mu, phi);
    d.tw_lambda_ = std::pow(mu, 2.0 - p) / (phi * (2.0 - p));
    d.tw_shape_ = (2.0 - p) / (p - 1.0);
    d.tw_scale_ = phi * (p - 1.0) * std::pow(mu, p - 1.0);
    d.ensure_table();  // eager: instances are shared read-only across threads
    return d;
  }

  Family family() const { return family_; }

  double cdf(double x) const {
    switch (family_) {
      case Family::gamma: {
        if (x <= 0) return 0.0;
        boost::math::gamma_distribution<double> d(a_, b_);
        return boost::math::cdf(d, x);
      }
      case Family::lognormal: {
        if (x <= 0) return 0.0;
        boost::math::lognormal_distribution<double> d(a_, b_);
        return boost::math::cdf(d, x);
      }
      case Family::weibull: {
        if (x <= 0) return 0.0;
        return -std::expm1(-std::pow(x / b_, a_));
      }
      case Family::tweedie:
        return tweedie_cdf(x);
    }
    return 0.0;
  }

  double quantile(double q) const {
    if (!(q >= 0.0 && q < 1.0)) {
      throw std::invalid_argument("DistSpec::quantile: q outside [0,1)");
    }
    switch (family_) {
      case Family::gamma: {
        if (q == 0.0) return 0.0;
        boost::math::gamma_distribution<double> d(a_, b_);
        return boost::math::quantile(d, q);
      }
      case Family::lognormal: {
        if (q == 0.0) return 0.0;
        boost::math::lognormal_distribution<double> d(a_, b_);
        return boost::math::quantile(d, q);
      }
      case Family::weibull: {
        if (q == 0.0) return 0.0;
        return b_ * std::pow(-std::log1p(-q), 1.0 / a_);
      }
      case Family::tweedie:
        return tweedie_quantile(q, /*refine=*/true);
    }
    return 0.0;
  }

  // Fast approximate inverse used only for window placement during sample
  // generation (table interpolation for Tweedie, exact elsewhere).
  double quantile_fast(double q) const {
    if (family_ != Family::tweedie) return quantile(q);
    return tweedie_quantile(q, /*refine=*/false);
  }

  double median() const { return quantile(0.5); }

  // Infimum of the support; every implemented family lives on [0, inf).
  double support_min() const { return 0.0; }

  double mean() const {
    switch (family_) {
      case Family::gamma: return a_ * b_;
      case Family::lognormal: return std::exp(a_ + 0.5 * b_ * b_);
      case Family::weibull: return b_ * std::tgamma(1.0 + 1.0 / a_);
      case Family::tweedie: return b_;  // mu
    }
    return 0.0;
  }

  double sample(Rng& rng) const {
    switch (family_) {
      case Family::gamma:
        return b_ * rng.gamma(a_);
      case Family::lognormal:
        return std::exp(a_ + b_ * rng.normal());
      case Family::weibull: {
        double u = rng.uniform01();
        return b_ * std::pow(-std::log1p(-u), 1.0 / a_);
      }
      case Family::tweedie: {
        long m = rng.poisson(tw_lambda_);
        if (m == 0) return 0.0;
        return tw_scale_ * rng.gamma(tw_shape_ * static_cast<double>(m));
      }
    }
    return 0.0;
  }

  std::string name() const {
    std::ostringstream os;
    switch (family_) {
      case Family::gamma: os << "gamma(" << a_ << "," << b_ << ")"; break;
      case Family::lognormal: os << "lognormal(" << a_ << "," << b_ << ")"; break;
      case Family::weibull: os << "weibull(" << a_ << "," << b_ << ")"; break;
      case Family::tweedie:
        os << "tweedie(" << a_ << "," << b_ << "," << c_ << ")";
        break;
    }
    return os.str();
  }

  double param1() const { return a_; }
  double param2() const { return b_; }
  double param3() const { return c_; }

 private:
  DistSpec(Family f, double a, double b, double c)
      : family_(f), a_(a), b_(b), c_(c) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  double tweedie_cdf(double x) const {
    if (x < 0) return 0.0;
    // P(X <= x) = e^-lambda + sum_m Pois(m) * GammaCDF(x; m*shape, scale)
    double p0 = std::exp(-tw_lambda_);
    if (x == 0) return p0;
    long double total = p0;
    double log_pois = -tw_lambda_;  // log P(M=0)
    for (long m = 1; m < 4000; ++m) {
      log_pois += std::log(tw_lambda_) - std::log(static_cast<double>(m));
      double w = std::exp(log_pois);
      if (w < 1e-17 && m > tw_lambda_) break;
      total += w * boost::math::gamma_p(tw_shape_ * static_cast<double>(m),
                                        x / tw_scale_);
    }
    return std::min(1.0, static_cast<double>(total));
  }

  double tweedie_quantile(double q, bool refine) const {
    const double p0 = std::exp(-tw_lambda_);
    if (q <= p0) return 0.0;
    ensure_table();
    const auto& tq = table_->q;
    const auto& tx = table_->x;
    auto it = std::lower_bound(tq.begin(), tq.end(), q);
    std::size_t j = std::min<std::size_t>(tq.size() - 1,
                                          static_cast<std::size_t>(it - tq.begin()));
    std::size_t i = j > 0 ? j - 1 : 0;
    double lo = tx[i], hi = tx[j];
    if (!refine) {
      double dq = tq[j] - tq[i];
      double w = dq > 0 ? (q - tq[i]) / dq : 0.0;
      return lo + w * (hi - lo);
    }
    for (int it2 = 0; it2 < 80 && hi - lo > 1e-12 * (1.0 + hi); ++it2) {
      double mid = 0.5 * (lo + hi);
      if (tweedie_cdf(mid) < q) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  struct TweedieTable {
    std::vector<double> x, q;
  };

  void ensure_table() const {
    if (table_) return;
    auto t = std::make_shared<TweedieTable>();
    // Geometric x-grid out to far beyond the bulk; the CDF is evaluated
    // once per node.
    double sd = std::sqrt(c_ * std::pow(b_, a_));  // phi * mu^p
    double hi = b_ + 40.0 * sd;
    const int n = 2048;
    t->x.reserve(n + 1);
    t->q.reserve(n + 1);
    t->x.push_back(0.0);
    t->q.push_back(std::exp(-tw_lambda_));
    for (int i = 1; i <= n; ++i) {
      double u = static_cast<double>(i) / n;
      double x = hi * u * u;  // denser near zero
      double q = tweedie_cdf(x);
      if (q > t->q.back()) {
        t->x.push_back(x);
        t->q.push_back(q);
      }
    }
    table_ = std::move(t);
  }

  Family family_;
  double a_, b_, c_;
  double tw_lambda_ = 0.0, tw_shape_ = 0.0, tw_scale_ = 0.0;
  mutable std::shared_ptr<TweedieTable> table_;
};

}  // namespace qed
