// SPDX-License-Identifier: Apache-2.0
//
// Product-limit (Kaplan-Meier) estimator for left-truncated right-censored
// data: risk sets start at the entry time, so a subject contributes to the
// risk set only at times t with entry < t <= exit.

#pragma once

#include "qed/mass_function.hpp"

namespace qed {

struct LtRcRecord {
  double entry = kNegInf;  // left-truncation time, -inf when untruncated
  double exit = 0.0;       // event or censoring time
  bool event = false;      // true = exact event, false = right-censored
};

struct ProductLimitResult {
  MassFunction estimate;
  // Survival did not reach zero; the deficit mass sits on a synthetic atom
  // beyond the last exit.
  bool deficit = false;
  double tail_atom = std::numeric_limits<double>::quiet_NaN();
  // Hazard hit one before the last event time (degenerate truncation): all
  // later event atoms carry zero mass.
  bool degenerate = false;
  // Event times whose risk set was empty (hazard forced to one).
  std::vector<double> flagged_times;
};

inline ProductLimitResult product_limit_lt_rc(
    std::span<const LtRcRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("product_limit_lt_rc: no records");
  }
  std::vector<double> events;
  double finite_min = kPosInf, finite_max = kNegInf;
  for (const auto& r : records) {
    if (!std::isfinite(r.exit)) {
      throw std::invalid_argument("product_limit_lt_rc: non-finite exit");
    }
    if (!(r.entry < r.exit)) {
      throw std::invalid_argument("product_limit_lt_rc: entry >= exit");
    }
    if (r.event) events.push_back(r.exit);
    finite_max = std::max(finite_max, r.exit);
    finite_min = std::min(finite_min, r.exit);
    if (std::isfinite(r.entry)) {
      finite_min = std::min(finite_min, r.entry);
    }
  }
  if (events.empty()) {
    throw std::invalid_argument("product_limit_lt_rc: no event records");
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  ProductLimitResult out{MassFunction::uniform(Grid::univariate({0.0}))};
  std::vector<double> atoms = events;
  std::vector<double> mass(events.size(), 0.0);
  double survival = 1.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t = events[i];
    std::size_t at_risk = 0, deaths = 0;
    for (const auto& r : records) {
      if (r.entry < t && t <= r.exit) {
        ++at_risk;
        if (r.event && r.exit == t) ++deaths;
      }
    }
    double hazard;
    if (at_risk == 0) {
      hazard = 1.0;
      out.flagged_times.push_back(t);
    } else {
      hazard = static_cast<double>(deaths) / static_cast<double>(at_risk);
    }
    mass[i] = survival * hazard;
    survival *= 1.0 - hazard;
    if (hazard >= 1.0 && i + 1 < events.size()) out.degenerate = true;
  }

  if (survival > 1e-12) {
    out.deficit = true;
    out.tail_atom = padded_tail_atom(finite_min, finite_max);
    atoms.push_back(out.tail_atom);
    mass.push_back(survival);
  }
  out.estimate =
      MassFunction::from_weights(Grid::univariate(std::move(atoms)),
                                 std::move(mass));
  return out;
}

}  // namespace qed
