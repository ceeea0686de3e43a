// SPDX-License-Identifier: Apache-2.0
//
// One element of a truncated-censored sample: the value is known only up to
// the censoring region, and it was observable only because it fell outside
// the truncation region.

#pragma once

#include <array>
#include <string_view>

#include "qed/region.hpp"

namespace qed {

// The twelve valid censoring/truncation combinations for univariate data,
// plus a tag for anything constructed directly from regions.
enum class Scheme {
  complete_nontruncated,
  right_censored_nontruncated,
  left_censored_nontruncated,
  interval_censored_nontruncated,
  complete_left_truncated,
  right_censored_left_truncated,
  interval_censored_left_truncated,
  complete_right_truncated,
  left_censored_right_truncated,
  interval_censored_right_truncated,
  complete_doubly_truncated,
  interval_censored_doubly_truncated,
  general,
};

inline constexpr std::array<Scheme, 12> kAllSchemes = {
    Scheme::complete_nontruncated,
    Scheme::right_censored_nontruncated,
    Scheme::left_censored_nontruncated,
    Scheme::interval_censored_nontruncated,
    Scheme::complete_left_truncated,
    Scheme::right_censored_left_truncated,
    Scheme::interval_censored_left_truncated,
    Scheme::complete_right_truncated,
    Scheme::left_censored_right_truncated,
    Scheme::interval_censored_right_truncated,
    Scheme::complete_doubly_truncated,
    Scheme::interval_censored_doubly_truncated,
};

enum class Censoring { none, right, left, interval };
enum class Truncation { none, left, right, doubly };

inline Censoring censoring_of(Scheme s) {
  switch (s) {
    case Scheme::right_censored_nontruncated:
    case Scheme::right_censored_left_truncated:
      return Censoring::right;
    case Scheme::left_censored_nontruncated:
    case Scheme::left_censored_right_truncated:
      return Censoring::left;
    case Scheme::interval_censored_nontruncated:
    case Scheme::interval_censored_left_truncated:
    case Scheme::interval_censored_right_truncated:
    case Scheme::interval_censored_doubly_truncated:
      return Censoring::interval;
    default:
      return Censoring::none;
  }
}

inline Truncation truncation_of(Scheme s) {
  switch (s) {
    case Scheme::complete_left_truncated:
    case Scheme::right_censored_left_truncated:
    case Scheme::interval_censored_left_truncated:
      return Truncation::left;
    case Scheme::complete_right_truncated:
    case Scheme::left_censored_right_truncated:
    case Scheme::interval_censored_right_truncated:
      return Truncation::right;
    case Scheme::complete_doubly_truncated:
    case Scheme::interval_censored_doubly_truncated:
      return Truncation::doubly;
    default:
      return Truncation::none;
  }
}

// The complete scheme with the same truncation class; used when a censored
// observation degrades (e.g. no admissible censor bound exists).
inline Scheme complete_counterpart(Scheme s) {
  switch (truncation_of(s)) {
    case Truncation::none:
      return Scheme::complete_nontruncated;
    case Truncation::left:
      return Scheme::complete_left_truncated;
    case Truncation::right:
      return Scheme::complete_right_truncated;
    case Truncation::doubly:
      return Scheme::complete_doubly_truncated;
  }
  return Scheme::complete_nontruncated;
}

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::complete_nontruncated: return "complete_nontruncated";
    case Scheme::right_censored_nontruncated: return "right_censored_nontruncated";
    case Scheme::left_censored_nontruncated: return "left_censored_nontruncated";
    case Scheme::interval_censored_nontruncated: return "interval_censored_nontruncated";
    case Scheme::complete_left_truncated: return "complete_left_truncated";
    case Scheme::right_censored_left_truncated: return "right_censored_left_truncated";
    case Scheme::interval_censored_left_truncated: return "interval_censored_left_truncated";
    case Scheme::complete_right_truncated: return "complete_right_truncated";
    case Scheme::left_censored_right_truncated: return "left_censored_right_truncated";
    case Scheme::interval_censored_right_truncated: return "interval_censored_right_truncated";
    case Scheme::complete_doubly_truncated: return "complete_doubly_truncated";
    case Scheme::interval_censored_doubly_truncated: return "interval_censored_doubly_truncated";
    case Scheme::general: return "general";
  }
  return "general";
}

struct Observation {
  Region censor;
  Region trunc;
  Scheme label = Scheme::general;

  Observation(Region censor_in, Region trunc_in, Scheme label_in = Scheme::general)
      : censor(std::move(censor_in)),
        trunc(std::move(trunc_in)),
        label(label_in) {
    if (censor.dim() != trunc.dim()) {
      throw std::invalid_argument("Observation: region dimension mismatch");
    }
    if (censor.empty()) {
      throw std::invalid_argument("Observation: censoring region is empty");
    }
    if (!censor.disjoint_with(trunc)) {
      throw std::invalid_argument(
          "Observation: censoring and truncation regions intersect");
    }
  }

  std::size_t dim() const { return censor.dim(); }
  bool censored() const {
    return !(censor.boxes().size() == 1 &&
             std::all_of(censor.boxes()[0].axes.begin(),
                         censor.boxes()[0].axes.end(),
                         [](const Interval& i) { return i.is_point(); }));
  }
  bool truncated() const { return !trunc.empty(); }

  // Exact (singleton) observation helpers.
  static Observation exact1(double x, Scheme label = Scheme::complete_nontruncated) {
    return Observation(Region::point1(x), Region::empty(1), label);
  }
};

}  // namespace qed
