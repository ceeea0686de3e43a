// SPDX-License-Identifier: Apache-2.0
//
// File formats:
//  * observation CSV — per-dimension column quadruple c_lo,c_hi,t_lo,t_hi
//    with -inf/inf literals; exact values as c_lo == c_hi; censor intervals
//    are open, truncation is (-inf,t_lo) U (t_hi,inf); an optional trailing
//    region_json column carries explicit box unions for regions the
//    quadruples cannot express.
//  * employee record CSV — birth,hire,term,reason,period_start,period_end
//    with ISO-8601 dates; empty term = active at period end.
//  * joint-life record CSV — entry1,entry2,elapsed,exit1,exit2,dead1,dead2.
//  * estimate JSON — atoms, masses and fit diagnostics.
//  * result CSVs for replications, summaries, comparisons and tables.

#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qed/lifetables.hpp"
#include "qed/simulation.hpp"

namespace qed::io {

using json = nlohmann::json;

// ---- scalar formatting -----------------------------------------------------

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  if (v == kPosInf) return "inf";
  if (v == kNegInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

inline double parse_double(const std::string& s, std::size_t line) {
  std::string t = s;
  t.erase(0, t.find_first_not_of(" \t"));
  t.erase(t.find_last_not_of(" \t") + 1);
  if (t == "inf" || t == "+inf") return kPosInf;
  if (t == "-inf") return kNegInf;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw std::runtime_error("line " + std::to_string(line) +
                             ": cannot parse number '" + s + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;  // JSON cells contain commas; track brace/bracket depth
  for (char c : line) {
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// ---- dates -----------------------------------------------------------------

// Days since 1970-01-01 (proleptic Gregorian).
inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return static_cast<long>(era) * 146097L + static_cast<long>(doe) - 719468L;
}

inline long parse_iso_date(const std::string& s, std::size_t line) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 ||
      d < 1 || d > 31) {
    throw std::runtime_error("line " + std::to_string(line) +
                             ": cannot parse ISO date '" + s + "'");
  }
  return days_from_civil(y, m, d);
}

// ---- region JSON -----------------------------------------------------------

inline json region_to_json(const Region& r) {
  json boxes = json::array();
  for (const auto& b : r.boxes()) {
    json box = json::array();
    for (const auto& a : b.axes) {
      box.push_back(json::array({a.lo == kNegInf ? json("-inf") : json(a.lo),
                                 a.hi == kPosInf ? json("inf") : json(a.hi),
                                 a.lo_open, a.hi_open}));
    }
    boxes.push_back(std::move(box));
  }
  return boxes;
}

inline double bound_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kPosInf;
    if (s == "-inf") return kNegInf;
    throw std::runtime_error("region json: bad bound '" + s + "'");
  }
  return j.get<double>();
}

inline Region region_from_json(const json& j, std::size_t dim) {
  std::vector<Box> boxes;
  for (const auto& jb : j) {
    Box b(dim);
    if (jb.size() != dim) {
      throw std::runtime_error("region json: box dimension mismatch");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      const auto& ja = jb[d];
      b.axes[d] = Interval{bound_from_json(ja.at(0)), bound_from_json(ja.at(1)),
                           ja.at(2).get<bool>(), ja.at(3).get<bool>()};
    }
    boxes.push_back(std::move(b));
  }
  return Region(dim, std::move(boxes));
}

// ---- observation CSV -------------------------------------------------------

inline std::vector<Observation> read_observations_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("observation csv: empty file");
  }
  ++lineno;
  auto header = split_csv(line);
  bool has_json = !header.empty() && header.back() == "region_json";
  std::size_t quad_cols = header.size() - (has_json ? 1 : 0);
  if (quad_cols == 0 || quad_cols % 4 != 0) {
    throw std::runtime_error(
        "observation csv: header must repeat c_lo,c_hi,t_lo,t_hi per "
        "dimension (optionally followed by region_json)");
  }
  const std::size_t dim = quad_cols / 4;

  std::vector<Observation> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() < quad_cols || cells.size() > quad_cols + (has_json ? 1 : 0)) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) +
                               " columns, got " + std::to_string(cells.size()));
    }
    std::string rj;
    if (has_json && cells.size() == quad_cols + 1) rj = cells[quad_cols];
    rj.erase(0, rj.find_first_not_of(" \t"));
    try {
      if (!rj.empty()) {
        json j = json::parse(rj);
        Region censor = region_from_json(j.at("censor"), dim);
        Region trunc = j.contains("trunc") ? region_from_json(j.at("trunc"), dim)
                                           : Region::empty(dim);
        out.emplace_back(std::move(censor), std::move(trunc), Scheme::general);
        continue;
      }
      Box cbox(dim);
      std::vector<Box> tslabs;
      for (std::size_t d = 0; d < dim; ++d) {
        double c_lo = parse_double(cells[4 * d + 0], lineno);
        double c_hi = parse_double(cells[4 * d + 1], lineno);
        double t_lo = parse_double(cells[4 * d + 2], lineno);
        double t_hi = parse_double(cells[4 * d + 3], lineno);
        if (c_lo == c_hi && std::isfinite(c_lo)) {
          cbox.axes[d] = Interval::point(c_lo);
        } else {
          cbox.axes[d] = Interval{c_lo, c_hi, true, true};
        }
        if (t_lo != kNegInf) {
          Box slab = Box::whole(dim);
          slab.axes[d] = Interval::below(t_lo);
          tslabs.push_back(std::move(slab));
        }
        if (t_hi != kPosInf) {
          Box slab = Box::whole(dim);
          slab.axes[d] = Interval::above(t_hi);
          tslabs.push_back(std::move(slab));
        }
      }
      out.emplace_back(Region::from_box(std::move(cbox)),
                       Region(dim, std::move(tslabs)), Scheme::general);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                               e.what());
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": bad region_json: " + e.what());
    }
  }
  if (out.empty()) {
    throw std::runtime_error("observation csv: no data rows");
  }
  return out;
}

// True when the observation is expressible through the per-dimension
// quadruples: a single censor box and truncation made of axis slabs.
inline bool quadruple_expressible(const Observation& o) {
  if (o.censor.boxes().size() != 1) return false;
  const std::size_t dim = o.dim();
  for (const auto& b : o.trunc.boxes()) {
    std::size_t bounded = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const Interval& a = b.axes[d];
      bool whole = a.lo == kNegInf && a.hi == kPosInf;
      bool left_slab = a.lo == kNegInf && std::isfinite(a.hi);
      bool right_slab = std::isfinite(a.lo) && a.hi == kPosInf;
      if (whole) continue;
      if (left_slab || right_slab) {
        ++bounded;
      } else {
        return false;
      }
    }
    if (bounded != 1) return false;
  }
  return true;
}

inline void write_observations_csv(std::ostream& os,
                                   std::span<const Observation> obs) {
  if (obs.empty()) throw std::invalid_argument("no observations to write");
  const std::size_t dim = obs[0].dim();
  for (std::size_t d = 0; d < dim; ++d) {
    os << (d ? "," : "") << "c_lo,c_hi,t_lo,t_hi";
  }
  os << ",region_json\n";
  for (const auto& o : obs) {
    if (quadruple_expressible(o)) {
      const Box& c = o.censor.boxes()[0];
      std::vector<double> t_lo(dim, kNegInf), t_hi(dim, kPosInf);
      for (const auto& b : o.trunc.boxes()) {
        for (std::size_t d = 0; d < dim; ++d) {
          const Interval& a = b.axes[d];
          if (a.lo == kNegInf && std::isfinite(a.hi)) t_lo[d] = a.hi;
          if (std::isfinite(a.lo) && a.hi == kPosInf) t_hi[d] = a.lo;
        }
      }
      for (std::size_t d = 0; d < dim; ++d) {
        os << (d ? "," : "") << format_double(c.axes[d].lo) << ","
           << format_double(c.axes[d].hi) << "," << format_double(t_lo[d])
           << "," << format_double(t_hi[d]);
      }
      os << ",\n";
    } else {
      for (std::size_t d = 0; d < dim; ++d) {
        os << (d ? "," : "") << "0,0,-inf,inf";
      }
      json j{{"censor", region_to_json(o.censor)},
             {"trunc", region_to_json(o.trunc)}};
      os << "," << j.dump() << "\n";
    }
  }
}

// ---- employee / joint-life record CSV --------------------------------------

inline std::vector<EmployeeRecord> read_employee_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("employee csv: empty file");
  }
  ++lineno;
  std::vector<EmployeeRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected 6 columns "
                               "(birth,hire,term,reason,period_start,period_end)");
    }
    EmployeeRecord r;
    r.birth_days = parse_iso_date(cells[0], lineno);
    r.hire_days = parse_iso_date(cells[1], lineno);
    std::string term = cells[2];
    term.erase(0, term.find_first_not_of(" \t"));
    term.erase(term.find_last_not_of(" \t") + 1);
    if (!term.empty()) r.term_days = parse_iso_date(term, lineno);
    r.reason = static_cast<int>(parse_double(cells[3], lineno));
    r.period_start_days = parse_iso_date(cells[4], lineno);
    r.period_end_days = parse_iso_date(cells[5], lineno);
    out.push_back(r);
  }
  if (out.empty()) throw std::runtime_error("employee csv: no data rows");
  return out;
}

inline std::vector<JointLifeRecord> read_joint_life_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("joint-life csv: empty file");
  }
  ++lineno;
  std::vector<JointLifeRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 7) {
      throw std::runtime_error(
          "line " + std::to_string(lineno) +
          ": expected 7 columns (entry1,entry2,elapsed,exit1,exit2,dead1,dead2)");
    }
    JointLifeRecord r;
    r.entry_age_1 = parse_double(cells[0], lineno);
    r.entry_age_2 = parse_double(cells[1], lineno);
    r.elapsed = parse_double(cells[2], lineno);
    r.exit_age_1 = parse_double(cells[3], lineno);
    r.exit_age_2 = parse_double(cells[4], lineno);
    r.dead_1 = parse_double(cells[5], lineno) != 0.0;
    r.dead_2 = parse_double(cells[6], lineno) != 0.0;
    out.push_back(r);
  }
  if (out.empty()) throw std::runtime_error("joint-life csv: no data rows");
  return out;
}

// ---- estimate JSON and CDF CSV ---------------------------------------------

inline json fit_to_json(const FitResult& fr) {
  const Grid& g = fr.estimate.grid();
  json atoms = json::array();
  std::vector<double> pt(g.dim());
  for (std::size_t c = 0; c < fr.estimate.size(); ++c) {
    g.atom(c, pt);
    atoms.push_back(pt);
  }
  json axes = json::array();
  for (std::size_t d = 0; d < g.dim(); ++d) axes.push_back(g.axis(d));
  return json{{"dimension", g.dim()},
              {"atoms", std::move(atoms)},
              {"masses", fr.estimate.mass()},
              {"axes", std::move(axes)},
              {"iterations", fr.iterations},
              {"final_residual", fr.final_residual},
              {"adjusted_n", fr.adjusted_n},
              {"converged", fr.converged},
              {"degenerate_observations", fr.degenerate}};
}

inline void write_matrix_csv(std::ostream& os, const CdfMatrix& m) {
  os << "age";
  for (double s : m.services) os << "," << format_double(s);
  os << "\n";
  for (std::size_t i = 0; i < m.ages.size(); ++i) {
    os << format_double(m.ages[i]);
    for (double v : m.values[i]) os << "," << format_double(v);
    os << "\n";
  }
}

inline void write_cdf_csv(std::ostream& os, const MassFunction& p) {
  if (p.grid().dim() == 1) {
    os << "x,mass,cdf\n";
    long double cum = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cum += p.mass()[i];
      os << format_double(p.grid().axis(0)[i]) << ","
         << format_double(p.mass()[i]) << ","
         << format_double(static_cast<double>(cum)) << "\n";
    }
    return;
  }
  if (p.grid().dim() == 2) {
    const auto& ages = p.grid().axis(0);
    const auto& servs = p.grid().axis(1);
    double age_step = ages.size() > 1 ? ages[1] - ages[0] : 1.0;
    double service_step = servs.size() > 1 ? servs[1] - servs[0] : 1.0;
    write_matrix_csv(os, cdf_table(p, age_step, service_step));
    return;
  }
  throw std::invalid_argument("write_cdf_csv: dimension > 2 not supported");
}

// ---- study result CSVs -------------------------------------------------

inline void write_replications_csv(std::ostream& os, const StudyResult& r) {
  os << "replication,seed,censor_fraction,trunc_fraction,complete_ratio";
  for (EstimatorKind k : r.config.estimators) {
    auto name = estimator_name(k);
    os << "," << name << "_rho," << name << "_delta_median," << name
       << "_converged," << name << "_iterations";
  }
  os << "\n";
  for (const auto& rep : r.replications) {
    os << rep.replication << "," << rep.seed << ","
       << format_double(rep.censor_fraction) << ","
       << format_double(rep.trunc_fraction) << ","
       << format_double(rep.complete_sample_ratio);
    for (const auto& eo : rep.by_estimator) {
      os << "," << format_double(eo.rho) << ","
         << format_double(eo.delta_median) << "," << (eo.converged ? 1 : 0)
         << "," << eo.iterations;
    }
    os << "\n";
  }
}

inline void write_summary_csv(std::ostream& os,
                              std::span<const SummaryRow> rows) {
  os << "scheme,rho_q01,rho_mean,rho_q99,delta_q01,delta_mean,delta_q99\n";
  for (const auto& s : rows) {
    os << s.label << "," << format_double(s.rho_q01) << ","
       << format_double(s.rho_mean) << "," << format_double(s.rho_q99) << ","
       << format_double(s.delta_q01) << "," << format_double(s.delta_mean)
       << "," << format_double(s.delta_q99) << "\n";
  }
}

inline void write_bands_csv(std::ostream& os, std::span<const double> lattice,
                            const Bands& b, const CdfFn& truth) {
  os << "x,lower,mean,upper,truth\n";
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    os << format_double(lattice[i]) << "," << format_double(b.lower[i]) << ","
       << format_double(b.mean[i]) << "," << format_double(b.upper[i]) << ","
       << format_double(truth(lattice[i])) << "\n";
  }
}

inline void write_compare_csv(std::ostream& os,
                              std::span<const StudyResult> arms) {
  os << "# reference_rho_thresholds,0.05,0.10\n";
  os << "estimator,distribution,replication,rho,delta\n";
  for (const auto& arm : arms) {
    for (std::size_t e = 0; e < arm.config.estimators.size(); ++e) {
      auto name = estimator_name(arm.config.estimators[e]);
      for (const auto& rep : arm.replications) {
        os << name << "," << arm.config.dist.name() << "," << rep.replication
           << "," << format_double(rep.by_estimator[e].rho) << ","
           << format_double(rep.by_estimator[e].delta_median) << "\n";
      }
    }
  }
}

inline void write_conditional_csv(std::ostream& os, const ConditionalCdf& c) {
  os << "age,cdf\n";
  for (std::size_t i = 0; i < c.ages.size(); ++i) {
    os << format_double(c.ages[i]) << "," << format_double(c.cdf[i]) << "\n";
  }
}

// ---- run configuration -------------------------------------------------

inline DistSpec dist_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "gamma") {
    return DistSpec::gamma(j.at("shape").get<double>(),
                           j.at("scale").get<double>());
  }
  if (family == "lognormal") {
    return DistSpec::lognormal(j.at("log_location").get<double>(),
                               j.at("log_scale").get<double>());
  }
  if (family == "weibull") {
    return DistSpec::weibull(j.at("shape").get<double>(),
                             j.at("scale").get<double>());
  }
  if (family == "tweedie") {
    return DistSpec::tweedie(j.at("p").get<double>(), j.at("mu").get<double>(),
                             j.at("phi").get<double>());
  }
  throw std::runtime_error("config: unknown distribution family '" + family +
                           "'");
}

inline Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw std::runtime_error("config: unknown scheme '" + name + "'");
}

inline Window window_from_json(const json& j) {
  return Window{j.at(0).get<double>(), j.at(1).get<double>()};
}

inline SchemeMix mix_from_json(const json& j) {
  if (j.contains("preset")) {
    const std::string p = j.at("preset").get<std::string>();
    if (p == "example6") return example6_lt_rc_mix();
    if (p == "example7") return table3_example7_mix();
    if (p == "example9") return table3_example9_mix();
    if (p.rfind("example8:", 0) == 0) {
      return example8_scheme_mix(scheme_from_name(p.substr(9)));
    }
    throw std::runtime_error("config: unknown mix preset '" + p + "'");
  }
  SchemeMix m;
  for (auto& [key, value] : j.at("fractions").items()) {
    m.fraction(scheme_from_name(key)) = value.get<double>();
  }
  if (j.contains("windows")) {
    const json& w = j.at("windows");
    if (w.contains("right_censor")) m.right_censor = window_from_json(w["right_censor"]);
    if (w.contains("left_censor")) m.left_censor = window_from_json(w["left_censor"]);
    if (w.contains("interval_width")) m.interval_width = window_from_json(w["interval_width"]);
    if (w.contains("left_trunc")) m.left_trunc = window_from_json(w["left_trunc"]);
    if (w.contains("right_trunc")) m.right_trunc = window_from_json(w["right_trunc"]);
  }
  if (j.contains("trunc_space")) {
    const std::string v = j.at("trunc_space").get<std::string>();
    if (v == "value") {
      m.trunc_space = WindowSpace::value;
    } else if (v == "quantile") {
      m.trunc_space = WindowSpace::quantile;
    } else {
      throw std::runtime_error("config: unknown trunc_space '" + v + "'");
    }
  }
  if (j.contains("left_entry")) {
    const std::string v = j.at("left_entry").get<std::string>();
    if (v == "uniform_below_value") {
      m.left_entry = EntryDependence::uniform_below_value;
    } else if (v == "independent") {
      m.left_entry = EntryDependence::independent;
    } else {
      throw std::runtime_error("config: unknown left_entry '" + v + "'");
    }
  }
  m.validate();
  return m;
}

inline EstimatorKind estimator_from_name(const std::string& s) {
  if (s == "qed") return EstimatorKind::qed;
  if (s == "km") return EstimatorKind::km;
  if (s == "turnbull") return EstimatorKind::turnbull;
  throw std::runtime_error("config: unknown estimator '" + s + "'");
}

struct SimulationSpec {
  std::vector<DistSpec> dists;
  SchemeMix mix;
  std::optional<DegreeTargets> calibrate;
  int n = 250;
  int replications = 100;
  std::vector<EstimatorKind> estimators{EstimatorKind::qed};
  std::uint64_t seed = 1;
  EstimatorConfig estimator;
  std::vector<double> band_alphas;
};

inline SimulationSpec simulation_spec_from_json(const json& j) {
  SimulationSpec s;
  if (j.contains("dists")) {
    for (const auto& dj : j.at("dists")) s.dists.push_back(dist_from_json(dj));
  } else {
    s.dists.push_back(dist_from_json(j.at("dist")));
  }
  s.mix = mix_from_json(j.at("mix"));
  if (j.contains("calibrate")) {
    DegreeTargets t;
    if (j["calibrate"].contains("censoring")) {
      t.censoring = j["calibrate"]["censoring"].get<double>();
    }
    if (j["calibrate"].contains("truncation")) {
      t.truncation = j["calibrate"]["truncation"].get<double>();
    }
    s.calibrate = t;
  }
  s.n = j.value("n", 250);
  s.replications = j.value("replications", 100);
  if (j.contains("estimators")) {
    s.estimators.clear();
    for (const auto& e : j.at("estimators")) {
      s.estimators.push_back(estimator_from_name(e.get<std::string>()));
    }
  }
  s.seed = j.value("seed", 1ull);
  s.estimator.tol = j.value("tol", s.estimator.tol);
  s.estimator.max_iter = j.value("max_iter", s.estimator.max_iter);
  if (j.contains("variant")) {
    const std::string v = j.at("variant").get<std::string>();
    if (v == "eq20") {
      s.estimator.variant = EstimatorConfig::Variant::eq20;
    } else if (v == "eq22") {
      s.estimator.variant = EstimatorConfig::Variant::eq22;
    } else {
      throw std::runtime_error("config: unknown variant '" + v + "'");
    }
  }
  if (j.contains("band_alphas")) {
    for (const auto& a : j.at("band_alphas")) {
      s.band_alphas.push_back(a.get<double>());
    }
  }
  return s;
}

}  // namespace qed::io
