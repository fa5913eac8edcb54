#ifndef LAXFLOW_IO_HPP
#define LAXFLOW_IO_HPP

#include <charconv>
#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "laxflow/dense_matrix.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/invariants.hpp"
#include "laxflow/model.hpp"
#include "laxflow/trajectory.hpp"

namespace laxflow {

using json = nlohmann::json;

/// Shortest-roundtrip-safe text for a double: 17 significant digits, '.'
/// decimal point, independent of the global locale.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw Error("format_number: conversion failed");
  return {buf, res.ptr};
}

inline double parse_number(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("parse_number: not a number: '" + std::string(text) + "'");
  return value;
}

// ModelParams / PhaseState ---------------------------------------------------

inline void to_json(json& j, const ModelParams& m) {
  j = json{{"n", m.n},         {"g2", m.g2},           {"g1sq", m.g1sq},
           {"g2sq_single", m.g2sq_single}, {"epsilon", m.epsilon}, {"omega", m.omega}};
  if (m.separation_floor != kDefaultSeparationFloor) j["separation_floor"] = m.separation_floor;
}

inline void from_json(const json& j, ModelParams& m) {
  m = ModelParams{};
  if (j.contains("n")) j.at("n").get_to(m.n);
  m.g2 = j.value("g2", 0.0);
  m.g1sq = j.value("g1sq", 0.0);
  m.g2sq_single = j.value("g2sq_single", 0.0);
  m.epsilon = j.value("epsilon", 0);
  m.omega = j.value("omega", 0.0);
  m.separation_floor = j.value("separation_floor", kDefaultSeparationFloor);
}

inline void to_json(json& j, const PhaseState& s) { j = json{{"q", s.q}, {"p", s.p}, {"t", s.t}}; }

inline void from_json(const json& j, PhaseState& s) {
  j.at("q").get_to(s.q);
  if (j.contains("p")) {
    j.at("p").get_to(s.p);
  } else {
    s.p.assign(s.q.size(), 0.0);
  }
  s.t = j.value("t", 0.0);
}

/// Flat document with keys n, g2, g1sq, g2sq_single, epsilon, omega, q, p, t.
inline json model_state_to_json(const ModelParams& params, const PhaseState& state) {
  json j = params;
  j["q"] = state.q;
  j["p"] = state.p;
  j["t"] = state.t;
  return j;
}

inline std::pair<ModelParams, PhaseState> model_state_from_json(const json& j) {
  try {
    auto params = j.get<ModelParams>();
    auto state = j.get<PhaseState>();
    if (!j.contains("n")) params.n = static_cast<int>(state.q.size());
    if (state.q.size() != static_cast<std::size_t>(params.n) || state.p.size() != state.q.size())
      throw ConfigError("model/state document: q and p must have length n");
    params.validate();
    return {params, state};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model/state document: ") + e.what());
  }
}

// ComplexMatrix --------------------------------------------------------------

inline json complex_matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) {
      rr.push_back(m(i, k).real());
      ii.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"dim", m.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix complex_matrix_from_json(const json& j) {
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("im").get<std::vector<std::vector<double>>>();
    if (re.size() != dim || im.size() != dim) throw ConfigError("complex matrix: row count != dim");
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (re[i].size() != dim || im[i].size() != dim)
        throw ConfigError("complex matrix: column count != dim");
      for (std::size_t k = 0; k < dim; ++k) m(i, k) = {re[i][k], im[i][k]};
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("complex matrix: ") + e.what());
  }
}

// CSV ------------------------------------------------------------------------

namespace detail {

inline void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace detail

/// Columns: t, q_1..q_n, p_1..p_n, H, I_1..I_kmax, absB_1..absB_kmax.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto n = static_cast<std::size_t>(traj.params.n);
  const auto kmax = static_cast<std::size_t>(traj.kmax);
  std::vector<std::string> header{"t"};
  for (std::size_t j = 1; j <= n; ++j) header.push_back("q_" + std::to_string(j));
  for (std::size_t j = 1; j <= n; ++j) header.push_back("p_" + std::to_string(j));
  header.emplace_back("H");
  for (std::size_t k = 1; k <= kmax; ++k) header.push_back("I_" + std::to_string(k));
  for (std::size_t k = 1; k <= kmax; ++k) header.push_back("absB_" + std::to_string(k));
  detail::csv_row(os, header);

  for (const auto& s : traj.samples) {
    std::vector<std::string> row{format_number(s.state.t)};
    for (double v : s.state.q) row.push_back(format_number(v));
    for (double v : s.state.p) row.push_back(format_number(v));
    row.push_back(format_number(s.record.H));
    for (std::size_t k = 0; k < kmax; ++k) row.push_back(format_number(s.record.I.at(k)));
    for (std::size_t k = 0; k < kmax; ++k) row.push_back(format_number(std::abs(s.record.B.at(k))));
    detail::csv_row(os, row);
  }
}

/// Columns: t, H, I_1..I_kmax, ReB_1, ImB_1, ..., ReB_kmax, ImB_kmax.
inline void write_invariants_csv(std::ostream& os, const Trajectory& traj) {
  const auto kmax = static_cast<std::size_t>(traj.kmax);
  std::vector<std::string> header{"t", "H"};
  for (std::size_t k = 1; k <= kmax; ++k) header.push_back("I_" + std::to_string(k));
  for (std::size_t k = 1; k <= kmax; ++k) {
    header.push_back("ReB_" + std::to_string(k));
    header.push_back("ImB_" + std::to_string(k));
  }
  detail::csv_row(os, header);
  for (const auto& s : traj.samples) {
    const auto& r = s.record;
    std::vector<std::string> row{format_number(r.t), format_number(r.H)};
    for (std::size_t k = 0; k < kmax; ++k) row.push_back(format_number(r.I.at(k)));
    for (std::size_t k = 0; k < kmax; ++k) {
      row.push_back(format_number(r.B.at(k).real()));
      row.push_back(format_number(r.B.at(k).imag()));
    }
    detail::csv_row(os, row);
  }
}

/// JSON summary: drift maxima, step statistics and optionally the period check.
inline json trajectory_summary(const Trajectory& traj, std::optional<double> period_value = {}) {
  const auto drift = drift_stats(traj);
  json j{{"source", traj.source},
         {"scheme", std::string(to_string(traj.scheme))},
         {"dt", traj.dt},
         {"n", traj.params.n},
         {"kmax", traj.kmax},
         {"samples", traj.samples.size()},
         {"t_start", traj.empty() ? 0.0 : traj.front().state.t},
         {"t_end", traj.empty() ? 0.0 : traj.back().state.t},
         {"model", traj.params},
         {"step_stats",
          {{"accepted", traj.step_stats.accepted},
           {"rejected", traj.step_stats.rejected},
           {"min_separation", traj.step_stats.min_separation}}},
         {"drift", {{"H", drift.H}, {"I", drift.I}, {"B_modulus", drift.B_modulus}}}};
  if (period_value) j["period_check"] = *period_value;
  return j;
}

}  // namespace laxflow

#endif  // LAXFLOW_IO_HPP
