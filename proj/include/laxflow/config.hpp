#ifndef LAXFLOW_CONFIG_HPP
#define LAXFLOW_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "laxflow/dynamics.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/io.hpp"
#include "laxflow/model.hpp"
#include "laxflow/random_state.hpp"
#include "laxflow/trajectory.hpp"

namespace laxflow {

struct RunSettings {
  std::optional<double> t_end;  ///< defaults to one period (omega > 0) or 10
  double dt = 1e-3;
  Scheme scheme = Scheme::Yoshida4;
  int record_every = 10;
  int kmax = 0;  ///< 0 selects n
  std::uint64_t seed = 1;
};

struct OutputSettings {
  std::string dir = ".";
  std::string format = "both";  ///< csv | json | both

  bool wants_csv() const { return format == "csv" || format == "both"; }
  bool wants_json() const { return format == "json" || format == "both"; }
};

inline ModelParams default_model() {
  ModelParams m;
  m.n = 4;
  m.g2 = 1.0;
  m.omega = 1.0;
  return m;
}

/// Model, initial condition (explicit or generated), run and output settings.
///
///   {"model":   {"n": 4, "g2": 1, "omega": 1, ...},
///    "initial": {"q": [...], "p": [...], "t": 0}   or   {"random": {"gap": 0.1, ...}},
///    "run":     {"t_end": 6.28, "dt": 1e-3, "scheme": "yoshida4", "record_every": 10,
///                "kmax": 4, "seed": 7},
///    "output":  {"dir": "out", "format": "both"}}
///
/// A flat {n, g2, ..., q, p, t} document is accepted as well.
struct RunConfig {
  /// Used when no model is configured: n = 4, g2 = 1, omega = 1.
  ModelParams model = default_model();
  std::optional<PhaseState> initial;
  StateGenerator generator;
  RunSettings run;
  OutputSettings output;

  int kmax() const { return run.kmax > 0 ? run.kmax : model.n; }

  double t_end() const {
    if (run.t_end) return *run.t_end;
    return model.omega > 0.0 ? period_of(model.omega) : 10.0;
  }

  /// The explicit initial state, or the generated one for run.seed.
  PhaseState initial_state() const {
    if (initial) return *initial;
    return generate_state(model, generator, run.seed);
  }

  void validate() const {
    model.validate();
    generator.validate();
    if (initial && (initial->q.size() != static_cast<std::size_t>(model.n) ||
                    initial->p.size() != initial->q.size()))
      throw ConfigError("config: initial q and p must have length n");
    if (!(run.dt > 0.0)) throw ConfigError("config: dt must be > 0");
    if (run.t_end && !(*run.t_end > 0.0)) throw ConfigError("config: t_end must be > 0");
    if (run.record_every < 1) throw ConfigError("config: record_every must be >= 1");
    if (run.kmax < 0 || run.kmax > 2 * model.n) throw ConfigError("config: kmax must be in [0, 2n]");
    if (output.format != "csv" && output.format != "json" && output.format != "both")
      throw ConfigError("config: format must be csv, json or both");
  }
};

inline RunConfig parse_config(const json& j) {
  try {
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (j.contains("q") && !j.contains("model")) {
      auto [params, state] = model_state_from_json(j);
      cfg.model = params;
      cfg.initial = state;
    } else {
      if (j.contains("model")) cfg.model = j.at("model").get<ModelParams>();
      if (j.contains("initial")) {
        const auto& init = j.at("initial");
        if (init.contains("random")) {
          const auto& r = init.at("random");
          cfg.generator.gap = r.value("gap", cfg.generator.gap);
          cfg.generator.spread = r.value("spread", cfg.generator.spread);
          cfg.generator.momentum_scale = r.value("momentum_scale", cfg.generator.momentum_scale);
          cfg.generator.center = r.value("center", cfg.generator.center);
        } else {
          cfg.initial = init.get<PhaseState>();
          if (!j.contains("model") || !j.at("model").contains("n")) cfg.model.n = static_cast<int>(cfg.initial->q.size());
        }
      }
    }
    if (j.contains("run")) {
      const auto& r = j.at("run");
      if (r.contains("t_end")) cfg.run.t_end = r.at("t_end").get<double>();
      cfg.run.dt = r.value("dt", cfg.run.dt);
      if (r.contains("scheme")) cfg.run.scheme = parse_scheme(r.at("scheme").get<std::string>());
      cfg.run.record_every = r.value("record_every", cfg.run.record_every);
      cfg.run.kmax = r.value("kmax", cfg.run.kmax);
      cfg.run.seed = r.value("seed", cfg.run.seed);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      cfg.output.dir = o.value("dir", cfg.output.dir);
      cfg.output.format = o.value("format", cfg.output.format);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace laxflow

#endif  // LAXFLOW_CONFIG_HPP
