#ifndef LAXFLOW_TRAJECTORY_HPP
#define LAXFLOW_TRAJECTORY_HPP

#include <complex>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "laxflow/errors.hpp"
#include "laxflow/model.hpp"

namespace laxflow {

/// Invariant snapshot at one sample. B, I and I0 are empty when the model has
/// no Lax pair (or kmax = 0); H is always present. B_k* = conj(B_k) is not
/// stored.
struct InvariantRecord {
  double t = 0.0;
  std::vector<std::complex<double>> B;
  std::vector<double> I;
  double H = 0.0;
  std::vector<double> I0;

  bool has_lax_data() const noexcept { return !B.empty(); }
};

enum class Scheme { Leapfrog2, Yoshida4 };

inline std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Leapfrog2 ? "leapfrog2" : "yoshida4";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "leapfrog2") return Scheme::Leapfrog2;
  if (name == "yoshida4") return Scheme::Yoshida4;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (leapfrog2|yoshida4)");
}

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double min_separation = std::numeric_limits<double>::infinity();
};

struct Sample {
  PhaseState state;
  InvariantRecord record;
};

/// Time-ordered samples. Sample times are strictly increasing.
struct Trajectory {
  ModelParams params;
  std::vector<Sample> samples;
  double dt = 0.0;
  Scheme scheme = Scheme::Yoshida4;
  StepStats step_stats;
  int kmax = 0;
  std::string source = "numeric";

  bool empty() const noexcept { return samples.empty(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }
  double duration() const { return empty() ? 0.0 : back().state.t - front().state.t; }
};

}  // namespace laxflow

#endif  // LAXFLOW_TRAJECTORY_HPP
