#ifndef LAXFLOW_TOOLS_COMMANDS_HPP
#define LAXFLOW_TOOLS_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "laxflow/config.hpp"
#include "logging.hpp"

namespace laxflow::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailure = 1,
  kExitRuntimeFailure = 2,
  kExitConfigError = 3,
};

struct CommandOptions {
  RunConfig config;
  int jobs = 1;
  /// Number of phase points checked by verify/brackets. Sample 0 is the
  /// configured initial state, sample i > 0 is generated from seed + i.
  int samples = 1;
  /// Test hooks (negative controls).
  bool corrupt_m = false;
  std::optional<double> phase_omega;
  bool corrupt_gradients = false;
};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int sample = 0;
};

/// Tolerances applied by verify, brackets and exact.
struct Tolerances {
  static constexpr double commutator_identity = 1e-12;
  static constexpr double n_identity = 1e-12;
  static constexpr double hermiticity = 1e-13;
  static constexpr double substitution = 1e-13;
  static constexpr double i1_equals_2h = 1e-12;
  static constexpr double flow_ratio_deviation = 0.2;  ///< |r(2h)/r(h) / 4 - 1|
  static constexpr double flow_roundoff_floor = 1e-9;
  static constexpr double flow_h = 1e-4;
  static constexpr double phase_law = 1e-6;
  static constexpr double modulus_drift = 1e-8;
  static constexpr double invariant_drift = 1e-8;
  static constexpr double involution = 1e-8;
  static constexpr double gradient_agreement = 1e-6;
  static constexpr double gradient_fd_h = 1e-6;
  static constexpr double exact_discrepancy = 1e-6;
};

std::vector<Check> verify_sample(const ModelParams& params, const PhaseState& state,
                                 const CommandOptions& opts, int sample);

int cmd_simulate(const CommandOptions& opts, const Logger& log);
int cmd_verify(const CommandOptions& opts, const Logger& log);
int cmd_brackets(const CommandOptions& opts, const Logger& log);
int cmd_exact(const CommandOptions& opts, const Logger& log);

/// Full command line: laxflow <simulate|verify|brackets|exact> [flags].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace laxflow::cli

#endif  // LAXFLOW_TOOLS_COMMANDS_HPP
