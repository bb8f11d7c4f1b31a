#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cppll/core.hpp"

// The original six-case pulse-width algorithm, restricted to the three cases
// whose formulas are available: case 1 (UP pulse ended, next pulse UP),
// case 2 (DOWN pulse ended, next pulse DOWN) and case 6 (cycle-slip
// recalculation). Every other flowchart path is reported as unsupported.

namespace cppll::original {

/// How v(k-1) is obtained when case 6 runs at k = 0.
enum class HistoryMode {
  kStrict,         ///< v(-1) is undefined: the step fails
  kFootnoteFix,    ///< v(-1) = v(0) - (Ip/C) tau(0)
  kAssumeCurrent,  ///< v(-1) taken as v(0)
};

struct NegativeDiscriminant {
  int which_case;  ///< 1 or 6
  double value;    ///< < 0
};

struct UndefinedHistory {};

struct UnsupportedCase {
  /// Flowchart cases that would be needed, e.g. "3-5" or "6-continuation".
  const char* needed;
  double trial_tau;  ///< value that triggered the dispatch
};

using Failure = std::variant<NegativeDiscriminant, UndefinedHistory, UnsupportedCase>;

struct Case6Trace {
  std::vector<double> ts;
  /// vs[0] is the starting voltage v_0; vs[n] follows ts[n-1].
  std::vector<double> vs;
  double partial_sum = 0.0;
};

struct StepResult {
  std::variant<PllState, Failure> outcome;
  int case_used = 0;
  /// Case-2 value of tau(k+1) before any case-6 dispatch.
  std::optional<double> case2_tau;
  std::optional<Case6Trace> case6;

  bool ok() const { return std::holds_alternative<PllState>(outcome); }
};

/// Discriminant of the case-1 root.
double case1_discriminant(const LoopParameters& p, const PllState& st);

/// Case-2 value of tau(k+1); requires v != 0.
double case2_tau(const LoopParameters& p, const PllState& st);

/// One step of the original algorithm. `v_prev` is v(k-1) when known; at
/// k = 0 it is normally absent and `mode` decides what case 6 uses.
/// Requires omega_free == 0.
StepResult original_step(const LoopParameters& p, const PllState& st,
                         std::optional<double> v_prev = std::nullopt,
                         HistoryMode mode = HistoryMode::kStrict);

struct OriginalTrajectory {
  std::vector<PllState> states;
  std::optional<Failure> failure;
};

OriginalTrajectory run_original(const LoopParameters& p, const PllState& st0,
                                std::size_t max_steps, HistoryMode mode);

/// e.g. "negative_discriminant case 1, -0.2096"
std::string describe(const Failure& f);
const char* kind_name(const Failure& f);

}  // namespace cppll::original
