#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "cppll/core.hpp"

namespace cppll {

/// Intermediate quantities of one corrected-map step.
struct Auxiliaries {
  double a = 0.0;      ///< Kv Ip / (2C)
  double b = 0.0;      ///< omega_free + Kv v + Kv Ip R2
  double c_val = 0.0;  ///< phase surplus at the next reference edge after an UP pulse
  double d_val = 0.0;  ///< same, after a DOWN pulse
  double l_b = 0.0;    ///< time from the reference edge to the next VCO edge
  double s_la = 0.0;   ///< fractional VCO phase at the end of a DOWN pulse, in [0, 1)
  double s_lk = 0.0;   ///< VCO phase accumulated over a DOWN pulse of width |tau|
  double frequency = 0.0;  ///< omega_free + Kv v, VCO frequency with the pump off
};

/// The four successor formulas, named by which pulse ended and which pulse
/// comes next.
enum class Branch {
  kUpAfterUp,      ///< tau >= 0, c <= 0
  kDownAfterUp,    ///< tau >= 0, c > 0
  kDownAfterDown,  ///< tau < 0, l_b <= T
  kUpAfterDown,    ///< tau < 0, l_b > T
};

enum class OverloadCondition {
  kPositiveTau,  ///< tau > 0 and v + omega/Kv - (Ip/C) tau < 0
  kNegativeTau,  ///< tau < 0 and v + omega/Kv - Ip R2 < 0
};

/// The successor was computed but puts the VCO in overload.
struct Overloaded {
  OverloadCondition condition;
  PllState state;  ///< the offending successor
  double margin;   ///< left-hand side of the violated inequality (< 0)
};

/// omega_free + Kv v <= 0 at the start of a step.
struct FrequencyFault {
  double frequency;
};

using StepOutcome = std::variant<PllState, Overloaded, FrequencyFault>;
using AuxOutcome = std::variant<Auxiliaries, FrequencyFault>;

AuxOutcome auxiliaries(const LoopParameters& p, const PllState& st);

Branch select_branch(const LoopParameters& p, const PllState& st, const Auxiliaries& aux);

/// Evaluates both overload inequalities on `st`; returns the violated one.
std::variant<std::monostate, Overloaded> check_overload(const LoopParameters& p,
                                                        const PllState& st);

/// One application of the corrected map. Requires st.tau > -T.
StepOutcome step(const LoopParameters& p, const PllState& st);

enum class Termination { kCompleted, kOverloaded, kFrequencyFault };

const char* to_string(Termination t);
const char* to_string(Branch b);
const char* to_string(OverloadCondition c);

struct Trajectory {
  /// Starts with the initial state. On overload the offending successor is
  /// the last entry.
  std::vector<PllState> states;
  Termination termination = Termination::kCompleted;
  std::variant<std::monostate, Overloaded, FrequencyFault> fault;
};

Trajectory run_trajectory(const LoopParameters& p, const PllState& st0, std::size_t max_steps);

}  // namespace cppll
