#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "cppll/core.hpp"

// Continuous-time reference simulator of the charge-pump loop: ideal tri-state
// PFD, charge pump of +/-Ip, series R2-C filter and a VCO whose frequency is
// omega_free + Kv * v_F. Between events the pump current is constant, so the
// capacitor voltage is affine and the VCO phase quadratic in time; every event
// time is found in closed form.

namespace cppll::oracle {

enum class Pfd { kNull, kUp, kDown };

const char* to_string(Pfd s);

struct CircuitState {
  double time = 0.0;
  Pfd pfd = Pfd::kNull;
  double v_cap = 0.0;
  /// VCO phase in cycles; an edge is emitted when it reaches 1.
  double theta_vco = 0.0;
  double next_ref_edge = 0.0;
  /// Start of the current UP/DOWN interval; meaningless when pfd is kNull.
  double pulse_start = 0.0;
};

struct Pulse {
  double start = 0.0;
  double width = 0.0;  ///< > 0 for UP, < 0 for DOWN
  double v_end = 0.0;  ///< capacitor voltage when the pump returns to NULL
};

enum class Termination { kCompleted, kOverloaded };

const char* to_string(Termination t);

struct Horizon {
  std::size_t max_pulses = std::numeric_limits<std::size_t>::max();
  double max_time = std::numeric_limits<double>::infinity();
};

/// One row of the waveform export.
struct Event {
  double time;
  Pfd pfd;
  double v_cap;
  double v_f;
  double theta_vco;
};

struct PulseTrain {
  std::vector<Pulse> pulses;
  Termination termination = Termination::kCompleted;
  double end_time = 0.0;
  /// Realization of the discrete initial state, when it had non-zero width.
  std::optional<Pulse> initial;
};

/// Ref and VCO edges closer than this fraction of T are simultaneous.
inline constexpr double kTieFraction = 1e-15;

/// Circuit state whose first pulse ends with width tau(0) and capacitor
/// voltage v(0).
CircuitState init_from_discrete(const LoopParameters& p, const PllState& st0);

/// Runs from an explicit circuit state. Every completed pulse is recorded,
/// including one already in progress at `init`; coincident edges count as a
/// pulse of zero width.
PulseTrain simulate(const LoopParameters& p, const CircuitState& init, const Horizon& horizon,
                    std::vector<Event>* events = nullptr);

/// Runs from a discrete state. `pulses[k - 1]` corresponds to map state k;
/// the realized initial pulse is moved to `initial`.
PulseTrain simulate(const LoopParameters& p, const PllState& init, const Horizon& horizon,
                    std::vector<Event>* events = nullptr);

}  // namespace cppll::oracle
