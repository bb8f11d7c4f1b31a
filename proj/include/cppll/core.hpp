#pragma once

#include <stdexcept>
#include <string>

namespace cppll {

/// Thrown when loop parameters or a precondition are violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical constants of a second-order charge-pump PLL with a series R2-C
/// loop filter. Units: ohm, farad, Hz/V, ampere, second, Hz.
struct LoopParameters {
  double r2 = 0.0;
  double c = 0.0;
  double kv = 0.0;
  double ip = 0.0;
  double t_ref = 0.0;
  double omega_free = 0.0;

  /// Ip / C, the capacitor slew rate while the pump is on.
  double slew() const { return ip / c; }
};

/// Empty when `p` is valid, otherwise a description of the first violation.
std::string validation_error(const LoopParameters& p);

/// Throws InvalidArgument when `p` is not valid.
void validate(const LoopParameters& p);

/// Discrete state of the pulse-width map: signed width of the k-th PFD pulse
/// (positive: reference leads, pump UP) and capacitor voltage at its end.
struct PllState {
  double tau = 0.0;
  double v = 0.0;
  long k = 0;
};

struct NormalizedGains {
  double k_n = 0.0;
  double tau_2n = 0.0;
  double f_n = 0.0;
  double zeta = 0.0;
};

NormalizedGains normalized_gains(const LoopParameters& p);

/// Gains from (k_n, tau_2n), computing f_n and zeta from them.
NormalizedGains gains_from(double k_n, double tau_2n);

/// Gains that realize a given (f_n, zeta) point.
NormalizedGains gains_from_fn_zeta(double f_n, double zeta);

struct AllowedArea {
  bool inside = false;
  /// (sqrt(1 + zeta^2) - zeta) / pi
  double phase_bound = 0.0;
  /// 1 / (4 pi zeta)
  double damping_bound = 0.0;
};

/// Both design inequalities, strict: equality counts as outside.
AllowedArea allowed_area(const NormalizedGains& g);

}  // namespace cppll
