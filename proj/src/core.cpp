#include "cppll/core.hpp"

#include <cmath>
#include <numbers>

namespace cppll {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::string validation_error(const LoopParameters& p) {
  if (!positive(p.r2)) return "r2 must be positive and finite";
  if (!positive(p.c)) return "c must be positive and finite";
  if (!positive(p.kv)) return "kv must be positive and finite";
  if (!positive(p.ip)) return "ip must be positive and finite";
  if (!positive(p.t_ref)) return "t must be positive and finite";
  if (!std::isfinite(p.omega_free) || p.omega_free < 0.0) {
    return "omega_free must be non-negative and finite";
  }
  return {};
}

void validate(const LoopParameters& p) {
  if (auto msg = validation_error(p); !msg.empty()) throw InvalidArgument(msg);
}

NormalizedGains gains_from(double k_n, double tau_2n) {
  if (!positive(k_n) || !positive(tau_2n)) {
    throw InvalidArgument("k_n and tau_2n must be positive");
  }
  NormalizedGains g;
  g.k_n = k_n;
  g.tau_2n = tau_2n;
  g.f_n = std::sqrt(k_n / tau_2n) / (2.0 * std::numbers::pi);
  g.zeta = std::sqrt(k_n * tau_2n) / 2.0;
  return g;
}

NormalizedGains normalized_gains(const LoopParameters& p) {
  validate(p);
  return gains_from(p.ip * p.r2 * p.kv * p.t_ref, p.r2 * p.c / p.t_ref);
}

NormalizedGains gains_from_fn_zeta(double f_n, double zeta) {
  if (!positive(f_n) || !positive(zeta)) {
    throw InvalidArgument("f_n and zeta must be positive");
  }
  // k_n / tau_2n = (2 pi f_n)^2 and k_n * tau_2n = 4 zeta^2.
  NormalizedGains g;
  g.k_n = 4.0 * std::numbers::pi * f_n * zeta;
  g.tau_2n = zeta / (std::numbers::pi * f_n);
  g.f_n = f_n;
  g.zeta = zeta;
  return g;
}

AllowedArea allowed_area(const NormalizedGains& g) {
  if (!positive(g.f_n) || !positive(g.zeta)) {
    throw InvalidArgument("f_n and zeta must be positive");
  }
  AllowedArea area;
  area.phase_bound = (std::sqrt(1.0 + g.zeta * g.zeta) - g.zeta) / std::numbers::pi;
  area.damping_bound = 1.0 / (4.0 * std::numbers::pi * g.zeta);
  area.inside = g.f_n < area.phase_bound && g.f_n < area.damping_bound;
  return area;
}

}  // namespace cppll
