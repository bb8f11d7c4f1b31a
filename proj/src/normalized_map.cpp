#include "cppll/normalized_map.hpp"

#include "cppll/quadratic.hpp"

namespace cppll {

std::pair<ReducedParams, ReducedState> to_reduced(const LoopParameters& p, const PllState& st) {
  validate(p);
  ReducedParams rp{p.kv * p.ip * p.t_ref * p.r2, p.kv * p.ip * p.t_ref * p.t_ref / (2.0 * p.c)};
  ReducedState rs{st.tau / p.t_ref, p.t_ref * (p.omega_free + p.kv * st.v) - 1.0, st.k};
  return {rp, rs};
}

std::pair<LoopParameters, PllState> from_reduced(const ReducedParams& rp, const ReducedState& rs) {
  if (!(rp.alpha > 0.0) || !(rp.beta > 0.0)) throw InvalidArgument("alpha and beta must be positive");
  LoopParameters p;
  p.t_ref = 1.0;
  p.r2 = 1.0;
  p.ip = 1.0;
  p.kv = rp.alpha;
  p.c = rp.alpha / (2.0 * rp.beta);
  p.omega_free = 0.0;
  return {p, PllState{rs.s, (rs.w + 1.0) / rp.alpha, rs.k}};
}

ReducedParams reduced_params_from_gains(const NormalizedGains& g) {
  return {g.k_n, g.k_n / (2.0 * g.tau_2n)};
}

NormalizedGains gains_from_reduced(const ReducedParams& rp) {
  return gains_from(rp.alpha, rp.alpha / (2.0 * rp.beta));
}

// Substituting tau = T s and Kv v + omega_free = (w + 1) / T into the
// dimensional map multiplies every phase quantity by T and every quadratic
// coefficient by T^2: a T^2 = beta, b T = w + 1 + alpha.
ReducedOutcome reduced_step(const ReducedParams& rp, const ReducedState& rs) {
  if (!(rs.s > -1.0)) throw InvalidArgument("s must exceed -1");
  const double g = rs.w + 1.0;  // VCO frequency in units of 1/T
  if (!(g > 0.0)) return ReducedFault{rs.w};

  const double lin = g + rp.alpha;
  double s_next = 0.0;
  if (rs.s >= 0.0) {
    const double frac = numeric::euclid_mod(rs.s, 1.0);
    const double c = (1.0 - frac) * g - 1.0;
    if (c <= 0.0) {
      s_next = numeric::nonnegative_root(rp.beta, lin, c, lin * lin - 4.0 * rp.beta * c);
    } else {
      s_next = 1.0 / g - 1.0 + frac;
    }
  } else {
    const double phase = -(g - rp.alpha) * rs.s + rp.beta * rs.s * rs.s;
    const double frac = numeric::euclid_mod(phase, 1.0);
    const double until_edge = (1.0 - frac) / g;
    if (until_edge <= 1.0) {
      s_next = until_edge - 1.0;
    } else {
      const double d = frac + g - 1.0;
      s_next = numeric::nonnegative_root(rp.beta, lin, d, lin * lin - 4.0 * rp.beta * d);
    }
  }

  ReducedState next{s_next, rs.w + 2.0 * rp.beta * s_next, rs.k + 1};
  if (s_next > 0.0) {
    double margin = next.w + 1.0 - 2.0 * rp.beta * s_next;
    if (margin < 0.0) return ReducedOverload{OverloadCondition::kPositiveTau, next, margin};
  } else if (s_next < 0.0) {
    double margin = next.w + 1.0 - rp.alpha;
    if (margin < 0.0) return ReducedOverload{OverloadCondition::kNegativeTau, next, margin};
  }
  return next;
}

}  // namespace cppll
