#pragma once

#include <utility>
#include <variant>

#include "cppll/core.hpp"
#include "cppll/corrected_map.hpp"

namespace cppll {

/// alpha = Kv Ip T R2, beta = Kv Ip T^2 / (2C). These two numbers fully
/// determine the dynamics of the pulse-width map.
struct ReducedParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// s = tau / T, w = T (omega_free + Kv v) - 1.
struct ReducedState {
  double s = 0.0;
  double w = 0.0;
  long k = 0;
};

struct ReducedOverload {
  OverloadCondition condition;
  ReducedState state;
  double margin;  ///< T Kv times the dimensional margin
};

struct ReducedFault {
  double w;
};

using ReducedOutcome = std::variant<ReducedState, ReducedOverload, ReducedFault>;

std::pair<ReducedParams, ReducedState> to_reduced(const LoopParameters& p, const PllState& st);

/// Canonical dimensional representative: T = R2 = Ip = 1, Kv = alpha,
/// C = alpha / (2 beta), omega_free = 0.
std::pair<LoopParameters, PllState> from_reduced(const ReducedParams& rp, const ReducedState& rs);

ReducedParams reduced_params_from_gains(const NormalizedGains& g);
NormalizedGains gains_from_reduced(const ReducedParams& rp);

/// The corrected map written in (s, w); commutes with to_reduced.
ReducedOutcome reduced_step(const ReducedParams& rp, const ReducedState& rs);

}  // namespace cppll
