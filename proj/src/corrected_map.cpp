#include "cppll/corrected_map.hpp"

#include <cmath>
#include <stdexcept>

#include "cppll/quadratic.hpp"

namespace cppll {

namespace {

// Violations here are program bugs, not input conditions.
void ensure(bool ok, const char* what) {
  if (!ok) throw std::logic_error(what);
}

}  // namespace

AuxOutcome auxiliaries(const LoopParameters& p, const PllState& st) {
  Auxiliaries x;
  x.frequency = p.omega_free + p.kv * st.v;
  if (!(x.frequency > 0.0)) return FrequencyFault{x.frequency};

  x.a = p.kv * p.ip / (2.0 * p.c);
  x.b = x.frequency + p.kv * p.ip * p.r2;
  x.c_val = (p.t_ref - numeric::euclid_mod(st.tau, p.t_ref)) * x.frequency - 1.0;
  x.s_lk = -(p.kv * st.v - p.ip * p.r2 * p.kv + p.omega_free) * st.tau +
           p.kv * p.ip * st.tau * st.tau / (2.0 * p.c);
  x.s_la = numeric::euclid_mod(x.s_lk, 1.0);
  x.l_b = (1.0 - x.s_la) / x.frequency;
  x.d_val = x.s_la + p.t_ref * x.frequency - 1.0;
  return x;
}

Branch select_branch(const LoopParameters& p, const PllState& st, const Auxiliaries& aux) {
  if (st.tau >= 0.0) return aux.c_val <= 0.0 ? Branch::kUpAfterUp : Branch::kDownAfterUp;
  return aux.l_b <= p.t_ref ? Branch::kDownAfterDown : Branch::kUpAfterDown;
}

std::variant<std::monostate, Overloaded> check_overload(const LoopParameters& p,
                                                        const PllState& st) {
  double v_free = st.v + p.omega_free / p.kv;
  if (st.tau > 0.0) {
    double margin = v_free - p.slew() * st.tau;
    if (margin < 0.0) return Overloaded{OverloadCondition::kPositiveTau, st, margin};
  } else if (st.tau < 0.0) {
    double margin = v_free - p.ip * p.r2;
    if (margin < 0.0) return Overloaded{OverloadCondition::kNegativeTau, st, margin};
  }
  return std::monostate{};
}

StepOutcome step(const LoopParameters& p, const PllState& st) {
  if (!(st.tau > -p.t_ref)) throw InvalidArgument("tau must exceed -T");
  auto aux_or = auxiliaries(p, st);
  if (auto* fault = std::get_if<FrequencyFault>(&aux_or)) return *fault;
  const auto& aux = std::get<Auxiliaries>(aux_or);

  double tau_next = 0.0;
  switch (select_branch(p, st, aux)) {
    case Branch::kUpAfterUp: {
      double disc = aux.b * aux.b - 4.0 * aux.a * aux.c_val;
      ensure(disc >= aux.b * aux.b, "negative discriminant after an UP pulse");
      tau_next = numeric::nonnegative_root(aux.a, aux.b, aux.c_val, disc);
      break;
    }
    case Branch::kDownAfterUp:
      tau_next = 1.0 / aux.frequency - p.t_ref + numeric::euclid_mod(st.tau, p.t_ref);
      break;
    case Branch::kDownAfterDown:
      tau_next = aux.l_b - p.t_ref;
      break;
    case Branch::kUpAfterDown: {
      ensure(aux.d_val < 0.0, "d must be negative when l_b > T");
      double disc = aux.b * aux.b - 4.0 * aux.a * aux.d_val;
      ensure(disc >= aux.b * aux.b, "negative discriminant after a DOWN pulse");
      tau_next = numeric::nonnegative_root(aux.a, aux.b, aux.d_val, disc);
      break;
    }
  }

  PllState next{tau_next, st.v + p.slew() * tau_next, st.k + 1};
  if (auto over = check_overload(p, next); std::holds_alternative<Overloaded>(over)) {
    return std::get<Overloaded>(over);
  }
  return next;
}

Trajectory run_trajectory(const LoopParameters& p, const PllState& st0, std::size_t max_steps) {
  validate(p);
  if (max_steps < 1) throw InvalidArgument("max_steps must be at least 1");
  if (!(st0.tau > -p.t_ref)) throw InvalidArgument("initial tau must exceed -T");

  Trajectory traj;
  traj.states.reserve(max_steps + 1);
  traj.states.push_back(st0);
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto out = step(p, traj.states.back());
    if (auto* next = std::get_if<PllState>(&out)) {
      traj.states.push_back(*next);
    } else if (auto* over = std::get_if<Overloaded>(&out)) {
      traj.states.push_back(over->state);
      traj.termination = Termination::kOverloaded;
      traj.fault = *over;
      break;
    } else {
      traj.termination = Termination::kFrequencyFault;
      traj.fault = std::get<FrequencyFault>(out);
      break;
    }
  }
  return traj;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kOverloaded: return "overloaded";
    case Termination::kFrequencyFault: return "frequency_fault";
  }
  return "?";
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::kUpAfterUp: return "up_after_up";
    case Branch::kDownAfterUp: return "down_after_up";
    case Branch::kDownAfterDown: return "down_after_down";
    case Branch::kUpAfterDown: return "up_after_down";
  }
  return "?";
}

const char* to_string(OverloadCondition c) {
  return c == OverloadCondition::kPositiveTau ? "positive_tau" : "negative_tau";
}

}  // namespace cppll
