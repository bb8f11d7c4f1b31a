#include "cppll/original_model.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace cppll::original {

double case1_discriminant(const LoopParameters& p, const PllState& st) {
  double lin = p.ip * p.r2 + st.v;
  return lin * lin - 2.0 * p.slew() * (st.v * (p.t_ref - st.tau) - 1.0 / p.kv);
}

double case2_tau(const LoopParameters& p, const PllState& st) {
  double num = 1.0 / p.kv - p.ip * p.r2 * st.tau - p.ip * st.tau * st.tau / (2.0 * p.c);
  return num / st.v - p.t_ref + st.tau;
}

namespace {

StepResult run_case1(const LoopParameters& p, const PllState& st) {
  StepResult r;
  r.case_used = 1;
  double disc = case1_discriminant(p, st);
  if (disc < 0.0) {
    r.outcome = Failure{NegativeDiscriminant{1, disc}};
    return r;
  }
  // Root of (Ip/2C) x^2 + (Ip R2 + v) x + (v (T - tau) - 1/Kv) = 0, evaluated
  // without cancellation; algebraically the printed "+" root.
  double a = p.slew() / 2.0;
  double b = p.ip * p.r2 + st.v;
  double q = st.v * (p.t_ref - st.tau) - 1.0 / p.kv;
  double s = std::sqrt(disc);
  double tau_next = b > 0.0 ? (-2.0 * q) / (b + s) : (-b + s) / (2.0 * a);
  if (tau_next < 0.0 || tau_next > p.t_ref) {
    r.outcome = Failure{UnsupportedCase{"3-5", tau_next}};
    return r;
  }
  r.outcome = PllState{tau_next, st.v + p.slew() * tau_next, st.k + 1};
  return r;
}

StepResult run_case6(const LoopParameters& p, const PllState& st, double v0, StepResult r) {
  r.case_used = 6;
  Case6Trace trace;
  trace.vs.push_back(v0);
  double target = std::abs(st.tau);
  double v = v0;
  double drop = p.ip * p.r2;
  double floor_term = 2.0 * p.slew() / p.kv;
  while (trace.partial_sum <= target) {
    double lin = v - drop;
    double disc = lin * lin - floor_term;
    if (disc < 0.0) {
      r.outcome = Failure{NegativeDiscriminant{6, disc}};
      r.case6 = std::move(trace);
      return r;
    }
    double t = (lin - std::sqrt(disc)) / p.slew();
    v -= p.slew() * t;
    trace.ts.push_back(t);
    trace.vs.push_back(v);
    trace.partial_sum += t;
    if (!(t > 0.0)) break;
  }
  // The formulas for what follows the completed sum are not available.
  r.outcome = Failure{UnsupportedCase{"6-continuation", trace.partial_sum}};
  r.case6 = std::move(trace);
  return r;
}

}  // namespace

StepResult original_step(const LoopParameters& p, const PllState& st,
                         std::optional<double> v_prev, HistoryMode mode) {
  validate(p);
  if (p.omega_free != 0.0) throw InvalidArgument("original model requires omega_free == 0");

  if (st.tau >= 0.0) {
    if (st.tau < p.t_ref) return run_case1(p, st);
    StepResult r;
    r.outcome = Failure{UnsupportedCase{"3-5", st.tau}};
    return r;
  }

  StepResult r;
  r.case_used = 2;
  if (st.v == 0.0) {
    r.outcome = Failure{UnsupportedCase{"overload", st.tau}};
    return r;
  }
  double tau_next = case2_tau(p, st);
  r.case2_tau = tau_next;
  if (tau_next >= -p.t_ref) {
    if (tau_next > 0.0) {
      r.outcome = Failure{UnsupportedCase{"4-5", tau_next}};
    } else {
      r.outcome = PllState{tau_next, st.v + p.slew() * tau_next, st.k + 1};
    }
    return r;
  }

  // tau(k+1) < -T: cycle slip, recalculate through case 6 from v(k-1).
  double v0 = 0.0;
  if (v_prev) {
    v0 = *v_prev;
  } else {
    switch (mode) {
      case HistoryMode::kStrict:
        r.case_used = 6;
        r.outcome = Failure{UndefinedHistory{}};
        return r;
      case HistoryMode::kFootnoteFix:
        v0 = st.v - p.slew() * st.tau;
        break;
      case HistoryMode::kAssumeCurrent:
        v0 = st.v;
        break;
    }
  }
  return run_case6(p, st, v0, std::move(r));
}

OriginalTrajectory run_original(const LoopParameters& p, const PllState& st0,
                                std::size_t max_steps, HistoryMode mode) {
  OriginalTrajectory traj;
  traj.states.push_back(st0);
  std::optional<double> v_prev;
  for (std::size_t i = 0; i < max_steps; ++i) {
    const PllState cur = traj.states.back();
    auto r = original_step(p, cur, v_prev, mode);
    if (!r.ok()) {
      traj.failure = std::get<Failure>(r.outcome);
      break;
    }
    v_prev = cur.v;
    traj.states.push_back(std::get<PllState>(r.outcome));
  }
  return traj;
}

const char* kind_name(const Failure& f) {
  if (std::holds_alternative<NegativeDiscriminant>(f)) return "negative_discriminant";
  if (std::holds_alternative<UndefinedHistory>(f)) return "undefined_history";
  return "unsupported_case";
}

std::string describe(const Failure& f) {
  char buf[128];
  if (auto* nd = std::get_if<NegativeDiscriminant>(&f)) {
    std::snprintf(buf, sizeof buf, "negative_discriminant case %d, %.4f", nd->which_case,
                  nd->value);
    return buf;
  }
  if (std::holds_alternative<UndefinedHistory>(f)) {
    return "undefined_history: v(k-1) referenced at k = 0";
  }
  const auto& u = std::get<UnsupportedCase>(f);
  std::snprintf(buf, sizeof buf, "unsupported_case %s (trial tau %.6g)", u.needed, u.trial_tau);
  return buf;
}

}  // namespace cppll::original
