#include "cppll/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "cppll/quadratic.hpp"

namespace cppll::oracle {

const char* to_string(Pfd s) {
  switch (s) {
    case Pfd::kNull: return "NULL";
    case Pfd::kUp: return "UP";
    case Pfd::kDown: return "DOWN";
  }
  return "?";
}

const char* to_string(Termination t) {
  return t == Termination::kCompleted ? "completed" : "overloaded";
}

CircuitState init_from_discrete(const LoopParameters& p, const PllState& st0) {
  validate(p);
  CircuitState s;
  s.time = 0.0;
  s.pulse_start = 0.0;
  if (st0.tau > 0.0) {
    // Reference edge at t = 0 starts UP; the VCO edge must land at t = tau(0).
    s.pfd = Pfd::kUp;
    s.v_cap = st0.v - p.slew() * st0.tau;
    double f_start = p.omega_free + p.kv * (s.v_cap + p.r2 * p.ip);
    double sweep = p.kv * p.ip / p.c;
    s.theta_vco = 1.0 - (f_start * st0.tau + 0.5 * sweep * st0.tau * st0.tau);
    s.next_ref_edge = p.t_ref;
  } else if (st0.tau < 0.0) {
    // VCO edge at t = 0 starts DOWN; the reference edge ends it at |tau(0)|.
    s.pfd = Pfd::kDown;
    s.v_cap = st0.v + p.slew() * -st0.tau;
    s.theta_vco = 0.0;
    s.next_ref_edge = -st0.tau;
  } else {
    s.pfd = Pfd::kNull;
    s.v_cap = st0.v;
    s.theta_vco = 0.0;
    s.next_ref_edge = p.t_ref;
  }
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Time is kept as (index of last reference edge, offset since it) so that
// event arithmetic stays at the precision of T however long the run.
struct Clock {
  double origin;  // time of reference edge number 0
  long n;         // last reference edge processed
  double u;       // time since edge n

  double absolute(double t_ref) const { return origin + static_cast<double>(n) * t_ref + u; }
};

double pump_current(const LoopParameters& p, Pfd s) {
  switch (s) {
    case Pfd::kUp: return p.ip;
    case Pfd::kDown: return -p.ip;
    case Pfd::kNull: return 0.0;
  }
  return 0.0;
}

}  // namespace

PulseTrain simulate(const LoopParameters& p, const CircuitState& init, const Horizon& horizon,
                    std::vector<Event>* events) {
  validate(p);
  if (horizon.max_pulses == std::numeric_limits<std::size_t>::max() &&
      !std::isfinite(horizon.max_time)) {
    throw InvalidArgument("oracle horizon needs max_pulses or a finite max_time");
  }
  const double T = p.t_ref;
  const double tie = kTieFraction * T;

  Clock clock{init.next_ref_edge, -1, init.time - (init.next_ref_edge - T)};
  Pfd pfd = init.pfd;
  double v_cap = init.v_cap;
  double theta = init.theta_vco;
  Clock start = clock;
  start.u = init.pulse_start - (init.next_ref_edge - T);

  PulseTrain train;

  auto log = [&] {
    if (!events) return;
    double i = pump_current(p, pfd);
    events->push_back({clock.absolute(T), pfd, v_cap, v_cap + p.r2 * i, theta});
  };
  auto width_since_start = [&] {
    return static_cast<double>(clock.n - start.n) * T + (clock.u - start.u);
  };
  auto finish_pulse = [&](double sign) {
    double w = width_since_start();
    // Coincident edges give a zero-width pulse, the map's tau = 0 step.
    train.pulses.push_back({start.absolute(T), w > 0.0 ? sign * w : 0.0, v_cap});
  };

  log();
  while (train.pulses.size() < horizon.max_pulses) {
    const double i = pump_current(p, pfd);
    const double f0 = p.omega_free + p.kv * (v_cap + p.r2 * i);
    const double f_slope = p.kv * i / p.c;

    double du_over = kInf;
    if (f0 < 0.0 || (f0 == 0.0 && f_slope <= 0.0)) {
      du_over = 0.0;
    } else if (f_slope < 0.0) {
      du_over = -f0 / f_slope;
    }
    const double du_ref = T - clock.u;
    const double du_vco =
        theta >= 1.0 ? 0.0 : numeric::smallest_positive_root(0.5 * f_slope, f0, theta - 1.0);

    const double du_edge = std::min(du_ref, du_vco);
    const double du_limit = horizon.max_time - clock.absolute(T);
    if (du_over < du_edge && du_over <= du_limit) {
      v_cap += i / p.c * du_over;
      theta += f0 * du_over + 0.5 * f_slope * du_over * du_over;
      clock.u += du_over;
      train.termination = Termination::kOverloaded;
      log();
      break;
    }
    if (du_edge > du_limit) break;

    const bool ref_fires = du_ref <= du_vco + tie;
    const bool vco_fires = du_vco <= du_ref + tie;
    const double du = ref_fires ? du_ref : du_vco;

    v_cap += i / p.c * du;
    theta += f0 * du + 0.5 * f_slope * du * du;
    clock.u += du;

    if (ref_fires) {
      clock.n += 1;
      clock.u = 0.0;
      if (pfd == Pfd::kNull) {
        pfd = Pfd::kUp;
        start = clock;
      } else if (pfd == Pfd::kDown) {
        finish_pulse(-1.0);
        pfd = Pfd::kNull;
      }
    }
    if (vco_fires) {
      theta = 0.0;
      if (pfd == Pfd::kNull) {
        pfd = Pfd::kDown;
        start = clock;
      } else if (pfd == Pfd::kUp) {
        finish_pulse(1.0);
        pfd = Pfd::kNull;
      }
    }
    log();
  }
  train.end_time = clock.absolute(T);
  return train;
}

PulseTrain simulate(const LoopParameters& p, const PllState& init, const Horizon& horizon,
                    std::vector<Event>* events) {
  const bool has_initial = init.tau != 0.0;
  Horizon h = horizon;
  if (has_initial && h.max_pulses != std::numeric_limits<std::size_t>::max()) h.max_pulses += 1;
  PulseTrain train = simulate(p, init_from_discrete(p, init), h, events);
  if (has_initial && !train.pulses.empty()) {
    train.initial = train.pulses.front();
    train.pulses.erase(train.pulses.begin());
  }
  return train;
}

}  // namespace cppll::oracle
