#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cppll/corrected_map.hpp"
#include "cppll/oracle.hpp"
#include "test_params.hpp"

using namespace cppll;
using namespace cppll::oracle;

namespace {

// Fixed-step integrator of the same circuit. Edges are detected on the time
// grid instead of solved for, so it shares no event logic with the oracle.
std::vector<Pulse> brute_force(const LoopParameters& p, const CircuitState& init, double dt,
                               std::size_t max_pulses, double max_time) {
  std::vector<Pulse> pulses;
  Pfd pfd = init.pfd;
  double v = init.v_cap;
  double theta = init.theta_vco;
  double start = init.pulse_start;
  double next_ref = init.next_ref_edge;
  for (long n = 1; pulses.size() < max_pulses; ++n) {
    double t = init.time + static_cast<double>(n) * dt;
    if (t > max_time) break;
    double i = pfd == Pfd::kUp ? p.ip : pfd == Pfd::kDown ? -p.ip : 0.0;
    double f_mid = p.omega_free + p.kv * (v + 0.5 * i / p.c * dt + p.r2 * i);
    v += i / p.c * dt;
    theta += f_mid * dt;
    bool ref = t >= next_ref;
    bool vco = theta >= 1.0;
    if (ref) {
      next_ref += p.t_ref;
      if (pfd == Pfd::kNull) {
        pfd = Pfd::kUp;
        start = t;
      } else if (pfd == Pfd::kDown) {
        pulses.push_back({start, -(t - start), v});
        pfd = Pfd::kNull;
      }
    }
    if (vco) {
      theta -= 1.0;
      if (pfd == Pfd::kNull) {
        pfd = Pfd::kDown;
        start = t;
      } else if (pfd == Pfd::kUp) {
        if (t > start) pulses.push_back({start, t - start, v});
        pfd = Pfd::kNull;
      }
    }
  }
  return pulses;
}

}  // namespace

TEST_CASE("initial circuit state") {
  auto p = testing::example1();
  auto up = init_from_discrete(p, testing::example1_state());
  CHECK(up.pfd == Pfd::kUp);
  CHECK(up.v_cap == doctest::Approx(0.875).epsilon(1e-14));

  auto down = init_from_discrete(p, testing::example2_state());
  CHECK(down.pfd == Pfd::kDown);
  CHECK(down.v_cap == doctest::Approx(1.98).epsilon(1e-14));
  CHECK(down.next_ref_edge == doctest::Approx(0.098));

  auto null = init_from_discrete(p, PllState{0.0, 0.7, 0});
  CHECK(null.pfd == Pfd::kNull);
  CHECK(null.v_cap == 0.7);
}

TEST_CASE("exact lock produces only zero-width pulses") {
  LoopParameters p = testing::comparison_set();
  Horizon h;
  h.max_time = 100.0 * p.t_ref;
  auto train = simulate(p, PllState{0.0, 2.0, 0}, h);
  CHECK(train.pulses.size() >= 99);
  for (const auto& pulse : train.pulses) CHECK(pulse.width == 0.0);
  CHECK(train.termination == oracle::Termination::kCompleted);
  CHECK_FALSE(train.initial);
}

TEST_CASE("unbounded horizon is rejected") {
  CHECK_THROWS_AS(simulate(testing::example1(), testing::example1_state(), Horizon{}),
                  InvalidArgument);
}

TEST_CASE("example 1 first pulse") {
  Horizon h;
  h.max_pulses = 1;
  auto train = simulate(testing::example1(), testing::example1_state(), h);
  REQUIRE(train.initial);
  CHECK(train.initial->width == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK(train.initial->v_end == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(train.pulses.size() == 1);
  CHECK(train.pulses[0].width == doctest::Approx(-0.0625).epsilon(1e-12));
  CHECK(train.pulses[0].v_end == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("example 2 overloads during the DOWN pulse") {
  Horizon h;
  h.max_pulses = 5;
  auto train = simulate(testing::example2(), testing::example2_state(), h);
  CHECK(train.termination == oracle::Termination::kOverloaded);
}

TEST_CASE("charge is conserved pulse to pulse") {
  auto p = testing::comparison_set();
  Horizon h;
  h.max_pulses = 200;
  auto train = simulate(p, testing::comparison_state(), h);
  REQUIRE(train.pulses.size() > 20);
  double v = testing::comparison_state().v;
  for (const auto& pulse : train.pulses) {
    v += p.slew() * pulse.width;
    CHECK(pulse.v_end == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("event log is time ordered and phase consistent") {
  auto p = testing::comparison_set();
  Horizon h;
  h.max_pulses = 100;
  std::vector<Event> events;
  simulate(p, testing::comparison_state(), h, &events);
  REQUIRE(events.size() > 100);
  for (std::size_t j = 1; j < events.size(); ++j) {
    const auto& a = events[j - 1];
    const auto& b = events[j];
    CHECK(b.time > a.time);
    double i = a.pfd == Pfd::kUp ? p.ip : a.pfd == Pfd::kDown ? -p.ip : 0.0;
    double dt = b.time - a.time;
    double f0 = p.omega_free + p.kv * a.v_f;
    double predicted = a.theta_vco + f0 * dt + 0.5 * p.kv * i / p.c * dt * dt;
    double target = b.theta_vco == 0.0 ? 1.0 : b.theta_vco;
    CHECK(std::abs(predicted - target) < 1e-9);
    CHECK(b.v_cap == doctest::Approx(a.v_cap + i / p.c * dt).epsilon(1e-9));
    CHECK(b.theta_vco >= 0.0);
    CHECK(b.theta_vco < 1.0);
  }
}

TEST_CASE("agrees with a fixed-step integrator") {
  auto p = testing::comparison_set();
  auto init = init_from_discrete(p, testing::comparison_state());
  Horizon h;
  h.max_pulses = 12;
  auto train = simulate(p, init, h);
  REQUIRE(train.pulses.size() == 12);
  const double dt = p.t_ref * 1e-6;
  auto ref = brute_force(p, init, dt, 12, train.end_time + p.t_ref);
  REQUIRE(ref.size() == 12);
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(std::abs(ref[k].start - train.pulses[k].start) < 5.0 * dt);
    CHECK(std::abs(ref[k].width - train.pulses[k].width) < 5.0 * dt);
    CHECK(std::abs(ref[k].v_end - train.pulses[k].v_end) < 5.0 * dt * p.slew());
  }
}

TEST_CASE("one pulse of the oracle equals one step of the corrected map") {
  std::mt19937_64 rng(314);
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    auto rc = testing::random_case(rng);
    auto out = step(rc.p, rc.st);
    if (!std::holds_alternative<PllState>(out)) continue;
    const auto next = std::get<PllState>(out);
    if (next.tau == 0.0) continue;

    Horizon h;
    h.max_pulses = 1;
    auto train = simulate(rc.p, rc.st, h);
    // States whose initial pulse is not realizable with positive frequency
    // (the VCO would have stalled before it) have no circuit counterpart.
    if (!train.initial || train.termination != oracle::Termination::kCompleted) continue;
    if (std::abs(train.initial->width - rc.st.tau) > 1e-9 * rc.p.t_ref) continue;
    REQUIRE(train.pulses.size() == 1);
    double scale = std::max(std::abs(next.tau), rc.p.t_ref);
    CHECK(std::abs(train.pulses[0].width - next.tau) <= 1e-9 * scale);
    CHECK(std::abs(train.pulses[0].v_end - next.v) <=
          1e-9 * std::max(std::abs(next.v), rc.p.slew() * scale));
    ++compared;
  }
  CHECK(compared > 1000);
}

TEST_CASE("example 3: positive filter output at first, overload at step 7 in both models") {
  auto p = testing::example3();
  Horizon h;
  h.max_pulses = 30;
  std::vector<Event> events;
  auto train = simulate(p, testing::example3_state(), h, &events);
  CHECK(train.termination == oracle::Termination::kOverloaded);
  CHECK(train.pulses.size() == 6);
  for (const auto& e : events) {
    if (e.time > 0.2) break;
    CHECK(e.v_f > 0.0);
  }
  auto traj = run_trajectory(p, testing::example3_state(), 30);
  CHECK(traj.termination == cppll::Termination::kOverloaded);
  CHECK(traj.states.size() == 8);
}
