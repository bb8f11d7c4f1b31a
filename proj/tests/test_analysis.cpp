#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "cppll/analysis.hpp"
#include "test_params.hpp"

using namespace cppll;
using namespace cppll::analysis;

TEST_CASE("classify") {
  SUBCASE("comparison set locks after slipping") {
    auto v = classify(testing::comparison_set(), testing::comparison_state(), 200);
    CHECK(v.verdict == Verdict::kLocked);
    CHECK(v.slipped);
    CHECK(v.steps_used < 200);
  }
  SUBCASE("example 2 overloads") {
    auto v = classify(testing::example2(), testing::example2_state(), 100);
    CHECK(v.verdict == Verdict::kOverloaded);
    CHECK(v.steps_used == 1);
    CHECK(is_slip(testing::example2(), PllState{-0.098, 1.0, 0}));
  }
  SUBCASE("exact lock is confirmed after a few steps") {
    auto v = classify(testing::comparison_set(), PllState{0.0, 2.0, 0}, 100);
    CHECK(v.verdict == Verdict::kLocked);
    CHECK(v.steps_used == static_cast<std::size_t>(kLockConfirmSteps));
    CHECK_FALSE(v.slipped);
  }
  SUBCASE("too few steps is undecided") {
    auto v = classify(testing::comparison_set(), testing::comparison_state(), 3);
    CHECK(v.verdict != Verdict::kLocked);
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(classify(testing::example1(), testing::example1_state(), 10, 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(classify(testing::example1(), testing::example1_state(), 0), InvalidArgument);
  }
}

TEST_CASE("slip trial value matches the case-2 formula") {
  auto p = testing::example2();
  CHECK(slip_trial_tau(p, testing::example2_state()) == doctest::Approx(-0.21906).epsilon(1e-12));
  CHECK_FALSE(is_slip(p, PllState{0.01, 1.0, 0}));
}

TEST_CASE("axis values") {
  Axis lin{1.0, 3.0, 3, false};
  CHECK(lin.values() == std::vector<double>{1.0, 2.0, 3.0});
  Axis lg{0.01, 1.0, 3, true};
  auto xs = lg.values();
  CHECK(xs[0] == 0.01);
  CHECK(xs[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(xs[2] == 1.0);
}

TEST_CASE("sweep cells against the allowed area") {
  SweepSpec spec;
  spec.axis1 = {0.2813, 6.0, 2, false};
  spec.axis2 = {0.0141, 0.0141, 2, false};
  spec.steps = 50;
  auto grid = sweep(spec, 1);
  REQUIRE(grid.cells.size() == 4);
  CHECK(grid.cells[0].x1 == 0.2813);
  CHECK(grid.cells[0].inside_allowed);
  CHECK_FALSE(grid.cells[2].inside_allowed);
  CHECK(grid.cells[2].x1 == 6.0);

  // The cell reproduces the analytic reduced parameters.
  auto [p, st] = cell_problem(spec, 0.2813, 0.0141);
  auto g = normalized_gains(p);
  CHECK(g.f_n == doctest::Approx(0.2813).epsilon(1e-12));
  CHECK(g.zeta == doctest::Approx(0.0141).epsilon(1e-12));
  CHECK(st.tau == 0.0);

  spec.eps_lock = 0.0;
  CHECK_THROWS_AS(sweep(spec), InvalidArgument);
}

TEST_CASE("sweep result does not depend on the thread count") {
  SweepSpec spec;
  spec.axis1 = {0.01, 1.0, 17, true};
  spec.axis2 = {0.01, 2.0, 13, true};
  spec.steps = 300;
  auto one = sweep(spec, 1);
  std::ostringstream ref;
  write_grid_csv(ref, one);
  for (unsigned t : {2u, 4u, 0u}) {
    std::ostringstream os;
    write_grid_csv(os, sweep(spec, t));
    CHECK(os.str() == ref.str());
  }
  CHECK(ref.str().rfind("axis1,axis2,verdict,steps_used\n", 0) == 0);
  CHECK(one.count(Verdict::kLocked) > 0);
  CHECK(one.count(Verdict::kOverloaded) > 0);
}

TEST_CASE("compare models on the comparison set") {
  auto rep = compare_models(testing::comparison_set(), testing::comparison_state(), 50);
  REQUIRE(rep.rows.size() == 50);
  CHECK(rep.oracle_compared == 50);
  CHECK(rep.max_rel_dtau < 1e-9);
  CHECK(rep.max_rel_dv < 1e-9);
  CHECK(rep.original_applicable > 0);
  CHECK(rep.max_abs_dtau_original < 1e-12);
  CHECK(rep.rows.front().k == 1);
  CHECK(rep.rows[1].flags.find("slip") != std::string::npos);

  std::ostringstream os;
  write_comparison_csv(os, rep);
  CHECK(os.str().rfind("k,tau_corrected,v_corrected,tau_oracle,v_oracle,tau_original,v_original,flags\n",
                       0) == 0);
}

TEST_CASE("compare stops at the first termination") {
  auto rep = compare_models(testing::example2(), testing::example2_state(), 10);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].flags.find("corrected:overloaded") != std::string::npos);
  CHECK(rep.corrected_termination == "overloaded");

  auto empty = compare_models(testing::example1(), testing::example1_state(), 0);
  CHECK(empty.rows.empty());
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, -0.0625, 1.0 / 3.0, 6.02214076e23, 5e-324}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(0.375) == "0.375");
}
