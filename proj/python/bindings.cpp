#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "cppll/analysis.hpp"
#include "cppll/core.hpp"
#include "cppll/corrected_map.hpp"
#include "cppll/normalized_map.hpp"
#include "cppll/oracle.hpp"
#include "cppll/original_model.hpp"

namespace py = pybind11;
using namespace cppll;

namespace {

py::dict outcome_dict(const StepOutcome& out) {
  py::dict d;
  if (auto* s = std::get_if<PllState>(&out)) {
    d["kind"] = "state";
    d["state"] = *s;
  } else if (auto* o = std::get_if<Overloaded>(&out)) {
    d["kind"] = "overloaded";
    d["state"] = o->state;
    d["condition"] = to_string(o->condition);
    d["margin"] = o->margin;
  } else {
    d["kind"] = "frequency_fault";
    d["frequency"] = std::get<FrequencyFault>(out).frequency;
  }
  return d;
}

original::HistoryMode history_from(const std::string& name) {
  if (name == "strict") return original::HistoryMode::kStrict;
  if (name == "footnote") return original::HistoryMode::kFootnoteFix;
  if (name == "assume_current") return original::HistoryMode::kAssumeCurrent;
  throw InvalidArgument("history must be strict, footnote or assume_current");
}

analysis::Axis axis_from(const py::tuple& t, bool log) {
  if (t.size() != 3) throw InvalidArgument("axis must be (min, max, count)");
  return {t[0].cast<double>(), t[1].cast<double>(), t[2].cast<std::size_t>(), log};
}

py::object optional_point(const std::optional<analysis::ModelPoint>& p) {
  if (!p) return py::none();
  return py::make_tuple(p->tau, p->v);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Charge-pump PLL discrete-time models";
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<LoopParameters>(m, "LoopParameters")
      .def(py::init([](double r2, double c, double kv, double ip, double t_ref, double omega_free) {
             LoopParameters p{r2, c, kv, ip, t_ref, omega_free};
             validate(p);
             return p;
           }),
           py::arg("r2"), py::arg("c"), py::arg("kv"), py::arg("ip"), py::arg("t_ref"),
           py::arg("omega_free") = 0.0)
      .def_readonly("r2", &LoopParameters::r2)
      .def_readonly("c", &LoopParameters::c)
      .def_readonly("kv", &LoopParameters::kv)
      .def_readonly("ip", &LoopParameters::ip)
      .def_readonly("t_ref", &LoopParameters::t_ref)
      .def_readonly("omega_free", &LoopParameters::omega_free)
      .def("__repr__", [](const LoopParameters& p) {
        return "LoopParameters(r2=" + analysis::format_double(p.r2) + ", c=" + analysis::format_double(p.c) +
               ", kv=" + analysis::format_double(p.kv) + ", ip=" + analysis::format_double(p.ip) +
               ", t_ref=" + analysis::format_double(p.t_ref) +
               ", omega_free=" + analysis::format_double(p.omega_free) + ")";
      });

  py::class_<PllState>(m, "PllState")
      .def(py::init([](double tau, double v, long k) { return PllState{tau, v, k}; }), py::arg("tau"),
           py::arg("v"), py::arg("k") = 0)
      .def_readonly("tau", &PllState::tau)
      .def_readonly("v", &PllState::v)
      .def_readonly("k", &PllState::k)
      .def("__repr__", [](const PllState& s) {
        return "PllState(tau=" + analysis::format_double(s.tau) + ", v=" + analysis::format_double(s.v) +
               ", k=" + std::to_string(s.k) + ")";
      });

  py::class_<NormalizedGains>(m, "NormalizedGains")
      .def_readonly("k_n", &NormalizedGains::k_n)
      .def_readonly("tau_2n", &NormalizedGains::tau_2n)
      .def_readonly("f_n", &NormalizedGains::f_n)
      .def_readonly("zeta", &NormalizedGains::zeta);

  py::class_<AllowedArea>(m, "AllowedArea")
      .def_readonly("inside", &AllowedArea::inside)
      .def_readonly("phase_bound", &AllowedArea::phase_bound)
      .def_readonly("damping_bound", &AllowedArea::damping_bound);

  m.def("normalized_gains", &normalized_gains, py::arg("params"));
  m.def("gains_from_fn_zeta", &gains_from_fn_zeta, py::arg("f_n"), py::arg("zeta"));
  m.def("allowed_area", &allowed_area, py::arg("gains"));

  m.def("step", [](const LoopParameters& p, const PllState& st) { return outcome_dict(step(p, st)); },
        py::arg("params"), py::arg("state"),
        "One step of the corrected map. Returns a dict with 'kind' of state, overloaded or "
        "frequency_fault.");

  m.def(
      "run_trajectory",
      [](const LoopParameters& p, const PllState& st, std::size_t steps) {
        auto traj = run_trajectory(p, st, steps);
        py::dict d;
        d["states"] = traj.states;
        d["termination"] = to_string(traj.termination);
        if (auto* o = std::get_if<Overloaded>(&traj.fault)) {
          d["condition"] = to_string(o->condition);
          d["margin"] = o->margin;
        }
        return d;
      },
      py::arg("params"), py::arg("state"), py::arg("steps"));

  m.def(
      "original_step",
      [](const LoopParameters& p, const PllState& st, std::optional<double> v_prev,
         const std::string& history) {
        auto r = original::original_step(p, st, v_prev, history_from(history));
        py::dict d;
        d["case"] = r.case_used;
        d["ok"] = r.ok();
        if (r.ok()) {
          d["state"] = std::get<PllState>(r.outcome);
        } else {
          const auto& f = std::get<original::Failure>(r.outcome);
          d["failure"] = original::kind_name(f);
          d["message"] = original::describe(f);
        }
        if (r.case2_tau) d["case2_tau"] = *r.case2_tau;
        if (r.case6) {
          d["case6_t"] = r.case6->ts;
          d["case6_v"] = r.case6->vs;
        }
        return d;
      },
      py::arg("params"), py::arg("state"), py::arg("v_prev") = py::none(),
      py::arg("history") = "strict");

  py::class_<ReducedParams>(m, "ReducedParams")
      .def(py::init([](double alpha, double beta) { return ReducedParams{alpha, beta}; }), py::arg("alpha"),
           py::arg("beta"))
      .def_readonly("alpha", &ReducedParams::alpha)
      .def_readonly("beta", &ReducedParams::beta);

  py::class_<ReducedState>(m, "ReducedState")
      .def(py::init([](double s, double w, long k) { return ReducedState{s, w, k}; }), py::arg("s"),
           py::arg("w"), py::arg("k") = 0)
      .def_readonly("s", &ReducedState::s)
      .def_readonly("w", &ReducedState::w)
      .def_readonly("k", &ReducedState::k);

  m.def("to_reduced", &to_reduced, py::arg("params"), py::arg("state"));
  m.def("from_reduced", &from_reduced, py::arg("reduced_params"), py::arg("reduced_state"));
  m.def(
      "reduced_step",
      [](const ReducedParams& rp, const ReducedState& rs) {
        auto out = reduced_step(rp, rs);
        py::dict d;
        if (auto* s = std::get_if<ReducedState>(&out)) {
          d["kind"] = "state";
          d["state"] = *s;
        } else if (auto* o = std::get_if<ReducedOverload>(&out)) {
          d["kind"] = "overloaded";
          d["state"] = o->state;
          d["condition"] = to_string(o->condition);
        } else {
          d["kind"] = "frequency_fault";
        }
        return d;
      },
      py::arg("reduced_params"), py::arg("reduced_state"));

  m.def(
      "simulate_oracle",
      [](const LoopParameters& p, const PllState& st, std::optional<std::size_t> max_pulses,
         std::optional<double> max_time) {
        oracle::Horizon h;
        if (max_pulses) h.max_pulses = *max_pulses;
        if (max_time) h.max_time = *max_time;
        oracle::PulseTrain train;
        {
          py::gil_scoped_release release;
          train = oracle::simulate(p, st, h);
        }
        py::list pulses;
        for (const auto& q : train.pulses) pulses.append(py::make_tuple(q.start, q.width, q.v_end));
        py::dict d;
        d["pulses"] = pulses;
        d["termination"] = oracle::to_string(train.termination);
        d["end_time"] = train.end_time;
        return d;
      },
      py::arg("params"), py::arg("state"), py::arg("max_pulses") = py::none(),
      py::arg("max_time") = py::none(),
      "Event-driven circuit simulation. Each pulse is (start, width, v_end).");

  m.def(
      "classify",
      [](const LoopParameters& p, const PllState& st, std::size_t steps, double eps_lock) {
        auto v = analysis::classify(p, st, steps, eps_lock);
        py::dict d;
        d["verdict"] = analysis::to_string(v.verdict);
        d["steps_used"] = v.steps_used;
        d["slipped"] = v.slipped;
        return d;
      },
      py::arg("params"), py::arg("state"), py::arg("steps"),
      py::arg("eps_lock") = analysis::kDefaultEpsLock);

  m.def(
      "sweep",
      [](const std::string& plane, const py::tuple& axis1, const py::tuple& axis2, bool log,
         std::size_t steps, double eps_lock, double s0, double w0, unsigned threads) {
        analysis::SweepSpec spec;
        if (plane == "fn_zeta") {
          spec.plane = analysis::Plane::kFnZeta;
        } else if (plane == "alpha_beta") {
          spec.plane = analysis::Plane::kAlphaBeta;
        } else {
          throw InvalidArgument("plane must be fn_zeta or alpha_beta");
        }
        spec.axis1 = axis_from(axis1, log);
        spec.axis2 = axis_from(axis2, log);
        spec.steps = steps;
        spec.eps_lock = eps_lock;
        spec.initial = {s0, w0, 0};
        analysis::SweepGrid grid;
        {
          py::gil_scoped_release release;
          grid = analysis::sweep(spec, threads);
        }
        py::list cells;
        for (const auto& c : grid.cells) {
          py::dict d;
          d["x1"] = c.x1;
          d["x2"] = c.x2;
          d["verdict"] = analysis::to_string(c.verdict.verdict);
          d["steps_used"] = c.verdict.steps_used;
          d["inside_allowed"] = c.inside_allowed;
          d["disagreement"] = c.disagreement;
          cells.append(d);
        }
        return cells;
      },
      py::arg("plane"), py::arg("axis1"), py::arg("axis2"), py::arg("log") = false,
      py::arg("steps") = 500, py::arg("eps_lock") = analysis::kDefaultEpsLock, py::arg("s0") = 0.0,
      py::arg("w0") = 0.1, py::arg("threads") = 0u,
      "Classify a grid; axes are (min, max, count), axis1 is the outer index.");

  m.def(
      "compare_models",
      [](const LoopParameters& p, const PllState& st, std::size_t steps) {
        analysis::ComparisonReport rep;
        {
          py::gil_scoped_release release;
          rep = analysis::compare_models(p, st, steps);
        }
        py::list rows;
        for (const auto& r : rep.rows) {
          py::dict d;
          d["k"] = r.k;
          d["corrected"] = optional_point(r.corrected);
          d["oracle"] = optional_point(r.oracle);
          d["original"] = optional_point(r.original);
          d["flags"] = r.flags;
          rows.append(d);
        }
        py::dict d;
        d["rows"] = rows;
        d["max_rel_dtau"] = rep.max_rel_dtau;
        d["max_rel_dv"] = rep.max_rel_dv;
        d["oracle_compared"] = rep.oracle_compared;
        d["original_applicable"] = rep.original_applicable;
        d["max_abs_dtau_original"] = rep.max_abs_dtau_original;
        d["corrected_termination"] = rep.corrected_termination;
        d["oracle_termination"] = rep.oracle_termination;
        return d;
      },
      py::arg("params"), py::arg("state"), py::arg("steps"));
}
