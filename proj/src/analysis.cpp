#include "cppll/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "cppll/original_model.hpp"

namespace cppll::analysis {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kLocked: return "locked";
    case Verdict::kSlipping: return "slipping";
    case Verdict::kOverloaded: return "overloaded";
    case Verdict::kFrequencyFault: return "frequency_fault";
    case Verdict::kUndecided: return "undecided";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double slip_trial_tau(const LoopParameters& p, const PllState& st) {
  double f = p.omega_free + p.kv * st.v;
  double phase = -(f - p.ip * p.r2 * p.kv) * st.tau + p.kv * p.ip * st.tau * st.tau / (2.0 * p.c);
  return (1.0 - phase) / f - p.t_ref;
}

bool is_slip(const LoopParameters& p, const PllState& st) {
  if (!(st.tau < 0.0)) return false;
  if (!(p.omega_free + p.kv * st.v > 0.0)) return false;
  return slip_trial_tau(p, st) < -p.t_ref;
}

CellVerdict classify(const LoopParameters& p, const PllState& st0, std::size_t steps,
                     double eps_lock) {
  validate(p);
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (!(eps_lock > 0.0)) throw InvalidArgument("eps_lock must be positive");

  CellVerdict out;
  PllState cur = st0;
  int quiet = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    if (is_slip(p, cur)) out.slipped = true;
    auto next = step(p, cur);
    out.steps_used = i + 1;
    if (std::holds_alternative<Overloaded>(next)) {
      out.verdict = Verdict::kOverloaded;
      return out;
    }
    if (std::holds_alternative<FrequencyFault>(next)) {
      out.verdict = Verdict::kFrequencyFault;
      return out;
    }
    cur = std::get<PllState>(next);
    quiet = std::abs(cur.tau) / p.t_ref < eps_lock ? quiet + 1 : 0;
    if (quiet >= kLockConfirmSteps) {
      out.verdict = Verdict::kLocked;
      return out;
    }
  }
  out.verdict = out.slipped ? Verdict::kSlipping : Verdict::kUndecided;
  return out;
}

std::vector<double> Axis::values() const {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(count - 1);
    xs[i] = log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                : min + t * (max - min);
  }
  xs.front() = min;
  xs.back() = max;
  return xs;
}

void validate(const SweepSpec& spec) {
  for (const Axis* a : {&spec.axis1, &spec.axis2}) {
    if (a->count < 2) throw InvalidArgument("each sweep axis needs count >= 2");
    if (!(a->min > 0.0) || !(a->max > 0.0) || !std::isfinite(a->max)) {
      throw InvalidArgument("sweep ranges must be positive");
    }
    if (!(a->max >= a->min)) throw InvalidArgument("sweep axis max must not be below min");
  }
  if (spec.steps < 1) throw InvalidArgument("sweep steps must be at least 1");
  if (!(spec.eps_lock > 0.0)) throw InvalidArgument("eps_lock must be positive");
  if (!(spec.initial.s > -1.0) || !(spec.initial.w > -1.0)) {
    throw InvalidArgument("initial state needs s > -1 and w > -1");
  }
}

namespace {

NormalizedGains cell_gains(const SweepSpec& spec, double x1, double x2) {
  if (spec.plane == Plane::kFnZeta) return gains_from_fn_zeta(x1, x2);
  return gains_from_reduced({x1, x2});
}

SweepCell evaluate_cell(const SweepSpec& spec, double x1, double x2) {
  SweepCell cell;
  cell.x1 = x1;
  cell.x2 = x2;
  auto [p, st0] = cell_problem(spec, x1, x2);
  cell.verdict = classify(p, st0, spec.steps, spec.eps_lock);
  cell.inside_allowed = allowed_area(cell_gains(spec, x1, x2)).inside;
  cell.disagreement = cell.verdict.verdict == Verdict::kLocked && !cell.inside_allowed;
  return cell;
}

}  // namespace

std::pair<LoopParameters, PllState> cell_problem(const SweepSpec& spec, double x1, double x2) {
  ReducedParams rp = spec.plane == Plane::kFnZeta
                         ? reduced_params_from_gains(gains_from_fn_zeta(x1, x2))
                         : ReducedParams{x1, x2};
  return from_reduced(rp, spec.initial);
}

SweepGrid sweep(const SweepSpec& spec, unsigned threads) {
  validate(spec);
  const auto xs1 = spec.axis1.values();
  const auto xs2 = spec.axis2.values();
  const std::size_t total = xs1.size() * xs2.size();

  SweepGrid grid;
  grid.spec = spec;
  grid.cells.resize(total);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      grid.cells[idx] = evaluate_cell(spec, xs1[idx / xs2.size()], xs2[idx % xs2.size()]);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return grid;
}

std::size_t SweepGrid::count(Verdict v) const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [v](const SweepCell& c) { return c.verdict.verdict == v; }));
}

std::size_t SweepGrid::disagreements() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return c.disagreement; }));
}

void write_grid_csv(std::ostream& os, const SweepGrid& grid) {
  os << "axis1,axis2,verdict,steps_used\n";
  for (const auto& c : grid.cells) {
    os << format_double(c.x1) << ',' << format_double(c.x2) << ',' << to_string(c.verdict.verdict)
       << ',' << c.verdict.steps_used << '\n';
  }
}

void write_findings_csv(std::ostream& os, const SweepGrid& grid) {
  os << "axis1,axis2,verdict,steps_used,phase_bound,damping_bound\n";
  for (const auto& c : grid.cells) {
    if (!c.disagreement) continue;
    auto area = allowed_area(cell_gains(grid.spec, c.x1, c.x2));
    os << format_double(c.x1) << ',' << format_double(c.x2) << ',' << to_string(c.verdict.verdict)
       << ',' << c.verdict.steps_used << ',' << format_double(area.phase_bound) << ','
       << format_double(area.damping_bound) << '\n';
  }
}

namespace {

void add_flag(std::string& flags, const std::string& f) {
  if (!flags.empty()) flags += ';';
  flags += f;
}

}  // namespace

ComparisonReport compare_models(const LoopParameters& p, const PllState& st0, std::size_t steps,
                                ModelSelection models) {
  validate(p);
  ComparisonReport report;
  if (steps == 0) return report;

  // The corrected trajectory also drives the original one-step predictions.
  Trajectory traj = run_trajectory(p, st0, steps);
  std::size_t end_c = traj.states.size() - 1;
  if (traj.termination == Termination::kFrequencyFault) end_c += 1;
  report.corrected_termination = to_string(traj.termination);

  std::size_t end = steps;
  if (models.corrected) end = std::min(end, end_c);

  oracle::PulseTrain train;
  if (models.oracle) {
    double tau_scale = std::abs(st0.tau);
    for (const auto& s : traj.states) tau_scale = std::max(tau_scale, std::abs(s.tau));
    oracle::Horizon h;
    h.max_pulses = steps;
    h.max_time = static_cast<double>(steps + 2) * 2.0 * (p.t_ref + tau_scale);
    train = oracle::simulate(p, st0, h);
    std::size_t end_o = train.pulses.size();
    if (train.termination == oracle::Termination::kOverloaded) end_o += 1;
    end = std::min(end, end_o);
    report.oracle_termination = oracle::to_string(train.termination);
  }

  double tau_scale = 0.0;
  double v_scale = 0.0;
  for (std::size_t k = 1; k <= end; ++k) {
    ComparisonRow row;
    row.k = static_cast<long>(k);
    const bool have_c = k < traj.states.size();
    if (have_c) {
      const auto& s = traj.states[k];
      row.corrected = ModelPoint{s.tau, s.v};
      if (models.corrected && k == traj.states.size() - 1 &&
          traj.termination == Termination::kOverloaded) {
        add_flag(row.flags, "corrected:overloaded");
      }
    } else if (models.corrected) {
      add_flag(row.flags, std::string("corrected:") + to_string(traj.termination));
    }
    if (models.oracle) {
      if (k <= train.pulses.size()) {
        const auto& pulse = train.pulses[k - 1];
        row.oracle = ModelPoint{pulse.width, pulse.v_end};
      } else {
        add_flag(row.flags, std::string("oracle:") + oracle::to_string(train.termination));
      }
    }
    if (k - 1 < traj.states.size()) {
      const auto& prev = traj.states[k - 1];
      if (is_slip(p, prev)) add_flag(row.flags, "slip");
      if (models.original && p.omega_free == 0.0) {
        std::optional<double> v_prev;
        if (k >= 2) v_prev = traj.states[k - 2].v;
        auto r = original::original_step(p, prev, v_prev, original::HistoryMode::kFootnoteFix);
        if (r.ok()) {
          const auto& s = std::get<PllState>(r.outcome);
          row.original = ModelPoint{s.tau, s.v};
        } else {
          const auto& f = std::get<original::Failure>(r.outcome);
          std::string tag = std::string("original:") + original::kind_name(f);
          if (auto* nd = std::get_if<original::NegativeDiscriminant>(&f)) {
            tag += "_case" + std::to_string(nd->which_case);
          }
          add_flag(row.flags, tag);
        }
      }
    }

    if (row.corrected && row.oracle) {
      report.oracle_compared += 1;
      report.max_abs_dtau =
          std::max(report.max_abs_dtau, std::abs(row.corrected->tau - row.oracle->tau));
      report.max_abs_dv = std::max(report.max_abs_dv, std::abs(row.corrected->v - row.oracle->v));
      tau_scale = std::max(tau_scale, std::abs(row.corrected->tau));
      v_scale = std::max(v_scale, std::abs(row.corrected->v));
    }
    if (row.corrected && row.original) {
      report.original_applicable += 1;
      report.max_abs_dtau_original =
          std::max(report.max_abs_dtau_original, std::abs(row.corrected->tau - row.original->tau));
      report.max_abs_dv_original =
          std::max(report.max_abs_dv_original, std::abs(row.corrected->v - row.original->v));
    }
    if (!models.corrected) row.corrected.reset();
    report.rows.push_back(std::move(row));
  }
  if (tau_scale > 0.0) report.max_rel_dtau = report.max_abs_dtau / tau_scale;
  if (v_scale > 0.0) report.max_rel_dv = report.max_abs_dv / v_scale;
  return report;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  os << "k,tau_corrected,v_corrected,tau_oracle,v_oracle,tau_original,v_original,flags\n";
  auto put = [&os](const std::optional<ModelPoint>& m) {
    if (m) {
      os << ',' << format_double(m->tau) << ',' << format_double(m->v);
    } else {
      os << ",,";
    }
  };
  for (const auto& row : report.rows) {
    os << row.k;
    put(row.corrected);
    put(row.oracle);
    put(row.original);
    os << ',' << row.flags << '\n';
  }
}

}  // namespace cppll::analysis
