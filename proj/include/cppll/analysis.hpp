#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cppll/core.hpp"
#include "cppll/corrected_map.hpp"
#include "cppll/normalized_map.hpp"
#include "cppll/oracle.hpp"

namespace cppll::analysis {

enum class Verdict { kLocked, kSlipping, kOverloaded, kFrequencyFault, kUndecided };

const char* to_string(Verdict v);

struct CellVerdict {
  Verdict verdict = Verdict::kUndecided;
  std::size_t steps_used = 0;
  /// A cycle slip was seen somewhere along the trajectory.
  bool slipped = false;
};

/// Consecutive successors with |tau| / T < eps_lock required to call lock.
inline constexpr int kLockConfirmSteps = 5;
inline constexpr double kDefaultEpsLock = 1e-6;

/// Case-2 trial value (1 - S_lk) / (omega_free + Kv v) - T for a state that
/// ended with a DOWN pulse. With omega_free = 0 this is the original case-2
/// formula.
double slip_trial_tau(const LoopParameters& p, const PllState& st);

/// The VCO emitted extra edges during the DOWN pulse that ended at `st`.
bool is_slip(const LoopParameters& p, const PllState& st);

/// Locked beats everything once confirmed; otherwise an overload or frequency
/// fault ends the run; otherwise slipping if any slip was seen, else undecided.
CellVerdict classify(const LoopParameters& p, const PllState& st0, std::size_t steps,
                     double eps_lock = kDefaultEpsLock);

enum class Plane { kFnZeta, kAlphaBeta };

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct SweepSpec {
  Plane plane = Plane::kFnZeta;
  Axis axis1;
  Axis axis2;
  std::size_t steps = 500;
  double eps_lock = kDefaultEpsLock;
  ReducedState initial{0.0, 0.1, 0};
};

void validate(const SweepSpec& spec);

struct SweepCell {
  double x1 = 0.0;
  double x2 = 0.0;
  CellVerdict verdict;
  bool inside_allowed = false;
  /// Locked although outside the analytic allowed area.
  bool disagreement = false;
};

struct SweepGrid {
  SweepSpec spec;
  /// Row-major with axis1 as the outer index.
  std::vector<SweepCell> cells;

  std::size_t count(Verdict v) const;
  std::size_t disagreements() const;
};

/// Loop parameters and initial state evaluated for one grid point.
std::pair<LoopParameters, PllState> cell_problem(const SweepSpec& spec, double x1, double x2);

/// `threads` == 0 uses the hardware concurrency. The result does not depend
/// on the thread count.
SweepGrid sweep(const SweepSpec& spec, unsigned threads = 0);

/// Header "axis1,axis2,verdict,steps_used".
void write_grid_csv(std::ostream& os, const SweepGrid& grid);
/// Disagreement cells only, header "axis1,axis2,verdict,steps_used,phase_bound,damping_bound".
void write_findings_csv(std::ostream& os, const SweepGrid& grid);

struct ModelPoint {
  double tau = 0.0;
  double v = 0.0;
};

struct ComparisonRow {
  long k = 0;
  std::optional<ModelPoint> corrected;
  std::optional<ModelPoint> oracle;
  std::optional<ModelPoint> original;
  std::string flags;
};

struct ModelSelection {
  bool corrected = true;
  bool oracle = true;
  bool original = true;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  // corrected map vs oracle, over rows where both are present
  double max_abs_dtau = 0.0;
  double max_abs_dv = 0.0;
  /// max |dtau| / max |tau_corrected|
  double max_rel_dtau = 0.0;
  /// max |dv| / max |v_corrected|
  double max_rel_dv = 0.0;
  std::size_t oracle_compared = 0;
  // original one-step predictions vs corrected map
  double max_abs_dtau_original = 0.0;
  double max_abs_dv_original = 0.0;
  std::size_t original_applicable = 0;
  std::string corrected_termination;
  std::string oracle_termination;
};

/// Rows k = 1..steps, stopping at the first model that terminates. The
/// original model is evaluated one step at a time from the corrected state,
/// so its column is filled only where one of its quoted cases applies.
ComparisonReport compare_models(const LoopParameters& p, const PllState& st0, std::size_t steps,
                                ModelSelection models = {});

/// Header "k,tau_corrected,v_corrected,tau_oracle,v_oracle,tau_original,v_original,flags".
void write_comparison_csv(std::ostream& os, const ComparisonReport& report);

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double x);

}  // namespace cppll::analysis
