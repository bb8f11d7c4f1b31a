#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cppll/core.hpp"
#include "cppll/original_model.hpp"

namespace cppll::cli {

// Exit codes of the cppll tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOutside = 1;       // check: outside the allowed area
inline constexpr int kExitOverloaded = 2;    // simulate: VCO overload or frequency fault
inline constexpr int kExitOriginalFailed = 3;
inline constexpr int kExitUsage = 64;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat JSON run configuration. Unknown keys are rejected.
struct RunConfig {
  LoopParameters params;
  std::optional<double> tau0;
  std::optional<double> v0;
  std::string model = "corrected";
  std::size_t steps = 100;
  std::optional<double> max_time;
  std::string out;
  std::string format = "csv";
  original::HistoryMode history = original::HistoryMode::kStrict;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// "MIN:MAX:COUNT"
struct AxisSpec {
  double min;
  double max;
  std::size_t count;
};
AxisSpec parse_axis(const std::string& text);

/// Thread cap from CPPLL_THREADS, or 0 when unset.
unsigned threads_from_env();

/// Entry point of the cppll tool; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cppll::cli
