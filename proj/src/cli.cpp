#include "cppll/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "cppll/analysis.hpp"
#include "cppll/corrected_map.hpp"
#include "cppll/normalized_map.hpp"
#include "cppll/oracle.hpp"

namespace cppll::cli {

using analysis::format_double;
using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {"r2",    "c",     "kv",     "ip",       "t",
                                           "omega_free", "tau0", "v0", "model", "steps",
                                           "max_time", "out", "format", "history"};

double number_field(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  return number_field(doc, key);
}

std::string string_field(const json& doc, const char* key, std::string fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

original::HistoryMode parse_history(const std::string& s) {
  if (s == "strict") return original::HistoryMode::kStrict;
  if (s == "footnote") return original::HistoryMode::kFootnoteFix;
  if (s == "assume_current") return original::HistoryMode::kAssumeCurrent;
  throw ConfigError("history must be strict, footnote or assume_current");
}

void check_model(const std::string& m) {
  if (m != "corrected" && m != "original" && m != "reduced" && m != "oracle") {
    throw ConfigError("model must be corrected, original, reduced or oracle");
  }
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw ConfigError("format must be csv or json");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!kConfigKeys.count(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");
  }
  for (const char* key : {"r2", "c", "kv", "ip", "t"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("missing config field '") + key + "'");
  }

  RunConfig cfg;
  cfg.params.r2 = number_field(doc, "r2");
  cfg.params.c = number_field(doc, "c");
  cfg.params.kv = number_field(doc, "kv");
  cfg.params.ip = number_field(doc, "ip");
  cfg.params.t_ref = number_field(doc, "t");
  cfg.params.omega_free = optional_number(doc, "omega_free").value_or(0.0);
  if (auto msg = validation_error(cfg.params); !msg.empty()) throw ConfigError(msg);

  cfg.tau0 = optional_number(doc, "tau0");
  cfg.v0 = optional_number(doc, "v0");
  cfg.max_time = optional_number(doc, "max_time");
  if (doc.contains("steps")) {
    const auto& s = doc.at("steps");
    if (!s.is_number_unsigned() || s.get<std::size_t>() < 1) {
      throw ConfigError("steps must be a positive integer");
    }
    cfg.steps = s.get<std::size_t>();
  }
  cfg.model = string_field(doc, "model", cfg.model);
  check_model(cfg.model);
  cfg.out = string_field(doc, "out", "");
  cfg.format = string_field(doc, "format", cfg.format);
  check_format(cfg.format);
  cfg.history = parse_history(string_field(doc, "history", "strict"));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

AxisSpec parse_axis(const std::string& text) {
  auto first = text.find(':');
  auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) throw ConfigError("axis must be MIN:MAX:COUNT, got '" + text + "'");
  try {
    std::size_t used = 0;
    AxisSpec a{};
    std::string lo = text.substr(0, first);
    std::string hi = text.substr(first + 1, second - first - 1);
    std::string n = text.substr(second + 1);
    a.min = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    a.max = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    long long count = std::stoll(n, &used);
    if (used != n.size() || count < 2) throw std::invalid_argument(n);
    a.count = static_cast<std::size_t>(count);
    return a;
  } catch (const std::logic_error&) {
    throw ConfigError("axis must be MIN:MAX:COUNT with COUNT >= 2, got '" + text + "'");
  }
}

unsigned threads_from_env() {
  const char* env = std::getenv("CPPLL_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) return 0;
  return static_cast<unsigned>(n);
}

namespace {

// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

PllState initial_state(const RunConfig& cfg) {
  if (!cfg.tau0 || !cfg.v0) throw ConfigError("config needs tau0 and v0 for this command");
  if (!(*cfg.tau0 > -cfg.params.t_ref)) throw ConfigError("tau0 must exceed -t");
  return {*cfg.tau0, *cfg.v0, 0};
}

struct Row {
  long k;
  double a;
  double b;
};

void write_rows(std::ostream& os, const std::string& format, const std::string& model,
                const char* col_a, const char* col_b, const std::vector<Row>& rows,
                const std::string& termination, const json& extra) {
  if (format == "json") {
    json doc = {{"model", model}, {"termination", termination}};
    json states = json::array();
    for (const auto& r : rows) states.push_back({{"k", r.k}, {col_a, r.a}, {col_b, r.b}});
    doc["states"] = std::move(states);
    for (const auto& item : extra.items()) doc[item.key()] = item.value();
    os << doc.dump(2) << '\n';
    return;
  }
  os << "k," << col_a << ',' << col_b << '\n';
  for (const auto& r : rows) os << r.k << ',' << format_double(r.a) << ',' << format_double(r.b) << '\n';
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  auto g = normalized_gains(cfg.params);
  auto area = allowed_area(g);
  const char* verdict = area.inside ? "inside" : "outside";
  if (cfg.format == "json") {
    json doc = {{"k_n", g.k_n},
                {"tau_2n", g.tau_2n},
                {"f_n", g.f_n},
                {"zeta", g.zeta},
                {"phase_bound", area.phase_bound},
                {"damping_bound", area.damping_bound},
                {"allowed_area", verdict}};
    out << doc.dump(2) << '\n';
  } else {
    out << "k_n=" << format_double(g.k_n) << '\n'
        << "tau_2n=" << format_double(g.tau_2n) << '\n'
        << "f_n=" << format_double(g.f_n) << '\n'
        << "zeta=" << format_double(g.zeta) << '\n'
        << "phase_bound=" << format_double(area.phase_bound) << '\n'
        << "damping_bound=" << format_double(area.damping_bound) << '\n'
        << "allowed_area=" << verdict << '\n';
  }
  return area.inside ? kExitOk : kExitOutside;
}

int simulate_corrected(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  auto traj = run_trajectory(cfg.params, initial_state(cfg), cfg.steps);
  std::vector<Row> rows;
  for (const auto& s : traj.states) rows.push_back({s.k, s.tau, s.v});
  json extra = json::object();
  int code = kExitOk;
  if (auto* over = std::get_if<Overloaded>(&traj.fault)) {
    extra["overload"] = {{"condition", to_string(over->condition)}, {"margin", over->margin}};
    err << "overloaded at k=" << over->state.k << " (" << to_string(over->condition)
        << " condition, margin " << format_double(over->margin) << ")\n";
    code = kExitOverloaded;
  } else if (auto* fault = std::get_if<FrequencyFault>(&traj.fault)) {
    extra["frequency"] = fault->frequency;
    err << "frequency_fault: omega_free + kv*v = " << format_double(fault->frequency) << '\n';
    code = kExitOverloaded;
  }
  write_rows(os, cfg.format, cfg.model, "tau", "v", rows, to_string(traj.termination), extra);
  return code;
}

int simulate_original(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  auto traj = original::run_original(cfg.params, initial_state(cfg), cfg.steps, cfg.history);
  std::vector<Row> rows;
  for (const auto& s : traj.states) rows.push_back({s.k, s.tau, s.v});
  json extra = json::object();
  std::string termination = "completed";
  int code = kExitOk;
  if (traj.failure) {
    termination = original::kind_name(*traj.failure);
    extra["failure"] = original::describe(*traj.failure);
    err << original::describe(*traj.failure) << '\n';
    code = kExitOriginalFailed;
  }
  write_rows(os, cfg.format, cfg.model, "tau", "v", rows, termination, extra);
  return code;
}

int simulate_reduced(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  auto [rp, rs] = to_reduced(cfg.params, initial_state(cfg));
  std::vector<Row> rows{{rs.k, rs.s, rs.w}};
  json extra = {{"alpha", rp.alpha}, {"beta", rp.beta}};
  std::string termination = "completed";
  int code = kExitOk;
  for (std::size_t i = 0; i < cfg.steps; ++i) {
    auto next = reduced_step(rp, rs);
    if (auto* s = std::get_if<ReducedState>(&next)) {
      rs = *s;
      rows.push_back({rs.k, rs.s, rs.w});
    } else if (auto* over = std::get_if<ReducedOverload>(&next)) {
      rows.push_back({over->state.k, over->state.s, over->state.w});
      termination = "overloaded";
      err << "overloaded at k=" << over->state.k << " (" << to_string(over->condition) << " condition)\n";
      code = kExitOverloaded;
      break;
    } else {
      termination = "frequency_fault";
      err << "frequency_fault: w = " << format_double(std::get<ReducedFault>(next).w) << '\n';
      code = kExitOverloaded;
      break;
    }
  }
  write_rows(os, cfg.format, cfg.model, "s", "w", rows, termination, extra);
  return code;
}

int simulate_oracle(const RunConfig& cfg, const std::string& events_path, std::ostream& os,
                    std::ostream& err) {
  const PllState st0 = initial_state(cfg);
  oracle::Horizon h;
  h.max_pulses = cfg.steps;
  h.max_time = cfg.max_time.value_or(static_cast<double>(cfg.steps + 2) * 1000.0 * cfg.params.t_ref);
  std::vector<oracle::Event> events;
  auto train = oracle::simulate(cfg.params, st0, h, events_path.empty() ? nullptr : &events);

  std::vector<Row> rows{{0, st0.tau, st0.v}};
  for (std::size_t i = 0; i < train.pulses.size(); ++i) {
    rows.push_back({static_cast<long>(i + 1), train.pulses[i].width, train.pulses[i].v_end});
  }
  json extra = {{"end_time", train.end_time}};
  write_rows(os, cfg.format, cfg.model, "tau", "v", rows, oracle::to_string(train.termination), extra);

  if (!events_path.empty()) {
    std::ofstream ev(events_path, std::ios::binary);
    if (!ev) throw ConfigError("cannot write '" + events_path + "'");
    ev << "time,pfd_state,v_cap,v_F,theta_vco\n";
    for (const auto& e : events) {
      ev << format_double(e.time) << ',' << oracle::to_string(e.pfd) << ',' << format_double(e.v_cap)
         << ',' << format_double(e.v_f) << ',' << format_double(e.theta_vco) << '\n';
    }
  }
  if (train.termination == oracle::Termination::kOverloaded) {
    err << "overloaded at t=" << format_double(train.end_time) << '\n';
    return kExitOverloaded;
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& events_path, std::ostream& out,
                 std::ostream& err) {
  Sink sink(cfg.out, out);
  if (cfg.model == "corrected") return simulate_corrected(cfg, sink.stream(), err);
  if (cfg.model == "original") return simulate_original(cfg, sink.stream(), err);
  if (cfg.model == "reduced") return simulate_reduced(cfg, sink.stream(), err);
  return simulate_oracle(cfg, events_path, sink.stream(), err);
}

analysis::ModelSelection parse_models(const std::string& list) {
  analysis::ModelSelection sel{false, false, false};
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "corrected") sel.corrected = true;
    else if (item == "oracle") sel.oracle = true;
    else if (item == "original") sel.original = true;
    else throw ConfigError("unknown model '" + item + "' in --models");
  }
  return sel;
}

int cmd_compare(const RunConfig& cfg, const std::string& models, std::ostream& out, std::ostream& err) {
  auto report = analysis::compare_models(cfg.params, initial_state(cfg), cfg.steps, parse_models(models));
  Sink sink(cfg.out, out);
  if (cfg.format == "json") {
    json rows = json::array();
    auto point = [](const std::optional<analysis::ModelPoint>& m) -> json {
      if (!m) return nullptr;
      return {{"tau", m->tau}, {"v", m->v}};
    };
    for (const auto& r : report.rows) {
      rows.push_back({{"k", r.k},
                      {"corrected", point(r.corrected)},
                      {"oracle", point(r.oracle)},
                      {"original", point(r.original)},
                      {"flags", r.flags}});
    }
    json doc = {{"rows", rows},
                {"max_abs_dtau", report.max_abs_dtau},
                {"max_abs_dv", report.max_abs_dv},
                {"max_rel_dtau", report.max_rel_dtau},
                {"max_rel_dv", report.max_rel_dv},
                {"original_applicable", report.original_applicable},
                {"max_abs_dtau_original", report.max_abs_dtau_original},
                {"max_abs_dv_original", report.max_abs_dv_original}};
    sink.stream() << doc.dump(2) << '\n';
  } else {
    analysis::write_comparison_csv(sink.stream(), report);
  }
  err << "rows=" << report.rows.size() << " max_rel_dtau=" << format_double(report.max_rel_dtau)
      << " max_rel_dv=" << format_double(report.max_rel_dv)
      << " original_applicable=" << report.original_applicable << '\n';
  return kExitOk;
}

struct SweepOptions {
  std::string fn, zeta, alpha, beta;
  bool log = false;
  std::size_t steps = 1000;
  double eps_lock = analysis::kDefaultEpsLock;
  double s0 = 0.0;
  double w0 = 0.1;
  std::string out;
  std::string findings;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const bool fz = !o.fn.empty() || !o.zeta.empty();
  const bool ab = !o.alpha.empty() || !o.beta.empty();
  if (fz == ab) throw ConfigError("sweep needs either --fn and --zeta, or --alpha and --beta");
  analysis::SweepSpec spec;
  spec.plane = fz ? analysis::Plane::kFnZeta : analysis::Plane::kAlphaBeta;
  const std::string& t1 = fz ? o.fn : o.alpha;
  const std::string& t2 = fz ? o.zeta : o.beta;
  if (t1.empty() || t2.empty()) throw ConfigError("both sweep axes are required");
  auto a1 = parse_axis(t1);
  auto a2 = parse_axis(t2);
  spec.axis1 = {a1.min, a1.max, a1.count, o.log};
  spec.axis2 = {a2.min, a2.max, a2.count, o.log};
  spec.steps = o.steps;
  spec.eps_lock = o.eps_lock;
  spec.initial = {o.s0, o.w0, 0};
  try {
    analysis::validate(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  auto grid = analysis::sweep(spec, threads_from_env());
  Sink sink(o.out, out);
  analysis::write_grid_csv(sink.stream(), grid);
  if (!o.findings.empty()) {
    std::ofstream f(o.findings, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + o.findings + "'");
    analysis::write_findings_csv(f, grid);
  }
  err << "cells=" << grid.cells.size() << " locked=" << grid.count(analysis::Verdict::kLocked)
      << " slipping=" << grid.count(analysis::Verdict::kSlipping)
      << " overloaded=" << grid.count(analysis::Verdict::kOverloaded)
      << " frequency_fault=" << grid.count(analysis::Verdict::kFrequencyFault)
      << " undecided=" << grid.count(analysis::Verdict::kUndecided)
      << " disagreements=" << grid.disagreements() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charge-pump PLL discrete-time models, circuit oracle and parameter sweeps", "cppll"};
  app.require_subcommand(1);

  std::string config_path, model, out_path, format, history, events_path, models = "corrected,oracle,original";
  std::size_t steps = 0;

  auto* check = app.add_subcommand("check", "Normalized gains and allowed-area verdict");
  check->add_option("--config", config_path, "JSON config")->required();
  check->add_option("--format", format, "csv|json (text or JSON on stdout)");

  auto* simulate = app.add_subcommand("simulate", "Iterate one model and write its trajectory");
  simulate->add_option("--config", config_path, "JSON config")->required();
  simulate->add_option("--model", model, "corrected|original|reduced|oracle");
  simulate->add_option("--steps", steps, "number of steps or pulses");
  simulate->add_option("--out", out_path, "output file (default stdout)");
  simulate->add_option("--format", format, "csv|json");
  simulate->add_option("--history", history, "strict|footnote|assume_current (original model)");
  simulate->add_option("--events", events_path, "oracle event CSV");

  auto* compare = app.add_subcommand("compare", "Step-by-step comparison of the models");
  compare->add_option("--config", config_path, "JSON config")->required();
  compare->add_option("--steps", steps, "number of steps");
  compare->add_option("--models", models, "comma list of corrected,oracle,original");
  compare->add_option("--out", out_path, "output file (default stdout)");
  compare->add_option("--format", format, "csv|json");

  SweepOptions so;
  auto* sweep = app.add_subcommand("sweep", "Classify a grid over (f_n, zeta) or (alpha, beta)");
  sweep->add_option("--fn", so.fn, "MIN:MAX:COUNT");
  sweep->add_option("--zeta", so.zeta, "MIN:MAX:COUNT");
  sweep->add_option("--alpha", so.alpha, "MIN:MAX:COUNT");
  sweep->add_option("--beta", so.beta, "MIN:MAX:COUNT");
  sweep->add_flag("--log", so.log, "logarithmic axis spacing");
  sweep->add_option("--steps", so.steps, "map iterations per cell");
  sweep->add_option("--eps-lock", so.eps_lock, "lock tolerance on |tau|/T");
  sweep->add_option("--s0", so.s0, "initial s = tau/T");
  sweep->add_option("--w0", so.w0, "initial w = T f - 1");
  sweep->add_option("--out", so.out, "grid CSV (default stdout)");
  sweep->add_option("--findings", so.findings, "CSV of locked cells outside the allowed area");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(so, out, err);

    RunConfig cfg = load_config(config_path);
    if (!model.empty()) {
      check_model(model);
      cfg.model = model;
    }
    if (steps > 0) cfg.steps = steps;
    if (!out_path.empty()) cfg.out = out_path;
    if (!format.empty()) {
      check_format(format);
      cfg.format = format;
    }
    if (!history.empty()) cfg.history = parse_history(history);

    if (*check) return cmd_check(cfg, out);
    if (*simulate) return cmd_simulate(cfg, events_path, out, err);
    return cmd_compare(cfg, models, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cppll::cli
