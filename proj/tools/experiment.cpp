#include "experiment.hpp"

#include "wpcn/errors.hpp"
#include "wpcn/joint.hpp"
#include "wpcn/tdma.hpp"
#include "wpcn/zero_forcing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef WPCN_VERSION
#define WPCN_VERSION "0.0.0"
#endif

namespace wpcn::experiment {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) field_error(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) field_error(join(path, key), "unknown key");
  }
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(join(path, key), "expected a finite number");
  return d;
}

int integer(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) field_error(join(path, key), "expected an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_string()) field_error(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_array()) field_error(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) field_error(join(path, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// Either `<key>_w` or `<key>_dbm`, not both.
std::optional<double> watts(const json& obj, const std::string& key, const std::string& path) {
  const bool lin = obj.contains(key + "_w");
  const bool log = obj.contains(key + "_dbm");
  if (lin && log) field_error(join(path, key + "_dbm"), "conflicts with " + key + "_w");
  if (lin) return number(obj, key + "_w", path);
  if (log) return dbm_to_watts(number(obj, key + "_dbm", path));
  return std::nullopt;
}

void parse_system(const json& obj, ExperimentConfig& cfg) {
  const std::string path = "system";
  check_keys(obj, path,
             {"p_sum_w", "p_sum_dbm", "noise_w", "noise_dbm", "efficiency", "circuit_energy_j"});
  if (auto p = watts(obj, "p_sum", path)) cfg.system.p_sum = *p;
  if (auto n = watts(obj, "noise", path)) cfg.system.noise_power = *n;
  if (obj.contains("efficiency")) cfg.system.efficiency = number(obj, "efficiency", path);
  if (obj.contains("circuit_energy_j")) {
    const std::vector<double> e = numbers(obj, "circuit_energy_j", path);
    cfg.system.circuit_energy = Eigen::Map<const RealVector>(e.data(), static_cast<Eigen::Index>(e.size()));
  }
}

void parse_channel(const json& obj, ExperimentConfig& cfg) {
  const std::string path = "channel";
  check_keys(obj, path,
             {"ref_loss", "ref_loss_db", "ref_distance_m", "path_loss_exponent", "rician_factor",
              "spacing_over_wavelength", "user_angles_deg", "user_distances_m"});
  ChannelModelConfig& c = cfg.channel;
  if (obj.contains("ref_loss") && obj.contains("ref_loss_db")) {
    field_error("channel.ref_loss_db", "conflicts with ref_loss");
  }
  if (obj.contains("ref_loss")) c.ref_loss = number(obj, "ref_loss", path);
  if (obj.contains("ref_loss_db")) c.ref_loss = std::pow(10.0, number(obj, "ref_loss_db", path) / 10.0);
  if (obj.contains("ref_distance_m")) c.ref_distance = number(obj, "ref_distance_m", path);
  if (obj.contains("path_loss_exponent")) {
    c.path_loss_exponent = number(obj, "path_loss_exponent", path);
  }
  if (obj.contains("rician_factor")) c.rician_factor = number(obj, "rician_factor", path);
  if (obj.contains("spacing_over_wavelength")) {
    c.spacing_over_wavelength = number(obj, "spacing_over_wavelength", path);
  }
  if (obj.contains("user_angles_deg")) {
    c.user_angles.clear();
    for (double deg : numbers(obj, "user_angles_deg", path)) {
      c.user_angles.push_back(deg * std::numbers::pi / 180.0);
    }
  }
  if (obj.contains("user_distances_m")) c.user_distances = numbers(obj, "user_distances_m", path);
}

void parse_sweep(const json& obj, ExperimentConfig& cfg) {
  const std::string path = "sweep";
  check_keys(obj, path, {"kind", "start", "stop", "step"});
  for (const char* key : {"kind", "start", "stop", "step"}) {
    if (!obj.contains(key)) field_error(join(path, key), "missing");
  }
  const std::string kind = text(obj, "kind", path);
  if (kind == "tau") {
    cfg.sweep.kind = SweepKind::kTau;
  } else if (kind == "distance") {
    cfg.sweep.kind = SweepKind::kDistance;
  } else if (kind == "antennas") {
    cfg.sweep.kind = SweepKind::kAntennas;
  } else {
    field_error("sweep.kind", "expected tau, distance or antennas");
  }
  cfg.sweep.start = number(obj, "start", path);
  cfg.sweep.stop = number(obj, "stop", path);
  cfg.sweep.step = number(obj, "step", path);
  if (!(cfg.sweep.step > 0.0)) field_error("sweep.step", "must be positive");
  for (double v : cfg.sweep.values()) {
    switch (cfg.sweep.kind) {
      case SweepKind::kTau:
        if (!(v > 0.0 && v < 1.0)) field_error("sweep", "tau values must lie in (0, 1)");
        break;
      case SweepKind::kDistance:
        if (!(v > 0.0)) field_error("sweep", "distances must be positive");
        break;
      case SweepKind::kAntennas:
        if (v < 1.0 || v > cfg.antennas || v != std::floor(v)) {
          field_error("sweep", "antenna counts must be integers in [1, M]");
        }
        break;
      case SweepKind::kNone:
        break;
    }
  }
}

std::uint64_t beam_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

struct Point {
  double value = std::numeric_limits<double>::quiet_NaN();  // sweep coordinate
  std::uint64_t seed = 0;
};

Record make_record(const JointSolution& sol, int antennas, int users) {
  Record r;
  r.antennas = antennas;
  r.users = users;
  r.tau = round_sig12(sol.tau);
  r.rate = round_sig12(sol.rate);
  r.gamma = round_sig12(sol.gamma);
  r.k_star = sol.k_star + 1;
  for (Eigen::Index k = 0; k < sol.powers.watts.size(); ++k) {
    r.powers.push_back(round_sig12(sol.powers.watts[k]));
    r.budgets.push_back(round_sig12(sol.budgets[k]));
  }
  r.iterations = sol.iterations;
  for (double rho : sol.rho_trace) r.rho_trace.push_back(round_sig12(rho));
  r.scheme = sol.scheme == AccessScheme::kSdma ? "sdma" : "tdma-reference";
  return r;
}

std::string scenario_id(const ExperimentConfig& cfg, const Point& pt) {
  std::string id = scenario_name(cfg.scenario) + "-s" + std::to_string(pt.seed);
  switch (cfg.sweep.kind) {
    case SweepKind::kTau:
      id += "/tau=" + format_number(pt.value);
      break;
    case SweepKind::kDistance:
      id += "/d=" + format_number(pt.value);
      break;
    case SweepKind::kAntennas:
      id += "/M=" + format_number(pt.value);
      break;
    case SweepKind::kNone:
      break;
  }
  return id;
}

Record evaluate(const ExperimentConfig& cfg, const Point& pt, int inner_workers) {
  const auto start = std::chrono::steady_clock::now();
  Record rec;
  rec.scenario_id = scenario_id(cfg, pt);
  rec.method = method_name(cfg.method);
  rec.seed = pt.seed;
  rec.users = cfg.users;

  int m = cfg.antennas;
  std::optional<double> tau = cfg.tau;
  ChannelModelConfig cc = cfg.channel;
  cc.seed = pt.seed;
  switch (cfg.sweep.kind) {
    case SweepKind::kTau:
      tau = pt.value;
      break;
    case SweepKind::kDistance:
      cc.user_distances.assign(static_cast<std::size_t>(cfg.users), pt.value);
      break;
    case SweepKind::kAntennas:
      m = static_cast<int>(pt.value);
      break;
    case SweepKind::kNone:
      break;
  }
  rec.antennas = m;

  try {
    const ChannelSet full = cfg.scenario == Scenario::kFixture ? fixture_channels()
                                                               : sample_channels(cfg.antennas, cc);
    const ChannelSet ch = full.first_antennas(m);
    const SystemParams& prm = cfg.system;
    JointSolution sol;
    switch (cfg.method) {
      case Method::kOptimal:
        if (tau) {
          sol = m == 1 ? tdma_at_tau(*tau, ch, prm) : solve_fixed_tau(*tau, ch, prm);
        } else {
          SweepOptions so;
          so.grid_step = cfg.grid_step;
          so.workers = inner_workers;
          sol = solve_optimal(ch, prm, so);
        }
        break;
      case Method::kZfSub1:
        sol = tau ? suboptimal1_at_tau(*tau, ch, prm) : suboptimal1(ch, prm);
        break;
      case Method::kZfSub2:
        sol = tau ? zf_fixed_beam_at_tau(*tau, suboptimal2_beam(ch, prm), ch, prm)
                  : suboptimal2(ch, prm);
        break;
      case Method::kRandomBeam: {
        const EnergyCovariance s = random_beam(ch, prm, beam_seed(pt.seed));
        sol = tau ? zf_fixed_beam_at_tau(*tau, s, ch, prm) : zf_fixed_beam(s, ch, prm);
        break;
      }
    }
    const ValidationReport check = validate_solution(sol, ch, prm);
    Record filled = make_record(sol, m, cfg.users);
    filled.scenario_id = rec.scenario_id;
    filled.method = rec.method;
    filled.seed = rec.seed;
    rec = std::move(filled);
    if (!check.ok()) {
      rec.ok = false;
      rec.error = "constraint violated: " + check.violations.front().constraint;
    }
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
  rec.runtime_ms = round_sig12(elapsed.count());
  return rec;
}

Report run_points(const ExperimentConfig& cfg, const std::vector<Point>& points, int workers) {
  Report report;
  report.config_hash = config_hash(cfg.source);
  report.seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  report.version = WPCN_VERSION;
  report.records.resize(points.size());
  const int n = static_cast<int>(points.size());
  const int inner = n == 1 ? std::max(1, workers) : 1;
  parallel_for(n, workers, [&](int i) { report.records[i] = evaluate(cfg, points[i], inner); });
  return report;
}

}  // namespace

std::vector<double> Sweep::values() const {
  std::vector<double> out;
  if (kind == SweepKind::kNone || !(step > 0.0) || stop < start) return out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) out.push_back(round_sig12(start + static_cast<double>(i) * step));
  return out;
}

ExperimentConfig parse_config(const std::string& content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, content.size());
    const auto line = 1 + std::count(content.begin(), content.begin() + static_cast<long>(byte), '\n');
    throw ConfigError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }

  ExperimentConfig cfg;
  check_keys(doc, "",
             {"scenario", "M", "K", "system", "channel", "method", "tau", "sweep", "seeds",
              "output_path", "grid_step"});
  if (doc.contains("scenario")) {
    const std::string s = text(doc, "scenario", "");
    if (s == "fixture") {
      cfg.scenario = Scenario::kFixture;
    } else if (s == "random") {
      cfg.scenario = Scenario::kRandom;
    } else {
      field_error("scenario", "expected fixture or random");
    }
  }
  if (doc.contains("M")) cfg.antennas = integer(doc, "M", "");
  if (doc.contains("K")) cfg.users = integer(doc, "K", "");
  if (cfg.antennas < 1) field_error("M", "must be at least 1");
  if (cfg.users < 1) field_error("K", "must be at least 1");
  if (cfg.scenario == Scenario::kFixture) {
    const ChannelSet fx = fixture_channels();
    if (cfg.antennas > fx.antennas()) field_error("M", "fixture has 6 antennas");
    if (cfg.users != fx.users()) field_error("K", "fixture has 4 users");
  }
  if (doc.contains("system")) parse_system(doc.at("system"), cfg);
  if (doc.contains("channel")) parse_channel(doc.at("channel"), cfg);
  if (doc.contains("method")) {
    const std::string m = text(doc, "method", "");
    if (m == "optimal") {
      cfg.method = Method::kOptimal;
    } else if (m == "zf-sub1") {
      cfg.method = Method::kZfSub1;
    } else if (m == "zf-sub2") {
      cfg.method = Method::kZfSub2;
    } else if (m == "random-beam") {
      cfg.method = Method::kRandomBeam;
    } else {
      field_error("method", "expected optimal, zf-sub1, zf-sub2 or random-beam");
    }
  }
  if (doc.contains("tau")) {
    cfg.tau = number(doc, "tau", "");
    if (!(*cfg.tau > 0.0 && *cfg.tau < 1.0)) field_error("tau", "must lie in (0, 1)");
  }
  if (doc.contains("grid_step")) {
    cfg.grid_step = number(doc, "grid_step", "");
    if (!(cfg.grid_step > 0.0 && cfg.grid_step < 0.5)) field_error("grid_step", "must lie in (0, 0.5)");
  }
  if (doc.contains("seeds")) {
    const json& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) field_error("seeds", "expected a non-empty array of integers");
    cfg.seeds.clear();
    for (const json& e : s) {
      if (!e.is_number_unsigned()) field_error("seeds", "expected non-negative integers");
      cfg.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  if (doc.contains("output_path")) cfg.output_path = text(doc, "output_path", "");
  if (doc.contains("sweep")) parse_sweep(doc.at("sweep"), cfg);

  if (cfg.scenario == Scenario::kRandom) {
    auto& c = cfg.channel;
    const auto k = static_cast<std::size_t>(cfg.users);
    if (c.user_angles.empty()) {
      for (std::size_t i = 0; i < k; ++i) {
        const double deg = -60.0 + 120.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(k);
        c.user_angles.push_back(deg * std::numbers::pi / 180.0);
      }
    }
    if (c.user_distances.empty()) c.user_distances.assign(k, 2.0);
    if (c.user_angles.size() != k) field_error("channel.user_angles_deg", "needs K entries");
    if (c.user_distances.size() != k) field_error("channel.user_distances_m", "needs K entries");
    try {
      c.validate();
    } catch (const Error& e) {
      field_error("channel", e.what());
    }
  }
  try {
    cfg.system.validate(cfg.users);
  } catch (const Error& e) {
    field_error("system", e.what());
  }
  cfg.source = std::move(doc);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kOptimal:
      return "optimal";
    case Method::kZfSub1:
      return "zf-sub1";
    case Method::kZfSub2:
      return "zf-sub2";
    case Method::kRandomBeam:
      return "random-beam";
  }
  return "unknown";
}

std::string scenario_name(Scenario s) { return s == Scenario::kFixture ? "fixture" : "random"; }

bool Report::all_failed() const {
  if (records.empty()) return false;
  for (const Record& r : records) {
    if (r.ok) return false;
  }
  return true;
}

Report run_scenario(const ExperimentConfig& cfg, int workers) {
  if (cfg.sweep.kind != SweepKind::kNone) throw ConfigError("config has a sweep; use run_sweep");
  std::vector<Point> points;
  for (std::uint64_t s : cfg.seeds) points.push_back({std::numeric_limits<double>::quiet_NaN(), s});
  return run_points(cfg, points, workers);
}

Report run_sweep(const ExperimentConfig& cfg, int workers) {
  if (cfg.sweep.kind == SweepKind::kNone) throw ConfigError("config has no sweep");
  std::vector<Point> points;
  for (double v : cfg.sweep.values()) {
    for (std::uint64_t s : cfg.seeds) points.push_back({v, s});
  }
  return run_points(cfg, points, workers);
}

ExperimentConfig table1_config() {
  return parse_config(R"({"scenario": "fixture", "method": "optimal", "tau": 0.5, "seeds": [1]})");
}

std::string config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round_sig12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

void write_csv(std::ostream& out, const Report& report, int users) {
  out << "scenario_id,method,M,K,tau,rate_bps_hz,gamma,k_star";
  for (int k = 1; k <= users; ++k) out << ",p_" << k;
  for (int k = 1; k <= users; ++k) out << ",budget_" << k;
  out << ",iters,runtime_ms,seed\n";
  for (const Record& r : report.records) {
    if (!r.ok) continue;
    out << r.scenario_id << ',' << r.method << ',' << r.antennas << ',' << r.users << ','
        << format_number(r.tau) << ',' << format_number(r.rate) << ',' << format_number(r.gamma)
        << ',' << r.k_star;
    for (double p : r.powers) out << ',' << format_number(p);
    for (double b : r.budgets) out << ',' << format_number(b);
    out << ',' << r.iterations << ',' << format_number(r.runtime_ms) << ',' << r.seed << '\n';
  }
}

json to_json(const Report& report) {
  json records = json::array();
  for (const Record& r : report.records) {
    records.push_back({{"scenario_id", r.scenario_id},
                       {"method", r.method},
                       {"M", r.antennas},
                       {"K", r.users},
                       {"tau", r.tau},
                       {"rate_bps_hz", r.rate},
                       {"gamma", r.gamma},
                       {"k_star", r.k_star},
                       {"p", r.powers},
                       {"budget", r.budgets},
                       {"iters", r.iterations},
                       {"runtime_ms", r.runtime_ms},
                       {"seed", r.seed},
                       {"rho_trace", r.rho_trace},
                       {"scheme", r.scheme},
                       {"ok", r.ok},
                       {"error", r.error}});
  }
  return {{"metadata",
           {{"config_hash", report.config_hash}, {"seed", report.seed}, {"version", report.version}}},
          {"records", std::move(records)}};
}

Report report_from_json(const json& doc) {
  Report report;
  const json& meta = doc.at("metadata");
  report.config_hash = meta.at("config_hash").get<std::string>();
  report.seed = meta.at("seed").get<std::uint64_t>();
  report.version = meta.at("version").get<std::string>();
  for (const json& j : doc.at("records")) {
    Record r;
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.antennas = j.at("M").get<int>();
    r.users = j.at("K").get<int>();
    r.tau = j.at("tau").get<double>();
    r.rate = j.at("rate_bps_hz").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.k_star = j.at("k_star").get<int>();
    r.powers = j.at("p").get<std::vector<double>>();
    r.budgets = j.at("budget").get<std::vector<double>>();
    r.iterations = j.at("iters").get<int>();
    r.runtime_ms = j.at("runtime_ms").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.rho_trace = j.at("rho_trace").get<std::vector<double>>();
    r.scheme = j.at("scheme").get<std::string>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    report.records.push_back(std::move(r));
  }
  return report;
}

void emit_report(const Report& report, int users, Format format, const std::string& path) {
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw std::runtime_error("cannot write report to '" + path + "'");
  }
  std::ostream& out = path.empty() ? std::cout : file;
  if (format == Format::kCsv) {
    write_csv(out, report, users);
  } else {
    out << to_json(report).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("I/O error while writing '" + (path.empty() ? "<stdout>" : path) + "'");
}

}  // namespace wpcn::experiment
