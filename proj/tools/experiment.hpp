#pragma once

#include "wpcn/channel.hpp"
#include "wpcn/system.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpcn::experiment {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { kFixture, kRandom };
enum class Method { kOptimal, kZfSub1, kZfSub2, kRandomBeam };
enum class SweepKind { kNone, kTau, kDistance, kAntennas };

struct Sweep {
  SweepKind kind = SweepKind::kNone;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kFixture;
  int antennas = 6;
  int users = 4;
  SystemParams system;
  ChannelModelConfig channel;
  Method method = Method::kOptimal;
  std::optional<double> tau;
  Sweep sweep;
  std::vector<std::uint64_t> seeds{1};
  std::string output_path;
  double grid_step = 0.01;
  nlohmann::json source;  // the parsed document, used for the config hash
};

/// Throws ConfigError naming the offending line (syntax) or field (schema).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string method_name(Method m);
std::string scenario_name(Scenario s);

struct Record {
  std::string scenario_id;
  std::string method;
  int antennas = 0;
  int users = 0;
  double tau = 0.0;
  double rate = 0.0;
  double gamma = 0.0;
  int k_star = 0;  // 1-based, 0 when not reported
  std::vector<double> powers;
  std::vector<double> budgets;
  int iterations = 0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> rho_trace;
  std::string scheme = "sdma";
  bool ok = true;
  std::string error;

  bool operator==(const Record&) const = default;
};

struct Report {
  std::vector<Record> records;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;

  bool operator==(const Report&) const = default;
  bool all_failed() const;
};

/// Single point (or one per seed); rejects configs that carry a sweep.
Report run_scenario(const ExperimentConfig& cfg, int workers = 1);
/// One record per (sweep value, seed), ordered by sweep value then seed.
Report run_sweep(const ExperimentConfig& cfg, int workers = 1);

/// Fixture, optimal method, tau = 0.5.
ExperimentConfig table1_config();

std::string config_hash(const nlohmann::json& doc);
/// 12 significant digits.
std::string format_number(double v);
double round_sig12(double v);

void write_csv(std::ostream& out, const Report& report, int users);
nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

enum class Format { kCsv, kJson };
/// Writes to `path`, or to stdout when empty. Throws std::runtime_error
/// naming the path on I/O failure.
void emit_report(const Report& report, int users, Format format, const std::string& path);

}  // namespace wpcn::experiment
