#pragma once
// One-call simulation driver: configuration in, statistics out. Also hosts
// the comparison and parameter sweep helpers behind the CLI subcommands.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rowsim/config.hpp"
#include "rowsim/report.hpp"

namespace rowsim {

struct RunResult {
  SimStats stats;
  SystemStats system;
  Timeline timeline;
};

/// Builds the configured workload and executes it through the system layer
/// and the controller. Throws ConfigError when the configuration does not
/// validate.
RunResult run_simulation(const SimConfig& cfg);

/// Same, but over an already built record stream.
RunResult run_simulation(const SimConfig& cfg, std::span<const TraceRecord> records);

/// Side-by-side metrics for one operation class. Factors divide base by
/// variant, so values above one mean the variant improved; a factor of zero
/// stands in when the variant measured zero.
struct ClassDelta {
  std::uint64_t base_requests = 0;
  std::uint64_t variant_requests = 0;
  double base_mean_latency_ns = 0.0;
  double variant_mean_latency_ns = 0.0;
  double base_energy_nj = 0.0;
  double variant_energy_nj = 0.0;
  std::uint64_t base_channel_bytes = 0;
  std::uint64_t variant_channel_bytes = 0;

  double latency_factor() const;
  double energy_factor() const;
  double channel_factor() const;
};

struct Comparison {
  RunResult base;
  RunResult variant;
  std::map<OpClass, ClassDelta> by_class;

  double makespan_factor() const;
  double energy_factor() const;
  double channel_factor() const;
};

/// Runs the same workload under both configurations and pairs up the
/// results. The configurations must agree on everything except the feature
/// flags and the scheduling policy, so the request streams match.
Comparison compare_runs(const SimConfig& base_cfg, const SimConfig& variant_cfg);

std::string comparison_table(const Comparison& c);
std::string comparison_json(const Comparison& c);

struct SweepAxis {
  std::string key;                  ///< dotted config key, e.g. features.rowclone
  std::vector<std::string> values;  ///< JSON literals or bare strings
};

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> overrides;
  SimStats stats;
};

/// Runs the cartesian product of the axis values, first axis slowest. Points
/// run concurrently; results come back in product order.
std::vector<SweepPoint> sweep(const SimConfig& base, const std::vector<SweepAxis>& axes);

std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string sweep_json(const std::vector<SweepPoint>& points);
std::string sweep_table(const std::vector<SweepPoint>& points);

}  // namespace rowsim
