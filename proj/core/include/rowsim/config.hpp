#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rowsim/address_map.hpp"
#include "rowsim/cache.hpp"
#include "rowsim/controller.hpp"
#include "rowsim/energy.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/trace.hpp"

namespace rowsim {

struct WorkloadConfig {
  enum class Kind : std::uint8_t { Trace, Forkbench, Bulkzero };
  Kind kind = Kind::Trace;
  std::string trace_path;
  ForkbenchParams forkbench;
  BulkzeroParams bulkzero;
};

const char* to_string(WorkloadConfig::Kind k);

/// Full simulation setup. Timing values live in integer picoseconds
/// internally; the JSON form states them in nanoseconds.
struct SimConfig {
  Geometry geometry;
  Timing timing;
  PowerParams power;
  AddressMapping mapping;
  SchedulingPolicy policy = SchedulingPolicy::FrFcfs;
  MechanismFlags flags;
  bool zi = true;
  bool cache_enabled = true;
  CacheConfig cache;
  WorkloadConfig workload;
  std::uint64_t seed = 1;
  double inter_arrival_ns = 1.0;  ///< arrival gap for untimed trace records
};

SimConfig default_config();

/// All violated invariants, empty when the configuration is usable. Checks
/// geometry, timing, power and cache invariants plus the cross-field rules:
/// the cache line must match the geometry cacheline and zi needs both
/// rowclone and the cache.
std::vector<ValidationIssue> validate_config(const SimConfig& cfg);

/// Parses a JSON config. Missing keys keep their defaults; unknown keys are
/// rejected. Throws ConfigError.
SimConfig config_from_json(std::string_view text);

/// Deterministic JSON rendering; parsing it back yields the same config.
std::string config_to_json(const SimConfig& cfg);

SimConfig load_config(const std::string& path);
void save_config(const SimConfig& cfg, const std::string& path);

/// Returns a copy of `cfg` with one dotted key overridden, e.g.
/// ("features.rowclone", "false") or ("timing_ns.tRCD", "13.125"). The key
/// uses the JSON field names. Throws ConfigError for unknown keys or bad
/// values.
SimConfig override_config(const SimConfig& cfg, const std::string& key,
                          const std::string& value);

/// Builds the workload records a config describes: loads the trace file or
/// runs the named generator. Generator page and line sizes follow the
/// geometry.
std::vector<TraceRecord> build_workload(const SimConfig& cfg);

}  // namespace rowsim
