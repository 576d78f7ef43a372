#pragma once
// Aggregation of a finished timeline into per-class statistics, plus the
// renderers behind the CLI output formats.

#include <cstdint>
#include <map>
#include <string>

#include "rowsim/controller.hpp"
#include "rowsim/energy.hpp"
#include "rowsim/system.hpp"

namespace rowsim {

// One slice of the timeline, grouped by operation class.
struct ClassStats {
  std::uint64_t requests = 0;
  Time total_latency = 0;
  double energy_nj = 0.0;
  std::uint64_t channel_bytes = 0;

  double mean_latency_ns() const;
};

struct SimStats {
  Time makespan = 0;
  std::uint64_t channel_bytes = 0;
  EnergyLedger energy;
  std::map<OpClass, ClassStats> by_class;
  std::map<Mechanism, std::uint64_t> mechanism_counts;
  std::map<Origin, std::uint64_t> origin_counts;
};

SimStats summarize(const Timeline& timeline, const PowerParams& power);

// Renderers. JSON is deterministic and machine readable. CSV emits one row
// per request. The table targets terminals. `system` may be null when the
// run had no system layer in front of the controller.
std::string report_json(const SimStats& stats, const SystemStats* system);
std::string report_csv(const Timeline& timeline);
std::string report_table(const SimStats& stats, const SystemStats* system);

}  // namespace rowsim
