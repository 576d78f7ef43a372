#include "rowsim/report.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace rowsim {

namespace {

using json = nlohmann::ordered_json;

std::string format_ns(Time ps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", ps_to_ns(ps));
  return buf;
}

json system_json(const SystemStats& s) {
  json j;
  j["records"] = s.records;
  j["cache_hits"] = s.cache_hits;
  j["cache_misses"] = s.cache_misses;
  j["fills"] = s.fills;
  j["writebacks"] = s.writebacks;
  j["zero_lines_installed"] = s.zero_lines_installed;
  j["copy_lines_installed"] = s.copy_lines_installed;
  j["processes"] = s.processes;
  j["page_table"] = {{"allocations", s.page_table.allocations},
                     {"identity_allocations", s.page_table.identity_allocations},
                     {"hint_hits", s.page_table.hint_hits},
                     {"hint_misses", s.page_table.hint_misses},
                     {"cow_copies", s.page_table.cow_copies},
                     {"forks", s.page_table.forks}};
  return j;
}

}  // namespace

double ClassStats::mean_latency_ns() const {
  if (requests == 0) return 0.0;
  return ps_to_ns(total_latency) / static_cast<double>(requests);
}

SimStats summarize(const Timeline& timeline, const PowerParams& power) {
  SimStats stats;
  stats.makespan = timeline.makespan;
  stats.channel_bytes = timeline.channel_bytes;
  stats.energy = account(timeline, power);
  for (const RequestRecord& r : timeline.requests) {
    ClassStats& c = stats.by_class[r.op_class];
    c.requests += 1;
    c.total_latency += r.latency();
    c.channel_bytes += r.channel_bytes;
    if (r.has_mechanism) stats.mechanism_counts[r.mechanism] += 1;
    stats.origin_counts[r.origin] += 1;
  }
  for (auto& [klass, c] : stats.by_class)
    c.energy_nj = account_class(timeline, power, klass).total_nj();
  return stats;
}

std::string report_json(const SimStats& stats, const SystemStats* system) {
  json j;
  j["makespan_ns"] = ps_to_ns(stats.makespan);
  j["channel_bytes"] = stats.channel_bytes;
  j["energy_nj"] = {{"total", stats.energy.total_nj()},
                    {"act_pre", stats.energy.act_pre_nj},
                    {"array", stats.energy.array_nj},
                    {"io", stats.energy.io_nj},
                    {"transfer", stats.energy.transfer_nj},
                    {"background", stats.energy.background_nj}};
  j["commands"] = {{"act", stats.energy.acts},
                   {"pre", stats.energy.pres},
                   {"read", stats.energy.reads},
                   {"write", stats.energy.writes},
                   {"transfer", stats.energy.transfers}};
  json classes = json::object();
  for (const auto& [klass, c] : stats.by_class)
    classes[to_string(klass)] = {{"requests", c.requests},
                                 {"mean_latency_ns", c.mean_latency_ns()},
                                 {"energy_nj", c.energy_nj},
                                 {"channel_bytes", c.channel_bytes}};
  j["classes"] = classes;
  json mechanisms = json::object();
  for (const auto& [m, n] : stats.mechanism_counts) mechanisms[to_string(m)] = n;
  j["mechanisms"] = mechanisms;
  json origins = json::object();
  for (const auto& [o, n] : stats.origin_counts) origins[to_string(o)] = n;
  j["origins"] = origins;
  if (system) j["system"] = system_json(*system);
  return j.dump(2) + "\n";
}

std::string report_csv(const Timeline& timeline) {
  std::ostringstream out;
  out << "seq,kind,origin,class,mechanism,arrival_ns,start_ns,end_ns,latency_ns,"
         "channel_bytes\n";
  for (const RequestRecord& r : timeline.requests) {
    out << r.seq << ',' << to_string(r.kind) << ',' << to_string(r.origin) << ','
        << to_string(r.op_class) << ',' << (r.has_mechanism ? to_string(r.mechanism) : "-")
        << ',' << format_ns(r.arrival) << ',' << format_ns(r.start) << ','
        << format_ns(r.end) << ',' << format_ns(r.latency()) << ',' << r.channel_bytes
        << '\n';
  }
  return out.str();
}

std::string report_table(const SimStats& stats, const SystemStats* system) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "makespan        " << ps_to_ns(stats.makespan) << " ns\n";
  out << "channel bytes   " << stats.channel_bytes << "\n";
  out << "energy          " << stats.energy.total_nj() << " nJ\n";
  out << "  breakdown     act/pre " << stats.energy.act_pre_nj << ", array "
      << stats.energy.array_nj << ", io " << stats.energy.io_nj << ", transfer "
      << stats.energy.transfer_nj << ", background " << stats.energy.background_nj << "\n";
  out << "commands        act " << stats.energy.acts << ", pre " << stats.energy.pres
      << ", read " << stats.energy.reads << ", write " << stats.energy.writes
      << ", transfer " << stats.energy.transfers << "\n";

  out << "\n" << std::left << std::setw(20) << "class" << std::right << std::setw(10)
      << "requests" << std::setw(18) << "mean latency ns" << std::setw(14) << "energy nJ"
      << std::setw(16) << "channel bytes" << "\n";
  for (const auto& [klass, c] : stats.by_class) {
    out << std::left << std::setw(20) << to_string(klass) << std::right << std::setw(10)
        << c.requests << std::setw(18) << c.mean_latency_ns() << std::setw(14) << c.energy_nj
        << std::setw(16) << c.channel_bytes << "\n";
  }

  if (!stats.mechanism_counts.empty()) {
    out << "\nmechanisms      ";
    bool first = true;
    for (const auto& [m, n] : stats.mechanism_counts) {
      if (!first) out << ", ";
      out << to_string(m) << " " << n;
      first = false;
    }
    out << "\n";
  }

  if (system) {
    out << "\ncache           hits " << system->cache_hits << ", misses "
        << system->cache_misses << ", fills " << system->fills << ", writebacks "
        << system->writebacks << "\n";
    out << "zero lines      " << system->zero_lines_installed << "\n";
    out << "copy lines      " << system->copy_lines_installed << "\n";
    out << "page table      allocations " << system->page_table.allocations << ", cow copies "
        << system->page_table.cow_copies << ", hint hits " << system->page_table.hint_hits
        << ", hint misses " << system->page_table.hint_misses << ", forks "
        << system->page_table.forks << "\n";
  }
  return out.str();
}

}  // namespace rowsim
