#include "rowsim/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace rowsim {

namespace {

using json = nlohmann::ordered_json;

const char* to_string(SchedulingPolicy p) {
  return p == SchedulingPolicy::Fifo ? "fifo" : "fr_fcfs";
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key, std::string("bad value: ") + e.what());
  }
}

void read_time_ns(const json& obj, const char* key, Time& out, const std::string& where) {
  if (!obj.contains(key)) return;
  double ns = 0.0;
  read_field(obj, key, ns, where);
  out = ns_to_ps(ns);
}

}  // namespace

const char* to_string(WorkloadConfig::Kind k) {
  switch (k) {
    case WorkloadConfig::Kind::Trace: return "trace";
    case WorkloadConfig::Kind::Forkbench: return "forkbench";
    case WorkloadConfig::Kind::Bulkzero: return "bulkzero";
  }
  return "?";
}

SimConfig default_config() {
  SimConfig cfg;
  cfg.workload.kind = WorkloadConfig::Kind::Forkbench;
  return cfg;
}

std::vector<ValidationIssue> validate_config(const SimConfig& cfg) {
  std::vector<ValidationIssue> issues;
  if (auto g = validate_geometry(cfg.geometry)) issues.push_back(*g);
  if (auto t = validate_timing(cfg.timing)) issues.push_back(*t);
  for (auto& p : validate_power(cfg.power)) issues.push_back(p);
  for (auto& c : validate_cache(cfg.cache)) issues.push_back(c);
  if (cfg.cache.line_bytes != cfg.geometry.cacheline_bytes)
    issues.push_back({"cache.line_bytes", "must match geometry.cacheline_bytes"});
  if (cfg.zi && !cfg.flags.rowclone)
    issues.push_back({"features.zi", "needs features.rowclone"});
  if (cfg.zi && !cfg.cache_enabled)
    issues.push_back({"features.zi", "needs cache.enabled"});
  if (cfg.inter_arrival_ns < 0.0)
    issues.push_back({"inter_arrival_ns", "must be non-negative"});
  switch (cfg.workload.kind) {
    case WorkloadConfig::Kind::Trace:
      if (cfg.workload.trace_path.empty())
        issues.push_back({"workload.path", "required for a trace workload"});
      break;
    case WorkloadConfig::Kind::Forkbench: {
      const auto& f = cfg.workload.forkbench;
      if (f.num_pages == 0) issues.push_back({"workload.num_pages", "must be positive"});
      if (f.write_fraction < 0.0 || f.write_fraction > 1.0)
        issues.push_back({"workload.write_fraction", "must be within [0, 1]"});
      if (f.gap_ns < 0.0) issues.push_back({"workload.gap_ns", "must be non-negative"});
      break;
    }
    case WorkloadConfig::Kind::Bulkzero: {
      const auto& b = cfg.workload.bulkzero;
      if (b.pages == 0) issues.push_back({"workload.pages", "must be positive"});
      if (b.stride_pages == 0) issues.push_back({"workload.stride_pages", "must be positive"});
      if (b.gap_ns < 0.0) issues.push_back({"workload.gap_ns", "must be non-negative"});
      break;
    }
  }
  return issues;
}

SimConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("json", e.what());
  }
  if (!j.is_object()) throw ConfigError("json", "top level must be an object");
  check_keys(j,
             {"geometry", "timing_ns", "power", "mapping", "scheduling", "features", "cache",
              "workload", "seed", "inter_arrival_ns"},
             "");

  SimConfig cfg = default_config();

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    check_keys(g,
               {"num_banks", "subarrays_per_bank", "rows_per_subarray", "row_size_bytes",
                "cacheline_bytes"},
               "geometry");
    read_field(g, "num_banks", cfg.geometry.num_banks, "geometry");
    read_field(g, "subarrays_per_bank", cfg.geometry.subarrays_per_bank, "geometry");
    read_field(g, "rows_per_subarray", cfg.geometry.rows_per_subarray, "geometry");
    read_field(g, "row_size_bytes", cfg.geometry.row_size_bytes, "geometry");
    read_field(g, "cacheline_bytes", cfg.geometry.cacheline_bytes, "geometry");
  }

  if (j.contains("timing_ns")) {
    const json& t = j.at("timing_ns");
    check_keys(t,
               {"tCK", "tRCD", "tRP", "tRAS", "tRC", "CL", "CWL", "tBURST", "tCCD", "tRRD",
                "tFAW", "tWR", "tRTP"},
               "timing_ns");
    read_time_ns(t, "tCK", cfg.timing.tCK, "timing_ns");
    read_time_ns(t, "tRCD", cfg.timing.tRCD, "timing_ns");
    read_time_ns(t, "tRP", cfg.timing.tRP, "timing_ns");
    read_time_ns(t, "tRAS", cfg.timing.tRAS, "timing_ns");
    read_time_ns(t, "tRC", cfg.timing.tRC, "timing_ns");
    read_time_ns(t, "CL", cfg.timing.CL, "timing_ns");
    read_time_ns(t, "CWL", cfg.timing.CWL, "timing_ns");
    read_time_ns(t, "tBURST", cfg.timing.tBURST, "timing_ns");
    read_time_ns(t, "tCCD", cfg.timing.tCCD, "timing_ns");
    read_time_ns(t, "tRRD", cfg.timing.tRRD, "timing_ns");
    read_time_ns(t, "tFAW", cfg.timing.tFAW, "timing_ns");
    read_time_ns(t, "tWR", cfg.timing.tWR, "timing_ns");
    read_time_ns(t, "tRTP", cfg.timing.tRTP, "timing_ns");
  }

  if (j.contains("power")) {
    const json& p = j.at("power");
    check_keys(p,
               {"e_act_pre_nj", "e_rd_array_nj", "e_wr_array_nj", "e_io_nj", "e_transfer_nj",
                "p_background_mw"},
               "power");
    read_field(p, "e_act_pre_nj", cfg.power.e_act_pre, "power");
    read_field(p, "e_rd_array_nj", cfg.power.e_rd_array, "power");
    read_field(p, "e_wr_array_nj", cfg.power.e_wr_array, "power");
    read_field(p, "e_io_nj", cfg.power.e_io, "power");
    read_field(p, "e_transfer_nj", cfg.power.e_transfer, "power");
    read_field(p, "p_background_mw", cfg.power.p_background_mw, "power");
  }

  if (j.contains("mapping")) {
    const json& m = j.at("mapping");
    check_keys(m, {"field_order"}, "mapping");
    if (m.contains("field_order")) {
      std::array<std::string, 4> names;
      try {
        m.at("field_order").get_to(names);
      } catch (const json::exception& e) {
        throw ConfigError("mapping.field_order", std::string("bad value: ") + e.what());
      }
      if (!parse_field_order(names, cfg.mapping))
        throw ConfigError("mapping.field_order",
                          "must be a permutation of row, subarray, bank, column");
    }
  }

  if (j.contains("scheduling")) {
    const json& s = j.at("scheduling");
    check_keys(s, {"policy"}, "scheduling");
    if (s.contains("policy")) {
      std::string policy;
      read_field(s, "policy", policy, "scheduling");
      if (policy == "fifo")
        cfg.policy = SchedulingPolicy::Fifo;
      else if (policy == "fr_fcfs")
        cfg.policy = SchedulingPolicy::FrFcfs;
      else
        throw ConfigError("scheduling.policy", "must be fifo or fr_fcfs");
    }
  }

  if (j.contains("features")) {
    const json& f = j.at("features");
    check_keys(f, {"rowclone", "fpm", "psm", "zi"}, "features");
    read_field(f, "rowclone", cfg.flags.rowclone, "features");
    read_field(f, "fpm", cfg.flags.fpm, "features");
    read_field(f, "psm", cfg.flags.psm, "features");
    read_field(f, "zi", cfg.zi, "features");
  }

  if (j.contains("cache")) {
    const json& c = j.at("cache");
    check_keys(c, {"enabled", "capacity_bytes", "associativity"}, "cache");
    read_field(c, "enabled", cfg.cache_enabled, "cache");
    read_field(c, "capacity_bytes", cfg.cache.capacity_bytes, "cache");
    read_field(c, "associativity", cfg.cache.associativity, "cache");
  }

  if (j.contains("workload")) {
    const json& w = j.at("workload");
    std::string kind = "forkbench";
    read_field(w, "kind", kind, "workload");
    if (kind == "trace") {
      check_keys(w, {"kind", "path"}, "workload");
      cfg.workload.kind = WorkloadConfig::Kind::Trace;
      read_field(w, "path", cfg.workload.trace_path, "workload");
    } else if (kind == "forkbench") {
      check_keys(w, {"kind", "num_pages", "write_fraction", "gap_ns"}, "workload");
      cfg.workload.kind = WorkloadConfig::Kind::Forkbench;
      read_field(w, "num_pages", cfg.workload.forkbench.num_pages, "workload");
      read_field(w, "write_fraction", cfg.workload.forkbench.write_fraction, "workload");
      read_field(w, "gap_ns", cfg.workload.forkbench.gap_ns, "workload");
    } else if (kind == "bulkzero") {
      check_keys(w, {"kind", "pages", "stride_pages", "gap_ns"}, "workload");
      cfg.workload.kind = WorkloadConfig::Kind::Bulkzero;
      read_field(w, "pages", cfg.workload.bulkzero.pages, "workload");
      read_field(w, "stride_pages", cfg.workload.bulkzero.stride_pages, "workload");
      read_field(w, "gap_ns", cfg.workload.bulkzero.gap_ns, "workload");
    } else {
      throw ConfigError("workload.kind", "must be trace, forkbench or bulkzero");
    }
  }

  read_field(j, "seed", cfg.seed, "");
  read_field(j, "inter_arrival_ns", cfg.inter_arrival_ns, "");

  // The cache line size always follows the geometry; it is not a separate
  // knob. Semantic validation is left to validate_config so that callers can
  // report every issue at once.
  cfg.cache.line_bytes = cfg.geometry.cacheline_bytes;
  return cfg;
}

std::string config_to_json(const SimConfig& cfg) {
  json j;
  j["geometry"] = {{"num_banks", cfg.geometry.num_banks},
                   {"subarrays_per_bank", cfg.geometry.subarrays_per_bank},
                   {"rows_per_subarray", cfg.geometry.rows_per_subarray},
                   {"row_size_bytes", cfg.geometry.row_size_bytes},
                   {"cacheline_bytes", cfg.geometry.cacheline_bytes}};
  j["timing_ns"] = {{"tCK", ps_to_ns(cfg.timing.tCK)},
                    {"tRCD", ps_to_ns(cfg.timing.tRCD)},
                    {"tRP", ps_to_ns(cfg.timing.tRP)},
                    {"tRAS", ps_to_ns(cfg.timing.tRAS)},
                    {"tRC", ps_to_ns(cfg.timing.tRC)},
                    {"CL", ps_to_ns(cfg.timing.CL)},
                    {"CWL", ps_to_ns(cfg.timing.CWL)},
                    {"tBURST", ps_to_ns(cfg.timing.tBURST)},
                    {"tCCD", ps_to_ns(cfg.timing.tCCD)},
                    {"tRRD", ps_to_ns(cfg.timing.tRRD)},
                    {"tFAW", ps_to_ns(cfg.timing.tFAW)},
                    {"tWR", ps_to_ns(cfg.timing.tWR)},
                    {"tRTP", ps_to_ns(cfg.timing.tRTP)}};
  j["power"] = {{"e_act_pre_nj", cfg.power.e_act_pre},
                {"e_rd_array_nj", cfg.power.e_rd_array},
                {"e_wr_array_nj", cfg.power.e_wr_array},
                {"e_io_nj", cfg.power.e_io},
                {"e_transfer_nj", cfg.power.e_transfer},
                {"p_background_mw", cfg.power.p_background_mw}};
  json order = json::array();
  for (const AddressField f : cfg.mapping.order) order.push_back(rowsim::to_string(f));
  j["mapping"] = {{"field_order", order}};
  j["scheduling"] = {{"policy", to_string(cfg.policy)}};
  j["features"] = {{"rowclone", cfg.flags.rowclone},
                   {"fpm", cfg.flags.fpm},
                   {"psm", cfg.flags.psm},
                   {"zi", cfg.zi}};
  j["cache"] = {{"enabled", cfg.cache_enabled},
                {"capacity_bytes", cfg.cache.capacity_bytes},
                {"associativity", cfg.cache.associativity}};
  switch (cfg.workload.kind) {
    case WorkloadConfig::Kind::Trace:
      j["workload"] = {{"kind", "trace"}, {"path", cfg.workload.trace_path}};
      break;
    case WorkloadConfig::Kind::Forkbench:
      j["workload"] = {{"kind", "forkbench"},
                       {"num_pages", cfg.workload.forkbench.num_pages},
                       {"write_fraction", cfg.workload.forkbench.write_fraction},
                       {"gap_ns", cfg.workload.forkbench.gap_ns}};
      break;
    case WorkloadConfig::Kind::Bulkzero:
      j["workload"] = {{"kind", "bulkzero"},
                       {"pages", cfg.workload.bulkzero.pages},
                       {"stride_pages", cfg.workload.bulkzero.stride_pages},
                       {"gap_ns", cfg.workload.bulkzero.gap_ns}};
      break;
  }
  j["seed"] = cfg.seed;
  j["inter_arrival_ns"] = cfg.inter_arrival_ns;
  return j.dump(2) + "\n";
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("file", "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("file", "cannot write: " + path);
  out << config_to_json(cfg);
}

SimConfig override_config(const SimConfig& cfg, const std::string& key,
                          const std::string& value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.push_back(key.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (parts.empty() || parts.size() > 2) throw ConfigError(key, "expected section.key or key");

  json j = json::parse(config_to_json(cfg));
  json* node = &j;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
      throw ConfigError(key, "unknown section '" + parts[i] + "'");
    node = &(*node)[parts[i]];
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings, e.g. a policy name or a path
  }
  (*node)[parts.back()] = parsed;
  return config_from_json(j.dump());
}

std::vector<TraceRecord> build_workload(const SimConfig& cfg) {
  switch (cfg.workload.kind) {
    case WorkloadConfig::Kind::Trace:
      return load_trace(cfg.workload.trace_path, cfg.geometry.cacheline_bytes,
                        ns_to_ps(cfg.inter_arrival_ns));
    case WorkloadConfig::Kind::Forkbench: {
      ForkbenchParams p = cfg.workload.forkbench;
      p.page_bytes = cfg.geometry.row_size_bytes;
      p.line_bytes = cfg.geometry.cacheline_bytes;
      p.seed = cfg.seed;
      return gen_forkbench(p);
    }
    case WorkloadConfig::Kind::Bulkzero: {
      BulkzeroParams p = cfg.workload.bulkzero;
      p.page_bytes = cfg.geometry.row_size_bytes;
      return gen_bulkzero(p);
    }
  }
  throw InternalError("unhandled workload kind");
}

}  // namespace rowsim
