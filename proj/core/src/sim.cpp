#include "rowsim/sim.hpp"

#include <future>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace rowsim {

namespace {

using json = nlohmann::ordered_json;

double factor(double base, double variant) { return variant > 0.0 ? base / variant : 0.0; }

SystemConfig system_config(const SimConfig& cfg) {
  SystemConfig sc;
  sc.mapping = cfg.mapping;
  sc.flags = cfg.flags;
  sc.policy = cfg.policy;
  sc.cache_enabled = cfg.cache_enabled;
  sc.cache = cfg.cache;
  sc.zi = cfg.zi;
  sc.seed = cfg.seed;
  return sc;
}

void require_valid(const SimConfig& cfg) {
  const auto issues = validate_config(cfg);
  if (!issues.empty()) throw ConfigError(issues.front().field, issues.front().reason);
}

std::string comparable_part(const SimConfig& cfg) {
  json j = json::parse(config_to_json(cfg));
  j.erase("features");
  j.erase("scheduling");
  return j.dump();
}

std::string format_factor(double f) {
  if (f <= 0.0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", f);
  return buf;
}

}  // namespace

RunResult run_simulation(const SimConfig& cfg) {
  require_valid(cfg);
  const std::vector<TraceRecord> records = build_workload(cfg);
  return run_simulation(cfg, records);
}

RunResult run_simulation(const SimConfig& cfg, std::span<const TraceRecord> records) {
  require_valid(cfg);
  System sys(cfg.geometry, cfg.timing, system_config(cfg));
  SystemResult r = sys.run(records);
  RunResult out;
  out.stats = summarize(r.timeline, cfg.power);
  out.system = r.stats;
  out.timeline = std::move(r.timeline);
  return out;
}

double ClassDelta::latency_factor() const {
  return factor(base_mean_latency_ns, variant_mean_latency_ns);
}

double ClassDelta::energy_factor() const { return factor(base_energy_nj, variant_energy_nj); }

double ClassDelta::channel_factor() const {
  return factor(static_cast<double>(base_channel_bytes),
                static_cast<double>(variant_channel_bytes));
}

double Comparison::makespan_factor() const {
  return factor(ps_to_ns(base.stats.makespan), ps_to_ns(variant.stats.makespan));
}

double Comparison::energy_factor() const {
  return factor(base.stats.energy.total_nj(), variant.stats.energy.total_nj());
}

double Comparison::channel_factor() const {
  return factor(static_cast<double>(base.stats.channel_bytes),
                static_cast<double>(variant.stats.channel_bytes));
}

Comparison compare_runs(const SimConfig& base_cfg, const SimConfig& variant_cfg) {
  require_valid(base_cfg);
  require_valid(variant_cfg);
  if (comparable_part(base_cfg) != comparable_part(variant_cfg))
    throw ConfigError("compare",
                      "configurations may differ only in features and scheduling");

  const std::vector<TraceRecord> records = build_workload(base_cfg);
  Comparison c;
  c.base = run_simulation(base_cfg, records);
  c.variant = run_simulation(variant_cfg, records);

  for (const auto& [klass, s] : c.base.stats.by_class) {
    ClassDelta& d = c.by_class[klass];
    d.base_requests = s.requests;
    d.base_mean_latency_ns = s.mean_latency_ns();
    d.base_energy_nj = s.energy_nj;
    d.base_channel_bytes = s.channel_bytes;
  }
  for (const auto& [klass, s] : c.variant.stats.by_class) {
    ClassDelta& d = c.by_class[klass];
    d.variant_requests = s.requests;
    d.variant_mean_latency_ns = s.mean_latency_ns();
    d.variant_energy_nj = s.energy_nj;
    d.variant_channel_bytes = s.channel_bytes;
  }
  return c;
}

std::string comparison_table(const Comparison& c) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "                     base          variant       factor\n";
  out << "makespan ns     " << std::setw(13) << ps_to_ns(c.base.stats.makespan)
      << std::setw(14) << ps_to_ns(c.variant.stats.makespan) << std::setw(13)
      << format_factor(c.makespan_factor()) << "\n";
  out << "energy nJ       " << std::setw(13) << c.base.stats.energy.total_nj()
      << std::setw(14) << c.variant.stats.energy.total_nj() << std::setw(13)
      << format_factor(c.energy_factor()) << "\n";
  out << "channel bytes   " << std::setw(13) << c.base.stats.channel_bytes << std::setw(14)
      << c.variant.stats.channel_bytes << std::setw(13) << format_factor(c.channel_factor())
      << "\n";
  for (const auto& [klass, d] : c.by_class) {
    out << "\n[" << to_string(klass) << "]\n";
    out << "  requests      " << std::setw(13) << d.base_requests << std::setw(14)
        << d.variant_requests << "\n";
    out << "  latency ns    " << std::setw(13) << d.base_mean_latency_ns << std::setw(14)
        << d.variant_mean_latency_ns << std::setw(13) << format_factor(d.latency_factor())
        << "\n";
    out << "  energy nJ     " << std::setw(13) << d.base_energy_nj << std::setw(14)
        << d.variant_energy_nj << std::setw(13) << format_factor(d.energy_factor()) << "\n";
    out << "  channel bytes " << std::setw(13) << d.base_channel_bytes << std::setw(14)
        << d.variant_channel_bytes << std::setw(13) << format_factor(d.channel_factor())
        << "\n";
  }
  return out.str();
}

std::string comparison_json(const Comparison& c) {
  json j;
  j["base"] = json::parse(report_json(c.base.stats, &c.base.system));
  j["variant"] = json::parse(report_json(c.variant.stats, &c.variant.system));
  j["factors"] = {{"makespan", c.makespan_factor()},
                  {"energy", c.energy_factor()},
                  {"channel_bytes", c.channel_factor()}};
  json classes = json::object();
  for (const auto& [klass, d] : c.by_class)
    classes[to_string(klass)] = {{"latency", d.latency_factor()},
                                 {"energy", d.energy_factor()},
                                 {"channel_bytes", d.channel_factor()}};
  j["factors"]["classes"] = classes;
  return j.dump(2) + "\n";
}

std::vector<SweepPoint> sweep(const SimConfig& base, const std::vector<SweepAxis>& axes) {
  for (const SweepAxis& a : axes)
    if (a.values.empty()) throw ConfigError(a.key, "sweep axis has no values");

  std::vector<SweepPoint> points;
  std::vector<std::size_t> index(axes.size(), 0);
  while (true) {
    SweepPoint p;
    SimConfig cfg = base;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      cfg = override_config(cfg, axes[i].key, axes[i].values[index[i]]);
      p.overrides.emplace_back(axes[i].key, axes[i].values[index[i]]);
    }
    require_valid(cfg);
    points.push_back(std::move(p));

    bool wrapped = true;
    for (std::size_t axis = axes.size(); axis-- > 0;) {
      if (++index[axis] < axes[axis].values.size()) {
        wrapped = false;
        break;
      }
      index[axis] = 0;
    }
    if (wrapped) break;
  }

  std::vector<std::future<SimStats>> futures;
  futures.reserve(points.size());
  for (const SweepPoint& p : points) {
    SimConfig cfg = base;
    for (const auto& [key, value] : p.overrides) cfg = override_config(cfg, key, value);
    futures.push_back(std::async(std::launch::async,
                                 [cfg]() { return run_simulation(cfg).stats; }));
  }
  for (std::size_t i = 0; i < points.size(); ++i) points[i].stats = futures[i].get();
  return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "point";
  if (!points.empty())
    for (const auto& [key, _] : points.front().overrides) out << ',' << key;
  out << ",makespan_ns,channel_bytes,energy_nj\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    out << i;
    for (const auto& [_, value] : p.overrides) out << ',' << value;
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",%.3f,%llu,%.4f", ps_to_ns(p.stats.makespan),
                  static_cast<unsigned long long>(p.stats.channel_bytes),
                  p.stats.energy.total_nj());
    out << buf << '\n';
  }
  return out.str();
}

std::string sweep_json(const std::vector<SweepPoint>& points) {
  json j = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    json entry;
    entry["point"] = i;
    json overrides = json::object();
    for (const auto& [key, value] : p.overrides) overrides[key] = value;
    entry["overrides"] = overrides;
    entry["makespan_ns"] = ps_to_ns(p.stats.makespan);
    entry["channel_bytes"] = p.stats.channel_bytes;
    entry["energy_nj"] = p.stats.energy.total_nj();
    j.push_back(entry);
  }
  return j.dump(2) + "\n";
}

std::string sweep_table(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::setw(5) << "point";
  if (!points.empty())
    for (const auto& [key, _] : points.front().overrides)
      out << std::setw(std::max<int>(20, static_cast<int>(key.size()) + 2)) << key;
  out << std::setw(15) << "makespan_ns" << std::setw(15) << "channel_bytes" << std::setw(15)
      << "energy_nj" << "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    out << std::setw(5) << i;
    for (const auto& [key, value] : p.overrides)
      out << std::setw(std::max<int>(20, static_cast<int>(key.size()) + 2)) << value;
    out << std::setw(15) << ps_to_ns(p.stats.makespan) << std::setw(15)
        << p.stats.channel_bytes << std::setw(15) << p.stats.energy.total_nj() << "\n";
  }
  return out.str();
}

}  // namespace rowsim
