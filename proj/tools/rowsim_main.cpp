// Command-line front end: simulate, compare, gen-trace, validate-config and
// sweep over one shared configuration format.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rowsim/sim.hpp"

namespace {

using namespace rowsim;

struct CommonOpts {
  std::string config_path;
  std::string trace_path;
  std::string out_path;
  std::string format = "table";
  std::optional<std::uint64_t> seed;
  std::optional<bool> rowclone;
  std::optional<bool> zi;
};

void add_common(CLI::App& sub, CommonOpts& o, bool with_format = true) {
  sub.add_option("--config", o.config_path, "configuration file (defaults when omitted)");
  sub.add_option("--trace", o.trace_path, "trace file, overrides the configured workload");
  sub.add_option("--out", o.out_path, "output file (stdout when omitted)");
  sub.add_option("--seed", o.seed, "override the configuration seed");
  if (with_format)
    sub.add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->default_str("table");
  sub.add_flag("--rowclone,!--no-rowclone",
               [&o](std::int64_t n) { o.rowclone = n > 0; },
               "force in-DRAM copy mechanisms on or off");
  sub.add_flag("--zi,!--no-zi", [&o](std::int64_t n) { o.zi = n > 0; },
               "force zero-line and copy-line cache installation on or off");
}

SimConfig make_config(const CommonOpts& o) {
  SimConfig cfg = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (!o.trace_path.empty()) {
    cfg.workload.kind = WorkloadConfig::Kind::Trace;
    cfg.workload.trace_path = o.trace_path;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.zi) cfg.zi = *o.zi;
  if (o.rowclone) {
    cfg.flags.rowclone = *o.rowclone;
    // Turning rowclone off drags zi along unless the user pinned it.
    if (!*o.rowclone && !o.zi) cfg.zi = false;
  }
  return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write: " + out_path);
  out << text;
}

int run_simulate(const CommonOpts& o) {
  const SimConfig cfg = make_config(o);
  const RunResult r = run_simulation(cfg);
  std::string text;
  if (o.format == "json")
    text = report_json(r.stats, &r.system);
  else if (o.format == "csv")
    text = report_csv(r.timeline);
  else
    text = report_table(r.stats, &r.system);
  emit(text, o.out_path);
  return 0;
}

int run_compare(const CommonOpts& o, const std::vector<std::string>& paths) {
  if (o.format == "csv") throw ConfigError("format", "csv applies to simulate only");

  std::vector<std::pair<std::string, SimConfig>> variants;
  SimConfig base;
  if (paths.empty()) {
    // Derive the classic three-way comparison from one configuration.
    const SimConfig cfg = make_config(o);
    base = override_config(override_config(cfg, "features.rowclone", "false"),
                           "features.zi", "false");
    variants.emplace_back(
        "rowclone", override_config(override_config(cfg, "features.rowclone", "true"),
                                    "features.zi", "false"));
    variants.emplace_back(
        "rowclone_zi", override_config(override_config(cfg, "features.rowclone", "true"),
                                       "features.zi", "true"));
  } else {
    if (paths.size() < 2 || paths.size() > 3)
      throw ConfigError("compare", "expected two or three configuration files");
    CommonOpts bo = o;
    bo.config_path = paths[0];
    base = make_config(bo);
    static const char* kNames[] = {"variant", "variant2"};
    for (std::size_t i = 1; i < paths.size(); ++i) {
      CommonOpts vo = o;
      vo.config_path = paths[i];
      variants.emplace_back(kNames[i - 1], make_config(vo));
    }
  }

  std::string text;
  if (o.format == "json") {
    nlohmann::ordered_json j;
    for (const auto& [name, vcfg] : variants)
      j[name] = nlohmann::ordered_json::parse(comparison_json(compare_runs(base, vcfg)));
    text = j.dump(2) + "\n";
  } else {
    for (const auto& [name, vcfg] : variants) {
      text += "== base vs " + name + " ==\n";
      text += comparison_table(compare_runs(base, vcfg));
      text += "\n";
    }
  }
  emit(text, o.out_path);
  return 0;
}

int run_validate(const std::string& config_path) {
  const SimConfig cfg = load_config(config_path);
  const auto issues = validate_config(cfg);
  for (const auto& issue : issues)
    std::fprintf(stderr, "%s: %s\n", issue.field.c_str(), issue.reason.c_str());
  if (!issues.empty()) return 1;
  std::puts("ok");
  return 0;
}

int run_sweep(const CommonOpts& o, const std::vector<std::string>& sets) {
  std::vector<SweepAxis> axes;
  for (const std::string& s : sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
      throw ConfigError("set", "expected key=value[,value...]: " + s);
    SweepAxis axis;
    axis.key = s.substr(0, eq);
    std::size_t start = eq + 1;
    while (start <= s.size()) {
      const std::size_t comma = s.find(',', start);
      axis.values.push_back(
          s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    axes.push_back(std::move(axis));
  }
  const SimConfig cfg = make_config(o);
  const std::vector<SweepPoint> points = sweep(cfg, axes);
  if (o.format == "json")
    emit(sweep_json(points), o.out_path);
  else if (o.format == "csv")
    emit(sweep_csv(points), o.out_path);
  else
    emit(sweep_table(points), o.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rowsim: DRAM memory system simulator with in-DRAM bulk copy and zeroing"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "run one configuration and report");
  add_common(*sim, sim_opts);

  CommonOpts cmp_opts;
  std::vector<std::string> cmp_paths;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run baseline and variants over the same workload and report ratios");
  add_common(*cmp, cmp_opts);
  cmp->add_option("configs", cmp_paths,
                  "base and variant configuration files; omit to derive "
                  "baseline/rowclone/rowclone-zi from --config");

  CommonOpts gen_opts;
  std::string gen_kind = "forkbench";
  ForkbenchParams fork_params;
  BulkzeroParams zero_params;
  CLI::App* gen = app.add_subcommand("gen-trace", "emit a generated workload as a trace");
  gen->add_option("--config", gen_opts.config_path,
                  "configuration supplying geometry and seed");
  gen->add_option("--out", gen_opts.out_path, "output file (stdout when omitted)");
  gen->add_option("--seed", gen_opts.seed, "override the configuration seed");
  gen->add_option("--kind", gen_kind, "workload generator")
      ->check(CLI::IsMember({"forkbench", "bulkzero"}))
      ->default_str("forkbench");
  gen->add_option("--num-pages", fork_params.num_pages, "forkbench: pages to pre-fault");
  gen->add_option("--write-fraction", fork_params.write_fraction,
                  "forkbench: fraction of pages written after the fork");
  gen->add_option("--pages", zero_params.pages, "bulkzero: pages to zero");
  gen->add_option("--stride-pages", zero_params.stride_pages, "bulkzero: page stride");
  double gen_gap_ns = 1.0;
  gen->add_option("--gap-ns", gen_gap_ns, "nanoseconds between records");

  std::string val_path;
  CLI::App* val = app.add_subcommand("validate-config", "parse and validate a configuration");
  val->add_option("--config", val_path, "configuration file")->required();

  CommonOpts sweep_opts;
  std::vector<std::string> sweep_sets;
  CLI::App* swp = app.add_subcommand("sweep", "run a cartesian parameter sweep");
  add_common(*swp, sweep_opts);
  swp->add_option("--set", sweep_sets, "axis as dotted.key=value[,value...]")
      ->required()
      ->take_all();

  try {
    app.parse(argc, argv);
    if (*sim) return run_simulate(sim_opts);
    if (*cmp) return run_compare(cmp_opts, cmp_paths);
    if (*gen) {
      const SimConfig cfg =
          gen_opts.config_path.empty() ? default_config() : load_config(gen_opts.config_path);
      std::vector<TraceRecord> records;
      if (gen_kind == "forkbench") {
        fork_params.page_bytes = cfg.geometry.row_size_bytes;
        fork_params.line_bytes = cfg.geometry.cacheline_bytes;
        fork_params.seed = gen_opts.seed.value_or(cfg.seed);
        fork_params.gap_ns = gen_gap_ns;
        records = gen_forkbench(fork_params);
      } else {
        zero_params.page_bytes = cfg.geometry.row_size_bytes;
        zero_params.gap_ns = gen_gap_ns;
        records = gen_bulkzero(zero_params);
      }
      emit(serialize_trace(records), gen_opts.out_path);
      return 0;
    }
    if (*val) return run_validate(val_path);
    if (*swp) return run_sweep(sweep_opts, sweep_sets);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const SimError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::Config: return 1;
      case ErrorKind::Trace: return 2;
      case ErrorKind::Internal: return 3;
    }
    return 3;
  }
  return 0;
}
