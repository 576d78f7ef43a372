// Microbenchmarks for the hot paths: command scheduling with and without
// in-DRAM copy, trace parsing, and the schedule checker.

#include <benchmark/benchmark.h>

#include <sstream>

#include "rowsim/checker.hpp"
#include "rowsim/sim.hpp"

namespace {

using namespace rowsim;

SimConfig copy_config(bool rowclone) {
  SimConfig cfg = default_config();
  cfg.flags.rowclone = rowclone;
  cfg.zi = false;
  cfg.cache_enabled = false;
  cfg.workload.kind = WorkloadConfig::Kind::Trace;
  return cfg;
}

std::vector<TraceRecord> copy_stream(const Geometry& g, std::size_t copies) {
  std::vector<TraceRecord> recs;
  for (std::size_t i = 0; i < copies; ++i) {
    TraceRecord r;
    r.op = TraceOp::Copy;
    const std::uint64_t sub = i % (g.num_banks * g.subarrays_per_bank);
    const std::uint64_t row = (2 * (i / (g.num_banks * g.subarrays_per_bank))) %
                              (g.rows_per_subarray - 2);
    const std::uint64_t base = (sub * g.rows_per_subarray + row) * g.row_size_bytes;
    r.src = base;
    r.dst = base + g.row_size_bytes;
    r.len = g.row_size_bytes;
    recs.push_back(r);
  }
  return recs;
}

void bench_schedule_copies(benchmark::State& state, bool rowclone) {
  const SimConfig cfg = copy_config(rowclone);
  const auto recs = copy_stream(cfg.geometry, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const RunResult r = run_simulation(cfg, recs);
    benchmark::DoNotOptimize(r.stats.makespan);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_schedule_copies_baseline(benchmark::State& state) {
  bench_schedule_copies(state, false);
}
BENCHMARK(BM_schedule_copies_baseline)->Arg(64)->Arg(256);

void BM_schedule_copies_rowclone(benchmark::State& state) {
  bench_schedule_copies(state, true);
}
BENCHMARK(BM_schedule_copies_rowclone)->Arg(64)->Arg(256);

void BM_parse_trace(benchmark::State& state) {
  BulkzeroParams p;
  p.pages = static_cast<std::uint64_t>(state.range(0));
  const std::string text = serialize_trace(gen_bulkzero(p));
  for (auto _ : state) {
    const auto recs = parse_trace(text, 64);
    benchmark::DoNotOptimize(recs.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_parse_trace)->Arg(1024)->Arg(8192);

void BM_check_schedule(benchmark::State& state) {
  SimConfig cfg = copy_config(true);
  const auto recs = copy_stream(cfg.geometry, static_cast<std::size_t>(state.range(0)));
  const RunResult r = run_simulation(cfg, recs);
  const auto commands = r.timeline.timed_commands();
  for (auto _ : state) {
    const auto violation = check_schedule(cfg.geometry, cfg.timing, true, commands);
    benchmark::DoNotOptimize(violation.has_value());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(commands.size()));
}
BENCHMARK(BM_check_schedule)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
