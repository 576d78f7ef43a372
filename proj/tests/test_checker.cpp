#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "rowsim/checker.hpp"
#include "rowsim/dram.hpp"

#include "oracles.hpp"

using namespace rowsim;

namespace {

const Timing kT = ddr3_1066_timing();

// Drives the forward model with randomly chosen legal commands and returns
// the resulting schedule. Jitter occasionally delays commands past their
// earliest legal time so spacings vary.
std::vector<TimedCommand> random_schedule(std::uint64_t seed, std::size_t length,
                                          const Geometry& g) {
  std::mt19937_64 rng(seed);
  DramModel m(g, kT, DeviceFeatures{});
  std::uniform_int_distribution<int> bank_pick(0, static_cast<int>(g.num_banks) - 1);
  std::uniform_int_distribution<int> sub_pick(0, static_cast<int>(g.subarrays_per_bank) - 1);
  std::uniform_int_distribution<int> row_pick(0, static_cast<int>(g.rows_per_subarray) - 1);
  std::uniform_int_distribution<int> col_pick(0, static_cast<int>(g.lines_per_row()) - 1);
  std::uniform_int_distribution<int> jitter(0, 3);

  std::vector<TimedCommand> out;
  Time clock = 0;
  std::vector<std::uint8_t> line(g.cacheline_bytes, 0x5A);
  while (out.size() < length) {
    const int b = bank_pick(rng);
    const BankState& bank = m.bank(b);
    Command cmd;
    if (bank.phase == BankPhase::Precharged) {
      cmd = Command::act(b, sub_pick(rng), row_pick(rng));
    } else {
      switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0:
          cmd = Command::rd(b, col_pick(rng));
          break;
        case 1:
          cmd = Command::wr(b, col_pick(rng));
          break;
        case 2:
          cmd = Command::pre(b);
          break;
        case 3:
          // Second activation of another row in the open subarray, legal
          // only while the bank is still armed.
          cmd = Command::act(b, bank.open_subarray, row_pick(rng));
          break;
        default: {
          const int other = bank_pick(rng);
          if (other == b || m.bank(other).phase == BankPhase::Precharged) {
            cmd = Command::pre(b);
          } else {
            cmd = Command::transfer(b, col_pick(rng), other, col_pick(rng));
          }
          break;
        }
      }
    }
    const Legality legal = m.earliest_issue(cmd, clock);
    if (!legal.ok) continue;
    Time at = legal.time;
    if (jitter(rng) == 0) at += std::uniform_int_distribution<Time>(0, 4 * kT.tCK)(rng);
    m.apply(cmd, at, cmd.kind == CommandKind::Write ? std::span<const std::uint8_t>(line)
                                                    : std::span<const std::uint8_t>{});
    out.push_back({cmd, at});
    // Let time crawl forward so schedules are not a single burst.
    clock = at;
  }
  return out;
}

// A short legal sequence with one command of each flavor, used as the base
// for the mutation cases. Index layout:
//   0 ACT b0   1 RD b0    2 RD b0    3 WR b0    4 PRE b0   5 ACT b0
//   6..9 ACT b1..b4
std::vector<TimedCommand> mutation_base() {
  std::vector<TimedCommand> s;
  const Time act = 0;
  s.push_back({Command::act(0, 0, 0), act});
  const Time rd1 = act + kT.tRCD;
  s.push_back({Command::rd(0, 0), rd1});
  const Time rd2 = rd1 + kT.tCCD;
  s.push_back({Command::rd(0, 1), rd2});
  const Time wr = rd2 + kT.tCCD;
  s.push_back({Command::wr(0, 2), wr});
  const Time pre = wr + kT.CWL + kT.tBURST + kT.tWR;
  s.push_back({Command::pre(0), pre});
  const Time act2 = std::max(pre + kT.tRP, act + kT.tRC);
  s.push_back({Command::act(0, 0, 1), act2});
  Time t = act2;
  for (int b = 1; b <= 4; ++b) {
    t += kT.tRRD;
    if (b == 4) t = std::max(t, act2 + kT.tFAW);
    s.push_back({Command::act(b, 0, 0), t});
  }
  return s;
}

void sort_by_issue(std::vector<TimedCommand>& s) {
  std::stable_sort(s.begin(), s.end(),
                   [](const TimedCommand& a, const TimedCommand& b) { return a.issue < b.issue; });
}

}  // namespace

TEST_CASE("random legal schedules pass the checker") {
  const Geometry toy = oracle::toy_geometry();
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto schedule = random_schedule(seed, 10 + seed % 30, toy);
    const auto violation = check_schedule(toy, kT, true, schedule);
    if (violation) {
      CAPTURE(seed);
      CAPTURE(violation->index);
      CAPTURE(violation->constraint);
      CAPTURE(violation->detail);
      REQUIRE(!violation);
    }
    checked += schedule.size();
  }
  CHECK(checked > 100000);
}

TEST_CASE("mutation base is clean") {
  const auto base = mutation_base();
  CHECK(!check_schedule(Geometry{}, kT, true, base));
}

TEST_CASE("tRAS violation is named") {
  auto s = mutation_base();
  // Precharge too soon after the activate at index 5: append a precharge
  // before tRAS has elapsed.
  s.push_back({Command::pre(0), s[5].issue + kT.tRAS - kT.tCK});
  sort_by_issue(s);
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->constraint == "tRAS");
}

TEST_CASE("tRC violation is named") {
  // Precharge at exactly tRAS puts the tRP and tRC floors at the same
  // instant; pulling the reopening activate forward breaks both, and the
  // checker must attribute the row cycle first.
  std::vector<TimedCommand> s = {{Command::act(0, 0, 0), 0},
                                 {Command::pre(0), kT.tRAS},
                                 {Command::act(0, 0, 1), kT.tRC}};
  CHECK(!check_schedule(Geometry{}, kT, true, s));
  s[2].issue -= kT.tCK;
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 2);
  CHECK(v->constraint == "tRC");
}

TEST_CASE("tRCD violation is named") {
  auto s = mutation_base();
  s[1].issue -= kT.tCK;
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 1);
  CHECK(v->constraint == "tRCD");
}

TEST_CASE("tCCD violation is named") {
  auto s = mutation_base();
  s[2].issue -= kT.tCK;
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 2);
  CHECK(v->constraint == "tCCD");
}

TEST_CASE("tFAW violation is named") {
  auto s = mutation_base();
  // The fifth activate within the rolling window of four.
  s[9].issue -= kT.tCK;
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 9);
  CHECK(v->constraint == "tFAW");
}

TEST_CASE("tWR violation is named") {
  auto s = mutation_base();
  // Precharge during write recovery but after tRAS and tRTP have passed.
  s[4].issue -= kT.tCK;
  const auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 4);
  CHECK(v->constraint == "tWR");
}

TEST_CASE("structural problems are reported") {
  // Column access to a precharged bank.
  std::vector<TimedCommand> s = {{Command::rd(0, 0), 0}};
  auto v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->constraint == "state");

  // Out-of-order input: both reads are individually legal but arrive with
  // decreasing issue times.
  s = {{Command::act(0, 0, 0), 0},
       {Command::rd(0, 1), 2 * kT.tRCD},
       {Command::rd(0, 0), kT.tRCD}};
  v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->index == 2);
  CHECK(v->constraint == "order");

  // Second activation crossing a subarray.
  s = {{Command::act(0, 0, 0), 0}, {Command::act(0, 1, 0), kT.tRAS}};
  v = check_schedule(Geometry{}, kT, true, s);
  REQUIRE(v);
  CHECK(v->constraint == "fpm_cross_subarray");

  // Second activation with fpm disabled.
  s = {{Command::act(0, 0, 0), 0}, {Command::act(0, 0, 1), kT.tRAS}};
  CHECK(!check_schedule(Geometry{}, kT, true, s));
  v = check_schedule(Geometry{}, kT, false, s);
  REQUIRE(v);
  CHECK(v->constraint == "state");
}
