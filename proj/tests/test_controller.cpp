#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "rowsim/controller.hpp"

#include "oracles.hpp"

using namespace rowsim;

namespace {

const Timing kT = ddr3_1066_timing();
const Geometry kG;
const AddressMapping kM;

// Address of (bank, subarray, row) under the default mapping.
Addr row_addr(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row) {
  Location loc;
  loc.bank = static_cast<std::int32_t>(bank);
  loc.subarray = static_cast<std::int32_t>(subarray);
  loc.row = static_cast<std::int32_t>(row);
  loc.column = 0;
  loc.offset = 0;
  return compose_address(loc, kM, kG);
}

BulkRequest copy_req(Addr src, Addr dst, std::uint64_t len, Time at = 0,
                     std::uint64_t seq = 0) {
  BulkRequest r;
  r.kind = RequestKind::Copy;
  r.src = src;
  r.dst = dst;
  r.len = len;
  r.arrival = at;
  r.seq = seq;
  return r;
}

BulkRequest zero_req(Addr dst, std::uint64_t len, Time at = 0, std::uint64_t seq = 0) {
  BulkRequest r;
  r.kind = RequestKind::Zero;
  r.dst = dst;
  r.len = len;
  r.arrival = at;
  r.seq = seq;
  return r;
}

BulkRequest access_req(RequestKind kind, Addr addr, Time at = 0, std::uint64_t seq = 0) {
  BulkRequest r;
  r.kind = kind;
  r.addr = addr;
  r.len = kG.cacheline_bytes;
  r.arrival = at;
  r.seq = seq;
  if (kind == RequestKind::Write) r.payload.assign(kG.cacheline_bytes, 0xCD);
  return r;
}

Timeline run_one(const BulkRequest& req, MechanismFlags flags = {},
                 SchedulingPolicy policy = SchedulingPolicy::Fifo) {
  ControllerConfig cfg;
  cfg.flags = flags;
  cfg.policy = policy;
  Controller ctl(kG, kT, cfg);
  std::vector<BulkRequest> reqs = {req};
  return ctl.run(reqs);
}

void require_checker_clean(const Timeline& tl, bool fpm) {
  const auto commands = tl.timed_commands();
  const auto violation = check_schedule(kG, kT, fpm, commands);
  if (violation) {
    CAPTURE(violation->index);
    CAPTURE(violation->constraint);
    CAPTURE(violation->detail);
    REQUIRE(!violation);
  }
}

}  // namespace

TEST_CASE("mechanism selection by operand placement") {
  const MechanismFlags on;
  const std::uint64_t row = kG.row_size_bytes;

  // Whole rows of one subarray.
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(0, 0, 1), row, on, kM,
                         kG) == Mechanism::Fpm);
  // Whole rows across banks.
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(1, 0, 0), row, on, kM,
                         kG) == Mechanism::Psm);
  // Same bank, different subarray: no shared row buffer, no internal bus.
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(0, 1, 0), row, on, kM,
                         kG) == Mechanism::BaselineCopy);
  // Misaligned or partial operands stay on the channel.
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0) + kG.cacheline_bytes,
                         row_addr(0, 0, 1), row, on, kM, kG) == Mechanism::BaselineCopy);
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(0, 0, 1), row / 2, on,
                         kM, kG) == Mechanism::BaselineCopy);

  CHECK(select_mechanism(RequestKind::Zero, 0, row_addr(0, 0, 1), row, on, kM, kG) ==
        Mechanism::FpmZero);
  CHECK(select_mechanism(RequestKind::Zero, 0, row_addr(0, 0, 1), row / 2, on, kM, kG) ==
        Mechanism::BaselineZero);

  MechanismFlags off;
  off.rowclone = false;
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(0, 0, 1), row, off, kM,
                         kG) == Mechanism::BaselineCopy);
  CHECK(select_mechanism(RequestKind::Zero, 0, row_addr(0, 0, 1), row, off, kM, kG) ==
        Mechanism::BaselineZero);

  MechanismFlags no_fpm;
  no_fpm.fpm = false;
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(0, 0, 1), row, no_fpm,
                         kM, kG) == Mechanism::BaselineCopy);
  MechanismFlags no_psm;
  no_psm.psm = false;
  CHECK(select_mechanism(RequestKind::Copy, row_addr(0, 0, 0), row_addr(1, 0, 0), row, no_psm,
                         kM, kG) == Mechanism::BaselineCopy);
}

TEST_CASE("fpm copy compiles to an activation pair and precharge") {
  const auto cmds = compile_copy(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes,
                                 Mechanism::Fpm, kM, kG);
  REQUIRE(cmds.size() == 3);
  CHECK(cmds[0].cmd.kind == CommandKind::Act);
  CHECK(cmds[0].cmd.row == 0);
  CHECK(cmds[0].opens_row);
  CHECK(cmds[1].cmd.kind == CommandKind::Act);
  CHECK(cmds[1].cmd.row == 1);
  CHECK(!cmds[1].opens_row);
  CHECK(cmds[2].cmd.kind == CommandKind::Pre);
}

TEST_CASE("psm copy compiles to transfers between two open banks") {
  const auto cmds = compile_copy(row_addr(0, 0, 0), row_addr(1, 2, 3), kG.row_size_bytes,
                                 Mechanism::Psm, kM, kG);
  const std::uint32_t lines = kG.lines_per_row();
  REQUIRE(cmds.size() == 2 + lines + 2);
  CHECK(cmds[0].cmd.kind == CommandKind::Act);
  CHECK(cmds[1].cmd.kind == CommandKind::Act);
  for (std::uint32_t i = 0; i < lines; ++i) {
    CHECK(cmds[2 + i].cmd.kind == CommandKind::Transfer);
    CHECK(cmds[2 + i].cmd.bank == 0);
    CHECK(cmds[2 + i].cmd.dst_bank == 1);
    CHECK(cmds[2 + i].cmd.column == static_cast<std::int32_t>(i));
  }
  CHECK(cmds[2 + lines].cmd.kind == CommandKind::Pre);
  CHECK(cmds[3 + lines].cmd.kind == CommandKind::Pre);
}

TEST_CASE("baseline copy reads every line and writes it from the read data") {
  const auto cmds = compile_copy(row_addr(0, 0, 0), row_addr(0, 1, 0), kG.row_size_bytes,
                                 Mechanism::BaselineCopy, kM, kG);
  const std::uint32_t lines = kG.lines_per_row();
  std::uint32_t reads = 0, writes = 0;
  for (const auto& c : cmds) {
    if (c.cmd.kind == CommandKind::Read) ++reads;
    if (c.cmd.kind == CommandKind::Write) {
      CHECK(c.data == WriteSource::FromRead);
      CHECK(c.read_index == static_cast<std::int32_t>(writes));
      ++writes;
    }
  }
  CHECK(reads == lines);
  CHECK(writes == lines);
}

TEST_CASE("fpm zero copies the reserved row; compile refuses without it") {
  const Addr dst = row_addr(2, 3, 4);
  const auto cmds = compile_zero(dst, kG.row_size_bytes, Mechanism::FpmZero, kM, kG);
  REQUIRE(cmds.size() == 3);
  CHECK(cmds[0].cmd.kind == CommandKind::Act);
  CHECK(cmds[0].cmd.row == static_cast<std::int32_t>(zero_row_id(kG)));
  CHECK(cmds[1].cmd.kind == CommandKind::Act);
  CHECK(cmds[1].cmd.row == 4);
  CHECK(cmds[2].cmd.kind == CommandKind::Pre);

  CHECK_THROWS_AS(
      compile_zero(dst, kG.row_size_bytes, Mechanism::FpmZero, kM, kG, false),
      InternalError);
  // Zeroing the reserved row itself with its own copy would be circular.
  CHECK_THROWS_AS(compile_zero(row_addr(0, 0, zero_row_id(kG)), kG.row_size_bytes,
                               Mechanism::FpmZero, kM, kG),
                  InternalError);
}

TEST_CASE("single fpm copy latency equals the closed form") {
  const Timeline tl = run_one(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes));
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::fpm_row_copy(kT));
  CHECK(tl.requests[0].mechanism == Mechanism::Fpm);
  CHECK(tl.requests[0].channel_bytes == 0);
  CHECK(tl.channel_bytes == 0);
  require_checker_clean(tl, true);
}

TEST_CASE("single psm copy latency equals the closed form") {
  const Timeline tl = run_one(copy_req(row_addr(0, 0, 0), row_addr(1, 0, 0), kG.row_size_bytes));
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::psm_row_copy(kT, kG.lines_per_row()));
  CHECK(tl.requests[0].mechanism == Mechanism::Psm);
  CHECK(tl.channel_bytes == 0);
  require_checker_clean(tl, true);
}

TEST_CASE("single fpm zero latency equals the fpm copy closed form") {
  const Timeline tl = run_one(zero_req(row_addr(0, 0, 2), kG.row_size_bytes));
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::fpm_row_copy(kT));
  CHECK(tl.requests[0].mechanism == Mechanism::FpmZero);
  CHECK(tl.channel_bytes == 0);
  require_checker_clean(tl, true);
}

TEST_CASE("baseline zero latency equals the closed form and moves a row of bytes") {
  MechanismFlags off;
  off.rowclone = false;
  const Timeline tl = run_one(zero_req(row_addr(0, 0, 2), kG.row_size_bytes), off);
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::baseline_row_zero(kT, kG.lines_per_row()));
  CHECK(tl.requests[0].mechanism == Mechanism::BaselineZero);
  CHECK(tl.channel_bytes == kG.row_size_bytes);
  require_checker_clean(tl, false);
}

TEST_CASE("baseline intra-subarray copy latency equals the closed form") {
  MechanismFlags off;
  off.rowclone = false;
  const Timeline tl =
      run_one(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes), off);
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::baseline_same_bank_copy(kT, kG.lines_per_row()));
  CHECK(tl.channel_bytes == 2 * kG.row_size_bytes);
  require_checker_clean(tl, false);
}

TEST_CASE("baseline cross-bank copy latency equals the closed form") {
  MechanismFlags off;
  off.rowclone = false;
  const Timeline tl =
      run_one(copy_req(row_addr(0, 0, 0), row_addr(1, 0, 0), kG.row_size_bytes), off);
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::baseline_cross_bank_copy(kT, kG.lines_per_row()));
  CHECK(tl.channel_bytes == 2 * kG.row_size_bytes);
  require_checker_clean(tl, false);
}

TEST_CASE("single read latency equals the closed form") {
  const Timeline tl = run_one(access_req(RequestKind::Read, 5 * kG.cacheline_bytes));
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.requests[0].latency() == oracle::single_read(kT));
  CHECK(tl.requests[0].channel_bytes == kG.cacheline_bytes);
  require_checker_clean(tl, true);
}

TEST_CASE("copies move the right bytes") {
  ControllerConfig cfg;
  Controller ctl(kG, kT, cfg);
  auto& image = ctl.dram().image();
  auto& src_row = image.mutable_row(0, 0, 0);
  for (std::size_t i = 0; i < src_row.size(); ++i)
    src_row[i] = static_cast<std::uint8_t>(i * 17 + 3);

  std::vector<BulkRequest> reqs;
  reqs.push_back(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes, 0, 0));
  reqs.push_back(copy_req(row_addr(0, 0, 0), row_addr(1, 0, 0), kG.row_size_bytes, 0, 1));
  const Timeline tl = ctl.run(reqs);
  REQUIRE(tl.requests.size() == 2);
  for (std::uint32_t off = 0; off < kG.row_size_bytes; ++off) {
    CHECK(image.byte_at(0, 0, 1, off) == src_row[off]);
    CHECK(image.byte_at(1, 0, 0, off) == src_row[off]);
  }
  require_checker_clean(tl, true);
}

TEST_CASE("contiguous multi-row fpm copy overlaps across banks") {
  // Under the default mapping eight consecutive pages stripe across the
  // eight banks, so one 32 KB copy forms a single wave of independent
  // activation pairs instead of serializing on one bank.
  const std::uint64_t rows = 8;
  const Timeline tl =
      run_one(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 8), rows * kG.row_size_bytes));
  REQUIRE(tl.requests.size() == 1);
  CHECK(tl.makespan >= oracle::fpm_row_copy(kT));
  CHECK(tl.makespan < 3 * oracle::fpm_row_copy(kT));
  CHECK(tl.channel_bytes == 0);
  require_checker_clean(tl, true);
}

TEST_CASE("copies sharing one bank serialize at the row cycle") {
  // Eight single-page copies pinned to one (bank, subarray): ownership and
  // the activation rules force one full copy cycle per page.
  std::vector<BulkRequest> reqs;
  for (std::uint32_t r = 0; r < 8; ++r)
    reqs.push_back(
        copy_req(row_addr(0, 0, 2 * r), row_addr(0, 0, 2 * r + 1), kG.row_size_bytes, 0, r));
  ControllerConfig cfg;
  Controller ctl(kG, kT, cfg);
  const Timeline tl = ctl.run(reqs);
  CHECK(tl.makespan == 8 * oracle::fpm_row_copy(kT));
  require_checker_clean(tl, true);
}

TEST_CASE("multi-row fpm copy across banks overlaps") {
  // 4 KB pages in eight different banks: activation pairs in different banks
  // overlap, gated by tRRD and tFAW rather than the full row cycle.
  std::vector<BulkRequest> reqs;
  for (std::uint32_t b = 0; b < 8; ++b)
    reqs.push_back(copy_req(row_addr(b, 0, 0), row_addr(b, 0, 1), kG.row_size_bytes, 0, b));
  ControllerConfig cfg;
  Controller ctl(kG, kT, cfg);
  const Timeline tl = ctl.run(reqs);
  CHECK(tl.makespan < 8 * oracle::fpm_row_copy(kT));
  require_checker_clean(tl, true);
}

TEST_CASE("overlapping requests execute in arrival order") {
  // A write, a copy reading the written row, and a read of the copy's
  // destination; all overlap, so the final read must observe the write.
  ControllerConfig cfg;
  Controller ctl(kG, kT, cfg);
  std::vector<BulkRequest> reqs;
  BulkRequest w = access_req(RequestKind::Write, row_addr(0, 0, 0), 0, 0);
  w.payload.assign(kG.cacheline_bytes, 0x77);
  reqs.push_back(w);
  reqs.push_back(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes, 0, 1));
  reqs.push_back(access_req(RequestKind::Read, row_addr(0, 0, 1), 0, 2));
  const Timeline tl = ctl.run(reqs);

  CHECK(ctl.dram().image().byte_at(0, 0, 1, 0) == 0x77);
  // The read's first command must start after the copy's last completion
  // command issue; end times are easier to compare.
  CHECK(tl.requests[2].start >= tl.requests[1].start);
  CHECK(tl.requests[1].start >= tl.requests[0].start);
  require_checker_clean(tl, true);
}

TEST_CASE("under fr-fcfs independent requests pass a blocked older one") {
  // Request 0 and 1 touch bank 0; request 2 touches bank 1 and arrives last
  // but need not wait for them. Strict FIFO serves it last instead.
  auto make = [&](SchedulingPolicy policy) {
    std::vector<BulkRequest> reqs;
    reqs.push_back(copy_req(row_addr(0, 0, 0), row_addr(0, 0, 1), kG.row_size_bytes, 0, 0));
    reqs.push_back(copy_req(row_addr(0, 0, 2), row_addr(0, 0, 3), kG.row_size_bytes, 0, 1));
    reqs.push_back(copy_req(row_addr(1, 0, 0), row_addr(1, 0, 1), kG.row_size_bytes, 0, 2));
    ControllerConfig cfg;
    cfg.policy = policy;
    Controller ctl(kG, kT, cfg);
    return ctl.run(reqs);
  };
  const Timeline frfcfs = make(SchedulingPolicy::FrFcfs);
  CHECK(frfcfs.requests[2].end < frfcfs.requests[1].end);
  require_checker_clean(frfcfs, true);

  const Timeline fifo = make(SchedulingPolicy::Fifo);
  CHECK(fifo.requests[2].end > fifo.requests[1].end);
  require_checker_clean(fifo, true);
}

TEST_CASE("fr-fcfs prefers row hits") {
  // Three reads: two to the same row, one to a different row of the same
  // bank, arriving between them. FR-FCFS serves both row hits before
  // closing the row; FIFO pays an extra row cycle.
  auto make = [&](SchedulingPolicy policy) {
    std::vector<BulkRequest> reqs;
    reqs.push_back(access_req(RequestKind::Read, row_addr(0, 0, 0), 0, 0));
    reqs.push_back(access_req(RequestKind::Read, row_addr(0, 0, 1), 0, 1));
    BulkRequest hit = access_req(RequestKind::Read, row_addr(0, 0, 0) + kG.cacheline_bytes,
                                 0, 2);
    reqs.push_back(hit);
    ControllerConfig cfg;
    cfg.policy = policy;
    Controller ctl(kG, kT, cfg);
    return ctl.run(reqs);
  };
  const Timeline fifo = make(SchedulingPolicy::Fifo);
  const Timeline frfcfs = make(SchedulingPolicy::FrFcfs);
  CHECK(frfcfs.makespan < fifo.makespan);
  require_checker_clean(frfcfs, true);
  require_checker_clean(fifo, true);
}

TEST_CASE("requests and entries are consistently accounted") {
  std::vector<BulkRequest> reqs;
  reqs.push_back(copy_req(row_addr(0, 0, 0), row_addr(1, 0, 0), kG.row_size_bytes, 0, 0));
  reqs.push_back(zero_req(row_addr(2, 0, 0), kG.row_size_bytes, 1000, 1));
  reqs.push_back(access_req(RequestKind::Read, row_addr(3, 0, 0), 2000, 2));
  ControllerConfig cfg;
  Controller ctl(kG, kT, cfg);
  const Timeline tl = ctl.run(reqs);

  REQUIRE(tl.requests.size() == 3);
  std::set<std::uint64_t> seqs;
  for (const auto& e : tl.entries) seqs.insert(e.request_seq);
  CHECK(seqs == std::set<std::uint64_t>{0, 1, 2});
  Time prev = 0;
  Time latest = 0;
  for (const auto& e : tl.entries) {
    CHECK(e.issue >= prev);
    prev = e.issue;
    latest = std::max(latest, e.completion);
  }
  CHECK(tl.makespan == latest);
  CHECK(tl.channel_bytes == ctl.dram().channel_bytes());
}
