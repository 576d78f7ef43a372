#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rowsim/address_map.hpp"
#include "rowsim/checker.hpp"
#include "rowsim/dram.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/request.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

// Feature switches for in-DRAM operations. fpm and psm only matter while
// rowclone is on; with rowclone off every bulk request runs over the channel.
struct MechanismFlags {
  bool rowclone = true;
  bool fpm = true;
  bool psm = true;
};

// Picks how a bulk request executes. In-DRAM mechanisms need whole-row
// operands: source, destination and length aligned to the row size. A copy
// runs as Fpm when every source/destination row pair shares one
// (bank, subarray); as Psm when every pair crosses banks; anything else,
// including same-bank cross-subarray pairs, falls back to the channel.
Mechanism select_mechanism(RequestKind kind, Addr src, Addr dst, std::uint64_t len,
                           const MechanismFlags& flags, const AddressMapping& m,
                           const Geometry& g);

enum class WriteSource : std::uint8_t {
  None,      // not a write
  Zeros,     // write an all-zero line
  Immediate, // write the request payload
  FromRead,  // write data returned by an earlier read of the same request
};

struct CompiledCommand {
  Command cmd;
  bool opens_row = false;  // ACT into a precharged bank; the scheduler may
                           // insert a precharge in front when the bank is open
  WriteSource data = WriteSource::None;
  std::int32_t read_index = -1;  // FromRead: ordinal of the sourcing read
};

// Expands a copy into device commands. Per row pair:
//   Fpm           [ACT src-row, ACT dst-row, PRE]; multi-row requests are
//                 emitted in cross-bank waves so independent banks overlap
//   Psm           [ACT src, ACT dst, one TRANSFER per line, PRE, PRE]
//   BaselineCopy  reads the source lines over the channel and writes them
//                 back; one activation pass per touched row
std::vector<CompiledCommand> compile_copy(Addr src, Addr dst, std::uint64_t len, Mechanism mech,
                                          const AddressMapping& m, const Geometry& g);

// Expands a zero request. FpmZero copies the reserved zero row onto each
// destination row with a back-to-back activation pair; BaselineZero writes
// zero lines over the channel. zero_row_reserved reflects whether the
// per-subarray zero rows exist; FpmZero without them is a compile error.
std::vector<CompiledCommand> compile_zero(Addr dst, std::uint64_t len, Mechanism mech,
                                          const AddressMapping& m, const Geometry& g,
                                          bool zero_row_reserved = true);

enum class SchedulingPolicy : std::uint8_t {
  Fifo,    // oldest ready command first
  FrFcfs,  // row-hit accesses first among equally ready commands
};

struct TimelineEntry {
  Command cmd;
  Time issue = 0;
  Time completion = 0;
  std::uint64_t request_seq = 0;
};

struct RequestRecord {
  std::uint64_t seq = 0;
  RequestKind kind = RequestKind::Read;
  Origin origin = Origin::Trace;
  OpClass op_class = OpClass::Access;
  Mechanism mechanism = Mechanism::BaselineCopy;
  bool has_mechanism = false;  // bulk requests only
  Addr addr = 0, src = 0, dst = 0;
  std::uint64_t len = 0;
  Time arrival = 0;
  Time start = kNoTime;  // first command issue
  Time end = kNoTime;    // last command completion
  std::uint64_t channel_bytes = 0;

  Time latency() const { return end - arrival; }
};

struct Timeline {
  std::vector<TimelineEntry> entries;  // in issue order
  std::vector<RequestRecord> requests; // in arrival order
  Time makespan = 0;
  std::uint64_t channel_bytes = 0;

  std::vector<TimedCommand> timed_commands() const;
};

struct ControllerConfig {
  AddressMapping mapping;
  SchedulingPolicy policy = SchedulingPolicy::Fifo;
  MechanismFlags flags;
};

// Turns bulk requests into timed command schedules against one DramModel.
//
// Scheduling model: each request's compiled commands issue in order; commands
// of different requests interleave across banks. A request claims every bank
// it will touch when its first command issues and releases each bank when its
// last command on it has issued, which keeps per-bank sequences from
// different requests from interleaving destructively. Requests whose address
// ranges overlap (read-write, write-write or write-read) execute in arrival
// order. The channel carries one data burst at a time; write data sourced
// from an earlier read may go on the channel only after that read's last data
// beat. The 64 oldest outstanding requests compete for each command slot.
// Arrival ties resolve by request sequence number, so a given request stream
// always produces one schedule.
class Controller {
 public:
  Controller(const Geometry& g, const Timing& t, const ControllerConfig& cfg);

  Mechanism select(const BulkRequest& req) const;

  // Runs the full request stream to completion. Requests must be sorted by
  // (arrival, seq).
  Timeline run(const std::vector<BulkRequest>& requests);

  const DramModel& dram() const { return dram_; }
  DramModel& dram() { return dram_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  Geometry geom_;
  Timing timing_;
  ControllerConfig cfg_;
  DramModel dram_;
};

}  // namespace rowsim
