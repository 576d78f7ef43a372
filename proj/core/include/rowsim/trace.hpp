#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rowsim/types.hpp"

namespace rowsim {

/// One trace line. Records are kept in file order with resolved arrival
/// times in picoseconds.
///
///   @<ns>        optional timestamp prefix on any record
///   R <addr>     single line read
///   W <addr>     single line write
///   C <src> <dst> <len>   bulk copy
///   Z <dst> <len>         bulk zero
///   F            fork the youngest process
///   CW <vpage>   write one line in the youngest process's page
///
/// Addresses accept 0x-prefixed hex or decimal and must be line aligned.
/// Text after '#' is a comment. Records without a timestamp arrive a fixed
/// gap after the previous record.
enum class TraceOp : std::uint8_t { Read, Write, Copy, Zero, Fork, CowWrite };

const char* to_string(TraceOp op);

struct TraceRecord {
  TraceOp op = TraceOp::Read;
  Time at = 0;  ///< Arrival in picoseconds.
  Addr addr = 0;
  Addr src = 0;
  Addr dst = 0;
  std::uint64_t len = 0;
  std::uint64_t vpage = 0;
  std::uint32_t line = 0;  ///< 1-based source line, 0 for generated records.
};

/// Field-wise equality, ignoring the source line.
bool operator==(const TraceRecord& a, const TraceRecord& b);

/// Parses trace text. Addresses and lengths must be multiples of
/// `line_bytes`; timestamps must not decrease. Untimed records arrive
/// `default_gap` after their predecessor. Throws TraceError with the
/// offending 1-based line.
std::vector<TraceRecord> parse_trace(std::string_view text, std::uint32_t line_bytes,
                                     Time default_gap = 0);

std::string serialize_trace(std::span<const TraceRecord> records);

/// Reads and parses a trace file.
std::vector<TraceRecord> load_trace(const std::string& path, std::uint32_t line_bytes,
                                    Time default_gap = 0);

/// SplitMix64 step, used to derive deterministic write payloads.
std::uint64_t splitmix64(std::uint64_t x);

/// Fills `out` with a pattern determined by (seed, addr, seq). The same
/// triple always yields the same bytes.
void fill_pattern(std::span<std::uint8_t> out, std::uint64_t seed, Addr addr, std::uint64_t seq);

/// Fork workload: pre-fault a range of pages, fork, then revisit a fraction
/// of the pages with copy-on-write writes, interleaved with reads of random
/// pre-faulted lines.
struct ForkbenchParams {
  std::uint64_t num_pages = 16384;
  double write_fraction = 0.1;
  std::uint64_t page_bytes = 4096;
  std::uint32_t line_bytes = 64;
  double gap_ns = 1.0;
  std::uint64_t seed = 1;
};

std::vector<TraceRecord> gen_forkbench(const ForkbenchParams& p);

/// Bulk zeroing workload: zero whole pages at a fixed stride.
struct BulkzeroParams {
  std::uint64_t pages = 64;
  std::uint64_t stride_pages = 1;
  std::uint64_t page_bytes = 4096;
  double gap_ns = 1.0;
};

std::vector<TraceRecord> gen_bulkzero(const BulkzeroParams& p);

}  // namespace rowsim
