#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rowsim/cache.hpp"
#include "rowsim/controller.hpp"
#include "rowsim/page_table.hpp"
#include "rowsim/trace.hpp"

namespace rowsim {

/// Sparse byte-addressable memory used as the architectural reference: it
/// always holds the newest value of every byte, regardless of where that
/// value currently lives in the simulated machine.
class FlatMemory {
 public:
  explicit FlatMemory(std::uint32_t page_bytes);

  std::uint8_t byte(Addr a) const;
  void read(Addr a, std::span<std::uint8_t> out) const;
  void write(Addr a, std::span<const std::uint8_t> data);
  void fill(Addr a, std::uint64_t len, std::uint8_t value);

  /// Source and destination must not overlap.
  void copy(Addr src, Addr dst, std::uint64_t len);

 private:
  std::uint32_t page_bytes_;
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> pages_;
};

struct SystemConfig {
  AddressMapping mapping;
  MechanismFlags flags;
  SchedulingPolicy policy = SchedulingPolicy::Fifo;
  bool cache_enabled = true;
  CacheConfig cache;
  bool zi = false;  ///< install zero and copied lines into the cache in place
  std::uint64_t seed = 1;
};

struct SystemStats {
  std::uint64_t records = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t fills = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t zero_lines_installed = 0;    ///< lines turned CleanZero by a bulk zero
  std::uint64_t copy_lines_installed = 0;    ///< lines copied cache-to-cache by a bulk copy
  std::uint64_t processes = 1;
  PageTableStats page_table;
};

struct SystemResult {
  Timeline timeline;
  SystemStats stats;
};

/// Executes a trace in two phases. The first phase walks the records in
/// order, keeping the page tables, the cache and the architectural memory
/// up to date instantly; every DRAM-visible action it decides on (misses,
/// writebacks, bulk copies and zeroes, copy-on-write duplications) becomes a
/// timed controller request. The second phase hands the request stream to
/// the controller, which schedules real commands and evolves the DRAM
/// contents through row buffers and transfers.
///
/// Trace addresses are virtual. First touch maps a page to the identical
/// physical frame when it is free; copy-on-write faults allocate near the
/// old frame so that page copies can stay within one subarray. Which
/// requests get emitted depends only on the cache configuration and the zi
/// flag, never on rowclone, fpm or psm, so runs that differ only in those
/// flags see identical request streams.
class System {
 public:
  System(const Geometry& g, const Timing& t, const SystemConfig& cfg);

  /// Processes all records and schedules the resulting requests.
  SystemResult run(std::span<const TraceRecord> trace);

  /// Bulk copy between virtual ranges, split at page boundaries. The ranges
  /// must not overlap. `at` must not precede earlier activity.
  void memcopy(Addr vsrc, Addr vdst, std::uint64_t len, Time at);

  /// Bulk initialize a virtual range. Zero uses the bulk zero path; any
  /// other value seeds the first row over the channel and copies it to the
  /// remaining rows.
  void meminit(Addr vdst, std::uint64_t len, std::uint8_t value, Time at);

  /// Schedules everything emitted so far. Call once, after the last record.
  SystemResult finish();

  /// Byte the machine would return now: the cache when the line is
  /// resident, the DRAM contents otherwise. Physical address.
  std::uint8_t observable_byte(Addr paddr) const;

  /// Byte of the architectural reference memory. Physical address.
  std::uint8_t reference_byte(Addr paddr) const;

  const PageTable& page_table() const { return pt_; }
  const Cache& cache() const { return cache_; }
  const Controller& controller() const { return ctl_; }
  const SystemStats& stats() const { return stats_; }

 private:
  void process(const TraceRecord& rec);
  void emit(BulkRequest req, Time at);
  void handle_eviction(std::optional<Eviction> ev, Time at);
  void line_write(Addr paddr, std::span<const std::uint8_t> payload, Time at);
  void line_read(Addr paddr, Time at);
  void bulk_copy(Addr psrc, Addr pdst, std::uint64_t len, Origin origin, Time at);
  void bulk_zero(Addr pdst, std::uint64_t len, Time at);
  void cow_copy(std::uint64_t old_frame, std::uint64_t new_frame, Time at);
  Addr resolve_read(Addr vaddr, Time at);
  Addr resolve_write(Addr vaddr, Time at);

  Geometry geom_;
  SystemConfig cfg_;
  Controller ctl_;
  PageTable pt_;
  Cache cache_;
  FlatMemory ref_;
  SystemStats stats_;
  std::vector<BulkRequest> pending_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t record_index_ = 0;
  bool finished_ = false;
};

}  // namespace rowsim
