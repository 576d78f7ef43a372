#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rowsim/geometry.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

/// State of one cache line. CleanZero lines hold all-zero data that matches
/// memory, so they can be dropped without a writeback just like Clean lines.
enum class LineState : std::uint8_t { Invalid, Clean, Dirty, CleanZero };

const char* to_string(LineState s);

struct CacheConfig {
  std::uint64_t capacity_bytes = 512 * 1024;
  std::uint32_t associativity = 8;
  std::uint32_t line_bytes = 64;
};

std::vector<ValidationIssue> validate_cache(const CacheConfig& cfg);

/// Line displaced by an insertion. Only dirty victims carry data the caller
/// must write back.
struct Eviction {
  Addr addr = 0;
  bool dirty = false;
  std::vector<std::uint8_t> data;
};

/// Set-associative write-back cache over physical line addresses. The cache
/// stores line data itself; miss handling (fills, writebacks) is the
/// caller's job, driven by the return values.
class Cache {
 public:
  explicit Cache(const CacheConfig& cfg);

  std::uint32_t num_sets() const { return num_sets_; }
  std::uint32_t line_bytes() const { return cfg_.line_bytes; }

  /// State of the line, Invalid if absent. Does not touch recency.
  LineState probe(Addr line_addr) const;

  /// Data of a resident line, empty span if absent. Does not touch recency.
  std::span<const std::uint8_t> peek(Addr line_addr) const;

  /// Copies a resident line into `out` and refreshes recency. Returns false
  /// on a miss without changing anything.
  bool read(Addr line_addr, std::span<std::uint8_t> out);

  /// Overwrites a resident line, marks it Dirty and refreshes recency.
  /// Returns false on a miss without changing anything.
  bool write(Addr line_addr, std::span<const std::uint8_t> data);

  /// Installs a line. A resident line is overwritten in place; otherwise the
  /// least recently used way of a full set is evicted and returned.
  std::optional<Eviction> insert(Addr line_addr, std::span<const std::uint8_t> data,
                                 LineState state);

  /// Takes a dirty line's data for writeback and downgrades it to Clean.
  /// Returns nothing for absent or already clean lines.
  std::optional<std::vector<std::uint8_t>> clean(Addr line_addr);

  /// Drops a line without writeback. Returns whether it was resident.
  bool invalidate(Addr line_addr);

  std::uint64_t resident_lines() const;

 private:
  struct Line {
    LineState state = LineState::Invalid;
    Addr addr = 0;
    std::uint64_t stamp = 0;
    std::vector<std::uint8_t> data;
  };

  std::uint32_t set_of(Addr line_addr) const;
  Line* find(Addr line_addr);
  const Line* find(Addr line_addr) const;

  CacheConfig cfg_;
  std::uint32_t num_sets_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<Line> lines_;  // num_sets_ * associativity, set-major
};

}  // namespace rowsim
