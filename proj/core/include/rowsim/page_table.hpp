#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "rowsim/address_map.hpp"
#include "rowsim/geometry.hpp"

namespace rowsim {

/// Outcome of a write fault. When `copied` is set the caller must copy the
/// old frame's contents into the new frame before applying the write.
struct CowResult {
  bool copied = false;
  std::uint64_t old_frame = 0;
  std::uint64_t new_frame = 0;
};

struct PageTableStats {
  std::uint64_t allocations = 0;
  std::uint64_t identity_allocations = 0;
  std::uint64_t hint_hits = 0;    ///< Allocations that landed in the hinted subarray.
  std::uint64_t hint_misses = 0;  ///< Hinted subarray was exhausted, fell back elsewhere.
  std::uint64_t cow_copies = 0;
  std::uint64_t forks = 0;
};

/// Per-process page tables over one pool of physical frames. A frame is a
/// physical page index (address divided by row size). First touch maps a
/// virtual page to the identically numbered frame when that frame is
/// available, which keeps simple traces physically contiguous; otherwise a
/// frame is taken from the per-subarray free lists, preferring the hinted
/// subarray.
///
/// The last row of every subarray is reserved as the zero row and never
/// handed out. That holds regardless of which copy and zeroing features are
/// enabled, so placement never depends on the feature flags.
class PageTable {
 public:
  PageTable(const Geometry& g, const AddressMapping& m);

  std::uint32_t process_count() const { return static_cast<std::uint32_t>(maps_.size()); }
  std::uint32_t youngest() const { return process_count() - 1; }

  bool mapped(std::uint32_t proc, std::uint64_t vpage) const;
  std::uint64_t frame_of(std::uint32_t proc, std::uint64_t vpage) const;
  bool writable(std::uint32_t proc, std::uint64_t vpage) const;

  /// Translation for a read. First touch allocates.
  std::uint64_t translate_read(std::uint32_t proc, std::uint64_t vpage);

  /// Translation for a write. First touch allocates; a write to a shared
  /// frame allocates a fresh frame, preferring the old frame's subarray,
  /// and remaps this process to it.
  CowResult write_fault(std::uint32_t proc, std::uint64_t vpage);

  /// Clones the youngest process. Every frame mapped by it becomes shared:
  /// reference counts go up and both processes lose write permission.
  void fork();

  std::uint32_t refcount(std::uint64_t frame) const;
  bool is_zero_frame(std::uint64_t frame) const;
  std::size_t free_in_subarray(std::uint32_t bank, std::uint32_t subarray) const;

  const PageTableStats& stats() const { return stats_; }

 private:
  struct Mapping {
    std::uint64_t frame = 0;
    bool writable = true;
  };

  std::uint32_t list_key(std::uint64_t frame) const;
  std::uint64_t take_frame(std::uint64_t frame);
  std::uint64_t alloc(std::uint32_t hint_key);
  std::uint64_t alloc_identity(std::uint64_t vpage);

  Geometry geom_;
  AddressMapping map_;
  std::vector<std::uint32_t> refcount_;
  std::vector<bool> reserved_;
  std::vector<std::set<std::uint64_t>> free_;  // keyed bank * subarrays + subarray
  std::vector<std::unordered_map<std::uint64_t, Mapping>> maps_;
  PageTableStats stats_;
};

}  // namespace rowsim
