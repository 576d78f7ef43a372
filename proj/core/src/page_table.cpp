#include "rowsim/page_table.hpp"

namespace rowsim {

PageTable::PageTable(const Geometry& g, const AddressMapping& m) : geom_(g), map_(m) {
  const std::uint64_t pages = g.total_pages();
  refcount_.assign(pages, 0);
  reserved_.assign(pages, false);
  free_.resize(static_cast<std::size_t>(g.num_banks) * g.subarrays_per_bank);
  for (std::uint64_t f = 0; f < pages; ++f) {
    const Location loc = page_location(f, map_, geom_);
    if (loc.row == zero_row_id(geom_)) {
      reserved_[f] = true;
      continue;
    }
    free_[list_key(f)].insert(f);
  }
  maps_.resize(1);
}

std::uint32_t PageTable::list_key(std::uint64_t frame) const {
  const Location loc = page_location(frame, map_, geom_);
  return loc.bank * geom_.subarrays_per_bank + loc.subarray;
}

bool PageTable::mapped(std::uint32_t proc, std::uint64_t vpage) const {
  return maps_.at(proc).count(vpage) != 0;
}

std::uint64_t PageTable::frame_of(std::uint32_t proc, std::uint64_t vpage) const {
  return maps_.at(proc).at(vpage).frame;
}

bool PageTable::writable(std::uint32_t proc, std::uint64_t vpage) const {
  return maps_.at(proc).at(vpage).writable;
}

std::uint64_t PageTable::take_frame(std::uint64_t frame) {
  free_[list_key(frame)].erase(frame);
  refcount_[frame] = 1;
  stats_.allocations++;
  return frame;
}

std::uint64_t PageTable::alloc(std::uint32_t hint_key) {
  if (!free_[hint_key].empty()) {
    stats_.hint_hits++;
    return take_frame(*free_[hint_key].begin());
  }
  stats_.hint_misses++;
  for (const auto& set : free_) {
    if (!set.empty()) return take_frame(*set.begin());
  }
  throw SimError(ErrorKind::Trace, "physical memory exhausted");
}

std::uint64_t PageTable::alloc_identity(std::uint64_t vpage) {
  if (vpage >= geom_.total_pages())
    throw ConfigError("address", "virtual page beyond physical capacity");
  if (!reserved_[vpage] && refcount_[vpage] == 0) {
    stats_.identity_allocations++;
    return take_frame(vpage);
  }
  return alloc(list_key(vpage));
}

std::uint64_t PageTable::translate_read(std::uint32_t proc, std::uint64_t vpage) {
  auto& table = maps_.at(proc);
  auto it = table.find(vpage);
  if (it != table.end()) return it->second.frame;
  const std::uint64_t frame = alloc_identity(vpage);
  table.emplace(vpage, Mapping{frame, true});
  return frame;
}

CowResult PageTable::write_fault(std::uint32_t proc, std::uint64_t vpage) {
  auto& table = maps_.at(proc);
  auto it = table.find(vpage);
  if (it == table.end()) {
    const std::uint64_t frame = alloc_identity(vpage);
    table.emplace(vpage, Mapping{frame, true});
    return {false, frame, frame};
  }
  Mapping& m = it->second;
  if (m.writable) return {false, m.frame, m.frame};
  if (refcount_[m.frame] == 1) {
    // Every other sharer already copied away; reclaim write permission.
    m.writable = true;
    return {false, m.frame, m.frame};
  }
  const std::uint64_t old_frame = m.frame;
  const std::uint64_t new_frame = alloc(list_key(old_frame));
  refcount_[old_frame]--;
  m.frame = new_frame;
  m.writable = true;
  stats_.cow_copies++;
  return {true, old_frame, new_frame};
}

void PageTable::fork() {
  auto parent_copy = maps_.at(youngest());
  for (auto& [vpage, m] : maps_.at(youngest())) {
    refcount_[m.frame]++;
    m.writable = false;
  }
  for (auto& [vpage, m] : parent_copy) m.writable = false;
  maps_.push_back(std::move(parent_copy));
  stats_.forks++;
}

std::uint32_t PageTable::refcount(std::uint64_t frame) const { return refcount_.at(frame); }

bool PageTable::is_zero_frame(std::uint64_t frame) const { return reserved_.at(frame); }

std::size_t PageTable::free_in_subarray(std::uint32_t bank, std::uint32_t subarray) const {
  return free_.at(static_cast<std::size_t>(bank) * geom_.subarrays_per_bank + subarray).size();
}

}  // namespace rowsim
