#include "rowsim/memory_image.hpp"

namespace rowsim {

MemoryImage::MemoryImage(const Geometry& g) : geom_(g), zero_row_(g.row_size_bytes, 0) {}

std::uint64_t MemoryImage::key(std::uint32_t bank, std::uint32_t subarray,
                               std::uint32_t row) const {
  return (static_cast<std::uint64_t>(bank) * geom_.subarrays_per_bank + subarray) *
             geom_.rows_per_subarray +
         row;
}

std::span<const std::uint8_t> MemoryImage::row(std::uint32_t bank, std::uint32_t subarray,
                                               std::uint32_t row) const {
  auto it = rows_.find(key(bank, subarray, row));
  if (it == rows_.end()) return zero_row_;
  return it->second;
}

std::vector<std::uint8_t>& MemoryImage::mutable_row(std::uint32_t bank, std::uint32_t subarray,
                                                    std::uint32_t row) {
  auto [it, inserted] = rows_.try_emplace(key(bank, subarray, row));
  if (inserted) it->second.assign(geom_.row_size_bytes, 0);
  return it->second;
}

std::uint8_t MemoryImage::byte_at(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row,
                                  std::uint32_t offset) const {
  return this->row(bank, subarray, row)[offset];
}

}  // namespace rowsim
