#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rowsim/geometry.hpp"

namespace rowsim {

// Byte-accurate contents of every DRAM row, stored sparsely. Rows that were
// never written read as all zeros without being materialized.
class MemoryImage {
 public:
  explicit MemoryImage(const Geometry& g);

  std::span<const std::uint8_t> row(std::uint32_t bank, std::uint32_t subarray,
                                    std::uint32_t row) const;
  std::vector<std::uint8_t>& mutable_row(std::uint32_t bank, std::uint32_t subarray,
                                         std::uint32_t row);

  // Byte at a flat (bank, subarray, row, offset) location, zeros when the
  // row was never touched.
  std::uint8_t byte_at(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row,
                       std::uint32_t offset) const;

  std::size_t materialized_rows() const { return rows_.size(); }

 private:
  std::uint64_t key(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row) const;

  const Geometry geom_;
  std::vector<std::uint8_t> zero_row_;
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> rows_;
};

}  // namespace rowsim
