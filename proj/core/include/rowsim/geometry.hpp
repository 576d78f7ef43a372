#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rowsim/types.hpp"

namespace rowsim {

// Physical organization of one memory channel. Counts are powers of two so
// that the address mapping stays a pure bit-field split.
struct Geometry {
  std::uint32_t num_banks = 8;
  std::uint32_t subarrays_per_bank = 64;
  std::uint32_t rows_per_subarray = 512;
  std::uint32_t row_size_bytes = 4096;
  std::uint32_t cacheline_bytes = 64;

  std::uint32_t lines_per_row() const { return row_size_bytes / cacheline_bytes; }
  std::uint64_t rows_per_bank() const {
    return static_cast<std::uint64_t>(subarrays_per_bank) * rows_per_subarray;
  }
  std::uint64_t total_rows() const { return rows_per_bank() * num_banks; }
  std::uint64_t total_bytes() const { return total_rows() * row_size_bytes; }
  std::uint64_t total_pages() const { return total_rows(); }
};

// Row reserved in every subarray, pre-initialized to zero and excluded from
// allocation, used as the copy source for in-DRAM zeroing.
inline std::uint32_t zero_row_id(const Geometry& g) { return g.rows_per_subarray - 1; }

// Device timing in picoseconds. Field names follow the usual DDR datasheet
// abbreviations.
struct Timing {
  Time tCK = 1875;      ///< clock period
  Time tRCD = 13125;    ///< ACT to first column command, same bank
  Time tRP = 13125;     ///< PRE to next ACT, same bank
  Time tRAS = 37500;    ///< ACT to PRE, same bank (row restore)
  Time tRC = 50625;     ///< ACT to ACT, same bank, through a precharge
  Time CL = 13125;      ///< read command to first data beat
  Time CWL = 11250;     ///< write command to first data beat
  Time tBURST = 7500;   ///< data bus occupancy of one burst
  Time tCCD = 7500;     ///< column command to column command, same type
  Time tRRD = 7500;     ///< ACT to ACT, different banks
  Time tFAW = 37500;    ///< window that may contain at most four ACTs
  Time tWR = 15000;     ///< end of write data to PRE, same bank
  Time tRTP = 7500;     ///< read command to PRE, same bank
};

// DDR3-1066 7-7-7 grade timing, the configuration all defaults are stated in.
inline Timing ddr3_1066_timing() { return Timing{}; }

struct ValidationIssue {
  std::string field;
  std::string reason;
};

// Returns the first violated structural invariant, or nullopt when the
// configuration is usable. Geometry counts must be nonzero powers of two,
// the row size a multiple of the cacheline size, all timings positive,
// tRC consistent with tRAS + tRP to within one tCK, tCCD >= tBURST and
// tFAW >= tRRD.
std::optional<ValidationIssue> validate_geometry(const Geometry& g);
std::optional<ValidationIssue> validate_timing(const Timing& t);

}  // namespace rowsim
