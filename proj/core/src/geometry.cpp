#include "rowsim/geometry.hpp"

#include <cstdlib>

namespace rowsim {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

std::optional<ValidationIssue> validate_geometry(const Geometry& g) {
  struct Field {
    const char* name;
    std::uint64_t value;
  };
  const Field counts[] = {
      {"num_banks", g.num_banks},
      {"subarrays_per_bank", g.subarrays_per_bank},
      {"rows_per_subarray", g.rows_per_subarray},
      {"row_size_bytes", g.row_size_bytes},
      {"cacheline_bytes", g.cacheline_bytes},
  };
  for (const auto& f : counts) {
    if (f.value == 0) return ValidationIssue{f.name, "must be nonzero"};
  }
  if (g.row_size_bytes % g.cacheline_bytes != 0)
    return ValidationIssue{"row_size_bytes", "not a multiple of cacheline_bytes"};
  for (const auto& f : counts) {
    if (!is_pow2(f.value)) return ValidationIssue{f.name, "must be a power of two"};
  }
  if (g.cacheline_bytes > g.row_size_bytes)
    return ValidationIssue{"cacheline_bytes", "larger than row_size_bytes"};
  // At least two rows per subarray are needed once one row per subarray is
  // reserved as the zero row.
  if (g.rows_per_subarray < 2)
    return ValidationIssue{"rows_per_subarray", "must be at least 2"};
  return std::nullopt;
}

std::optional<ValidationIssue> validate_timing(const Timing& t) {
  struct Field {
    const char* name;
    Time value;
  };
  const Field fields[] = {
      {"tCK", t.tCK},   {"tRCD", t.tRCD},     {"tRP", t.tRP},   {"tRAS", t.tRAS},
      {"tRC", t.tRC},   {"CL", t.CL},         {"CWL", t.CWL},   {"tBURST", t.tBURST},
      {"tCCD", t.tCCD}, {"tRRD", t.tRRD},     {"tFAW", t.tFAW}, {"tWR", t.tWR},
      {"tRTP", t.tRTP},
  };
  for (const auto& f : fields) {
    if (f.value <= 0) return ValidationIssue{f.name, "must be positive"};
  }
  if (std::llabs(t.tRC - (t.tRAS + t.tRP)) > t.tCK)
    return ValidationIssue{"tRC", "inconsistent with tRAS + tRP beyond one tCK"};
  if (t.tCCD < t.tBURST) return ValidationIssue{"tCCD", "smaller than tBURST"};
  if (t.tFAW < t.tRRD) return ValidationIssue{"tFAW", "smaller than tRRD"};
  return std::nullopt;
}

}  // namespace rowsim
