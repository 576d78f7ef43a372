#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rowsim/page_table.hpp"

#include "oracles.hpp"

using namespace rowsim;

namespace {

// 2 banks x 2 subarrays x 8 rows: 32 frames, 4 reserved zero rows, 28 usable.
const Geometry kG = oracle::toy_geometry();
const AddressMapping kM;

PageTable make_table() { return PageTable(kG, kM); }

Location frame_location(std::uint64_t frame) { return page_location(frame, kM, kG); }

bool same_subarray(std::uint64_t a, std::uint64_t b) {
  const Location la = frame_location(a);
  const Location lb = frame_location(b);
  return la.bank == lb.bank && la.subarray == lb.subarray;
}

}  // namespace

TEST_CASE("construction reserves one zero row per subarray") {
  auto pt = make_table();
  CHECK(pt.process_count() == 1);
  for (std::uint32_t b = 0; b < kG.num_banks; ++b)
    for (std::uint32_t s = 0; s < kG.subarrays_per_bank; ++s)
      CHECK(pt.free_in_subarray(b, s) == kG.rows_per_subarray - 1);

  std::uint32_t reserved = 0;
  for (std::uint64_t f = 0; f < kG.total_pages(); ++f) {
    if (pt.is_zero_frame(f)) {
      reserved++;
      CHECK(frame_location(f).row == static_cast<std::int32_t>(zero_row_id(kG)));
    }
  }
  CHECK(reserved == kG.num_banks * kG.subarrays_per_bank);
}

TEST_CASE("first touch maps a page to its identity frame") {
  auto pt = make_table();
  CHECK(!pt.mapped(0, 5));

  CHECK(pt.translate_read(0, 5) == 5);
  CHECK(pt.mapped(0, 5));
  CHECK(pt.frame_of(0, 5) == 5);
  CHECK(pt.writable(0, 5));
  CHECK(pt.refcount(5) == 1);
  CHECK(pt.stats().allocations == 1);
  CHECK(pt.stats().identity_allocations == 1);

  // A repeat translation reuses the mapping.
  CHECK(pt.translate_read(0, 5) == 5);
  CHECK(pt.stats().allocations == 1);
}

TEST_CASE("a first write behaves like a first read") {
  auto pt = make_table();
  const CowResult r = pt.write_fault(0, 3);
  CHECK(!r.copied);
  CHECK(r.new_frame == 3);
  CHECK(pt.writable(0, 3));

  // Writing a page the process already owns is a no-op.
  const CowResult again = pt.write_fault(0, 3);
  CHECK(!again.copied);
  CHECK(again.new_frame == 3);
  CHECK(pt.stats().allocations == 1);
  CHECK(pt.stats().cow_copies == 0);
}

TEST_CASE("touching a reserved identity falls back to the same subarray") {
  auto pt = make_table();
  const std::uint64_t reserved_vpage = 28;  // row 7, subarray 0, bank 0
  REQUIRE(pt.is_zero_frame(reserved_vpage));

  const std::uint64_t frame = pt.translate_read(0, reserved_vpage);
  CHECK(!pt.is_zero_frame(frame));
  CHECK(same_subarray(frame, reserved_vpage));
  CHECK(pt.stats().identity_allocations == 0);
  CHECK(pt.stats().hint_hits == 1);

  CHECK_THROWS_AS(pt.translate_read(0, kG.total_pages()), ConfigError);
}

TEST_CASE("fork shares every frame of the youngest process") {
  auto pt = make_table();
  pt.write_fault(0, 0);
  pt.write_fault(0, 1);

  pt.fork();
  CHECK(pt.process_count() == 2);
  CHECK(pt.youngest() == 1);
  CHECK(pt.stats().forks == 1);
  for (std::uint32_t proc : {0u, 1u}) {
    CHECK(pt.mapped(proc, 0));
    CHECK(pt.frame_of(proc, 0) == 0);
    CHECK(!pt.writable(proc, 0));
    CHECK(!pt.writable(proc, 1));
  }
  CHECK(pt.refcount(0) == 2);
  CHECK(pt.refcount(1) == 2);
}

TEST_CASE("a write to a shared frame copies into the same subarray") {
  auto pt = make_table();
  pt.write_fault(0, 0);
  pt.fork();

  const CowResult r = pt.write_fault(1, 0);
  CHECK(r.copied);
  CHECK(r.old_frame == 0);
  CHECK(r.new_frame != 0);
  CHECK(same_subarray(r.new_frame, r.old_frame));
  CHECK(pt.refcount(r.old_frame) == 1);
  CHECK(pt.refcount(r.new_frame) == 1);
  CHECK(pt.frame_of(1, 0) == r.new_frame);
  CHECK(pt.frame_of(0, 0) == 0);
  CHECK(pt.writable(1, 0));
  CHECK(pt.stats().cow_copies == 1);

  // The other sharer is now sole owner and reclaims write permission in
  // place, with no copy.
  const CowResult reclaim = pt.write_fault(0, 0);
  CHECK(!reclaim.copied);
  CHECK(reclaim.new_frame == 0);
  CHECK(pt.writable(0, 0));
  CHECK(pt.stats().cow_copies == 1);
}

TEST_CASE("an exhausted subarray falls back elsewhere and counts the miss") {
  auto pt = make_table();
  // Frames 0, 4, 8, ..., 24 are the seven usable rows of (bank 0, subarray 0).
  for (std::uint64_t v = 0; v < 28; v += 4) pt.write_fault(0, v);
  REQUIRE(pt.free_in_subarray(0, 0) == 0);

  pt.fork();
  const CowResult r = pt.write_fault(1, 0);
  CHECK(r.copied);
  CHECK(!same_subarray(r.new_frame, r.old_frame));
  CHECK(pt.stats().hint_misses == 1);
}

TEST_CASE("fork clones the youngest process only") {
  auto pt = make_table();
  pt.write_fault(0, 0);
  pt.fork();
  pt.translate_read(1, 9);
  pt.fork();

  CHECK(pt.process_count() == 3);
  CHECK(pt.mapped(1, 9));
  CHECK(pt.mapped(2, 9));
  CHECK(!pt.mapped(0, 9));
  CHECK(pt.refcount(9) == 2);
  CHECK(pt.refcount(0) == 3);
  CHECK(!pt.writable(2, 9));
}

TEST_CASE("allocation refuses to hand out frames once memory is full") {
  auto pt = make_table();
  for (std::uint64_t v = 0; v < 28; ++v) {
    const std::uint64_t frame = pt.translate_read(0, v);
    CHECK(!pt.is_zero_frame(frame));
  }
  for (std::uint32_t b = 0; b < kG.num_banks; ++b)
    for (std::uint32_t s = 0; s < kG.subarrays_per_bank; ++s)
      CHECK(pt.free_in_subarray(b, s) == 0);

  CHECK_THROWS_AS(pt.translate_read(0, 28), SimError);
}

TEST_CASE("reference counts account for every mapping") {
  auto pt = make_table();
  pt.write_fault(0, 0);
  pt.write_fault(0, 1);
  pt.translate_read(0, 2);
  pt.fork();
  pt.write_fault(1, 1);
  pt.fork();
  pt.write_fault(2, 0);
  pt.translate_read(2, 6);

  std::uint64_t mappings = 0;
  for (std::uint32_t proc = 0; proc < pt.process_count(); ++proc)
    for (std::uint64_t v = 0; v < kG.total_pages(); ++v)
      if (pt.mapped(proc, v)) mappings++;

  std::uint64_t refs = 0;
  for (std::uint64_t f = 0; f < kG.total_pages(); ++f) refs += pt.refcount(f);
  CHECK(refs == mappings);
}
