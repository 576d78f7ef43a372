#pragma once

#include <cstdint>
#include <vector>

#include "rowsim/address_map.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

enum class RequestKind : std::uint8_t { Read, Write, Copy, Zero };

// How a bulk request is executed in DRAM.
enum class Mechanism : std::uint8_t {
  Fpm,           // back-to-back activation copy within one subarray
  Psm,           // cacheline transfers between two banks over the internal bus
  BaselineCopy,  // read the source over the channel, write it back
  BaselineZero,  // write zero lines over the channel
  FpmZero,       // back-to-back activation copy from the reserved zero row
};

const char* to_string(RequestKind kind);
const char* to_string(Mechanism m);

// Who injected the request, for accounting.
enum class Origin : std::uint8_t {
  Trace,      // direct from a trace record
  Memcopy,    // bulk copy API
  Meminit,    // bulk initialize API
  CowCopy,    // copy-on-write page duplication
  Writeback,  // dirty cache line eviction or coherence writeback
  CacheFill,  // cache miss fill
};

const char* to_string(Origin o);

// One memory-controller request. Read and Write cover a single cacheline at
// `addr` (Write carries its payload); Copy moves `len` bytes from `src` to
// `dst`; Zero clears `len` bytes at `dst`. All addresses and lengths are
// cacheline aligned.
struct BulkRequest {
  RequestKind kind = RequestKind::Read;
  Addr addr = 0;  // Read/Write
  Addr src = 0;   // Copy
  Addr dst = 0;   // Copy/Zero
  std::uint64_t len = 0;
  Time arrival = 0;
  std::uint64_t seq = 0;  // arrival tie-break, assigned in emission order
  Origin origin = Origin::Trace;
  std::vector<std::uint8_t> payload;  // Write data
};

// Geometry-derived grouping used for side-by-side reporting. Classification
// depends only on addresses, never on which mechanism ends up selected, so
// runs with different feature flags bucket identically.
enum class OpClass : std::uint8_t {
  CopyIntraSubarray,  // whole rows, every pair within one (bank, subarray)
  CopyInterBank,      // whole rows, every pair across two banks
  CopyOther,
  Zeroing,
  Access,  // single-line reads and writes
};

const char* to_string(OpClass c);

OpClass classify_request(const BulkRequest& req, const AddressMapping& m, const Geometry& g);

}  // namespace rowsim
