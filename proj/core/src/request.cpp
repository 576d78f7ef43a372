#include "rowsim/request.hpp"

namespace rowsim {

const char* to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::Read:
      return "read";
    case RequestKind::Write:
      return "write";
    case RequestKind::Copy:
      return "copy";
    case RequestKind::Zero:
      return "zero";
  }
  return "?";
}

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Fpm:
      return "fpm";
    case Mechanism::Psm:
      return "psm";
    case Mechanism::BaselineCopy:
      return "baseline_copy";
    case Mechanism::BaselineZero:
      return "baseline_zero";
    case Mechanism::FpmZero:
      return "fpm_zero";
  }
  return "?";
}

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Trace:
      return "trace";
    case Origin::Memcopy:
      return "memcopy";
    case Origin::Meminit:
      return "meminit";
    case Origin::CowCopy:
      return "cow_copy";
    case Origin::Writeback:
      return "writeback";
    case Origin::CacheFill:
      return "cache_fill";
  }
  return "?";
}

const char* to_string(OpClass c) {
  switch (c) {
    case OpClass::CopyIntraSubarray:
      return "copy_intra_subarray";
    case OpClass::CopyInterBank:
      return "copy_inter_bank";
    case OpClass::CopyOther:
      return "copy_other";
    case OpClass::Zeroing:
      return "zeroing";
    case OpClass::Access:
      return "access";
  }
  return "?";
}

OpClass classify_request(const BulkRequest& req, const AddressMapping& m, const Geometry& g) {
  switch (req.kind) {
    case RequestKind::Read:
    case RequestKind::Write:
      return OpClass::Access;
    case RequestKind::Zero:
      return OpClass::Zeroing;
    case RequestKind::Copy:
      break;
  }
  const std::uint64_t row = g.row_size_bytes;
  if (req.len == 0 || req.len % row != 0 || req.src % row != 0 || req.dst % row != 0)
    return OpClass::CopyOther;
  bool all_same_subarray = true;
  bool all_cross_bank = true;
  for (std::uint64_t off = 0; off < req.len; off += row) {
    const Location s = map_address(req.src + off, m, g);
    const Location d = map_address(req.dst + off, m, g);
    const bool same = s.bank == d.bank && s.subarray == d.subarray;
    all_same_subarray = all_same_subarray && same;
    all_cross_bank = all_cross_bank && s.bank != d.bank;
  }
  if (all_same_subarray) return OpClass::CopyIntraSubarray;
  if (all_cross_bank) return OpClass::CopyInterBank;
  return OpClass::CopyOther;
}

}  // namespace rowsim
