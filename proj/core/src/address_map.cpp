#include "rowsim/address_map.hpp"

#include <bit>
#include <cstdio>

namespace rowsim {

namespace {

std::uint32_t field_count(AddressField f, const Geometry& g) {
  switch (f) {
    case AddressField::Row:
      return g.rows_per_subarray;
    case AddressField::Subarray:
      return g.subarrays_per_bank;
    case AddressField::Bank:
      return g.num_banks;
    case AddressField::Column:
      return g.lines_per_row();
  }
  return 1;
}

std::uint32_t bits_for(std::uint32_t count) { return std::bit_width(count) - 1; }

}  // namespace

const char* to_string(AddressField f) {
  switch (f) {
    case AddressField::Row:
      return "row";
    case AddressField::Subarray:
      return "subarray";
    case AddressField::Bank:
      return "bank";
    case AddressField::Column:
      return "column";
  }
  return "?";
}

Location map_address(Addr addr, const AddressMapping& m, const Geometry& g) {
  if (addr >= g.total_bytes()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(addr));
    throw ConfigError("address", std::string(buf) + " beyond device capacity");
  }
  Location loc;
  loc.offset = static_cast<std::uint32_t>(addr & (g.cacheline_bytes - 1));
  std::uint64_t rest = addr >> bits_for(g.cacheline_bytes);
  // Fields are listed most significant first, so peel from the low end in
  // reverse order.
  for (int i = 3; i >= 0; --i) {
    const AddressField f = m.order[i];
    const std::uint32_t count = field_count(f, g);
    const std::uint32_t value = static_cast<std::uint32_t>(rest & (count - 1));
    rest >>= bits_for(count);
    switch (f) {
      case AddressField::Row:
        loc.row = value;
        break;
      case AddressField::Subarray:
        loc.subarray = value;
        break;
      case AddressField::Bank:
        loc.bank = value;
        break;
      case AddressField::Column:
        loc.column = value;
        break;
    }
  }
  return loc;
}

Addr compose_address(const Location& loc, const AddressMapping& m, const Geometry& g) {
  Addr addr = 0;
  for (int i = 0; i < 4; ++i) {
    const AddressField f = m.order[i];
    std::uint32_t value = 0;
    switch (f) {
      case AddressField::Row:
        value = loc.row;
        break;
      case AddressField::Subarray:
        value = loc.subarray;
        break;
      case AddressField::Bank:
        value = loc.bank;
        break;
      case AddressField::Column:
        value = loc.column;
        break;
    }
    addr = (addr << bits_for(field_count(f, g))) | value;
  }
  addr = (addr << bits_for(g.cacheline_bytes)) | loc.offset;
  return addr;
}

Location page_location(std::uint64_t page, const AddressMapping& m, const Geometry& g) {
  return map_address(page * g.row_size_bytes, m, g);
}

std::uint64_t page_of(Addr addr, const Geometry& g) { return addr / g.row_size_bytes; }

bool parse_field_order(const std::array<std::string, 4>& names, AddressMapping& out) {
  AddressMapping m;
  bool seen[4] = {false, false, false, false};
  for (int i = 0; i < 4; ++i) {
    AddressField f;
    if (names[i] == "row")
      f = AddressField::Row;
    else if (names[i] == "subarray")
      f = AddressField::Subarray;
    else if (names[i] == "bank")
      f = AddressField::Bank;
    else if (names[i] == "column")
      f = AddressField::Column;
    else
      return false;
    if (seen[static_cast<int>(f)]) return false;
    seen[static_cast<int>(f)] = true;
    m.order[i] = f;
  }
  out = m;
  return true;
}

}  // namespace rowsim
