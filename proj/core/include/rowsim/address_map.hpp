#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rowsim/geometry.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

enum class AddressField : std::uint8_t { Row, Subarray, Bank, Column };

const char* to_string(AddressField f);

// Bit-field split of a physical address. `order` lists the fields from most
// to least significant; the cacheline byte offset always occupies the lowest
// bits. The default order row | subarray | bank | column places consecutive
// rows of an address range in consecutive banks, and keeps two addresses in
// the same bank and subarray exactly when they agree in all bits below the
// row field.
struct AddressMapping {
  std::array<AddressField, 4> order = {AddressField::Row, AddressField::Subarray,
                                       AddressField::Bank, AddressField::Column};
};

struct Location {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;  // cacheline index within the row
  std::uint32_t offset = 0;  // byte within the cacheline

  bool same_row(const Location& o) const {
    return bank == o.bank && subarray == o.subarray && row == o.row;
  }
};

// Decomposes addr, or throws ConfigError("address", ...) when addr lies
// beyond the device capacity. The mapping is a bijection onto
// (bank, subarray, row, column, offset).
Location map_address(Addr addr, const AddressMapping& m, const Geometry& g);

// Inverse of map_address.
Addr compose_address(const Location& loc, const AddressMapping& m, const Geometry& g);

// Row-granular helpers used by the allocator: pages and rows coincide.
Location page_location(std::uint64_t page, const AddressMapping& m, const Geometry& g);
std::uint64_t page_of(Addr addr, const Geometry& g);

bool parse_field_order(const std::array<std::string, 4>& names, AddressMapping& out);

}  // namespace rowsim
