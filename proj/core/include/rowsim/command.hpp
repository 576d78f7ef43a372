#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rowsim/geometry.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

enum class CommandKind : std::uint8_t { Act, Pre, Read, Write, Transfer };

const char* to_string(CommandKind kind);

// One device command. Field use by kind:
//   Act:      bank, subarray, row
//   Pre:      bank
//   Read:     bank, column
//   Write:    bank, column
//   Transfer: bank (source), column (source), dst_bank, dst_column
// Columns index cachelines within the open row.
struct Command {
  CommandKind kind = CommandKind::Act;
  std::int32_t bank = -1;
  std::int32_t subarray = -1;
  std::int32_t row = -1;
  std::int32_t column = -1;
  std::int32_t dst_bank = -1;
  std::int32_t dst_column = -1;

  static Command act(std::int32_t bank, std::int32_t subarray, std::int32_t row) {
    Command c;
    c.kind = CommandKind::Act;
    c.bank = bank;
    c.subarray = subarray;
    c.row = row;
    return c;
  }
  static Command pre(std::int32_t bank) {
    Command c;
    c.kind = CommandKind::Pre;
    c.bank = bank;
    return c;
  }
  static Command rd(std::int32_t bank, std::int32_t column) {
    Command c;
    c.kind = CommandKind::Read;
    c.bank = bank;
    c.column = column;
    return c;
  }
  static Command wr(std::int32_t bank, std::int32_t column) {
    Command c;
    c.kind = CommandKind::Write;
    c.bank = bank;
    c.column = column;
    return c;
  }
  static Command transfer(std::int32_t src_bank, std::int32_t src_column, std::int32_t dst_bank,
                          std::int32_t dst_column) {
    Command c;
    c.kind = CommandKind::Transfer;
    c.bank = src_bank;
    c.column = src_column;
    c.dst_bank = dst_bank;
    c.dst_column = dst_column;
    return c;
  }
};

// Checks index ranges against the geometry; a Transfer additionally requires
// distinct source and destination banks.
std::optional<std::string> validate_command(const Command& cmd, const Geometry& g);

// Completion of a command issued at `issue`:
//   Act      issue + tRCD   (bank ready for column access)
//   Pre      issue + tRP    (bank precharged)
//   Read     issue + CL + tBURST    (last data beat on the channel)
//   Write    issue + CWL + tBURST   (last data beat received)
//   Transfer issue + tBURST (internal bus transfer done)
Time command_completion(CommandKind kind, Time issue, const Timing& t);

}  // namespace rowsim
