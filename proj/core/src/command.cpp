#include "rowsim/command.hpp"

namespace rowsim {

const char* to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::Act:
      return "ACT";
    case CommandKind::Pre:
      return "PRE";
    case CommandKind::Read:
      return "RD";
    case CommandKind::Write:
      return "WR";
    case CommandKind::Transfer:
      return "TRANSFER";
  }
  return "?";
}

std::optional<std::string> validate_command(const Command& cmd, const Geometry& g) {
  auto bank_ok = [&](std::int32_t b) {
    return b >= 0 && b < static_cast<std::int32_t>(g.num_banks);
  };
  auto column_ok = [&](std::int32_t c) {
    return c >= 0 && c < static_cast<std::int32_t>(g.lines_per_row());
  };
  if (!bank_ok(cmd.bank)) return "bank out of range";
  switch (cmd.kind) {
    case CommandKind::Act:
      if (cmd.subarray < 0 || cmd.subarray >= static_cast<std::int32_t>(g.subarrays_per_bank))
        return "subarray out of range";
      if (cmd.row < 0 || cmd.row >= static_cast<std::int32_t>(g.rows_per_subarray))
        return "row out of range";
      break;
    case CommandKind::Pre:
      break;
    case CommandKind::Read:
    case CommandKind::Write:
      if (!column_ok(cmd.column)) return "column out of range";
      break;
    case CommandKind::Transfer:
      if (!column_ok(cmd.column)) return "source column out of range";
      if (!bank_ok(cmd.dst_bank)) return "destination bank out of range";
      if (!column_ok(cmd.dst_column)) return "destination column out of range";
      if (cmd.dst_bank == cmd.bank) return "transfer within one bank";
      break;
  }
  return std::nullopt;
}

Time command_completion(CommandKind kind, Time issue, const Timing& t) {
  switch (kind) {
    case CommandKind::Act:
      return issue + t.tRCD;
    case CommandKind::Pre:
      return issue + t.tRP;
    case CommandKind::Read:
      return issue + t.CL + t.tBURST;
    case CommandKind::Write:
      return issue + t.CWL + t.tBURST;
    case CommandKind::Transfer:
      return issue + t.tBURST;
  }
  return issue;
}

}  // namespace rowsim
