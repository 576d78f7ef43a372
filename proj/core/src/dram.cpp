#include "rowsim/dram.hpp"

#include <algorithm>
#include <cstring>

namespace rowsim {

namespace {

Time max_floor(Time a, Time b) { return a > b ? a : b; }

// Constraint floors against events that may not have happened yet.
Time after(Time event, Time delta) { return event == kNoTime ? kNoTime : event + delta; }

}  // namespace

DramModel::DramModel(const Geometry& g, const Timing& t, const DeviceFeatures& f)
    : geom_(g),
      timing_(t),
      features_(f),
      banks_(g.num_banks),
      row_buffers_(g.num_banks, std::vector<std::uint8_t>(g.row_size_bytes, 0)),
      image_(g) {}

Time DramModel::device_act_floor(Time floor, std::int32_t bank) const {
  for (std::size_t b = 0; b < banks_.size(); ++b) {
    if (static_cast<std::int32_t>(b) == bank) continue;
    floor = max_floor(floor, after(banks_[b].last_act, timing_.tRRD));
  }
  if (recent_acts_.size() == 4) floor = max_floor(floor, recent_acts_.front() + timing_.tFAW);
  return floor;
}

Legality DramModel::earliest_act(const Command& cmd, Time floor) const {
  const BankState& bank = banks_[cmd.bank];
  switch (bank.phase) {
    case BankPhase::Precharged:
      floor = max_floor(floor, after(bank.last_pre, timing_.tRP));
      floor = max_floor(floor, after(bank.last_act, timing_.tRC));
      break;
    case BankPhase::FpmArmed:
      if (cmd.subarray != bank.open_subarray)
        return Legality::never(ProtocolFault::FpmCrossSubarray,
                               "back-to-back activation crosses a subarray boundary");
      floor = max_floor(floor, after(bank.last_act, timing_.tRAS));
      break;
    case BankPhase::Activated:
      return Legality::never(ProtocolFault::IllegalTransition,
                             "activate while a row is open");
  }
  return Legality::at(device_act_floor(floor, cmd.bank));
}

Legality DramModel::earliest_issue(const Command& cmd, Time not_before) const {
  if (auto bad = validate_command(cmd, geom_))
    return Legality::never(ProtocolFault::IllegalTransition, "malformed command");

  Time floor = not_before;
  switch (cmd.kind) {
    case CommandKind::Act:
      return earliest_act(cmd, floor);

    case CommandKind::Pre: {
      const BankState& bank = banks_[cmd.bank];
      floor = max_floor(floor, after(bank.last_act, timing_.tRAS));
      floor = max_floor(floor, after(bank.read_side_last, timing_.tRTP));
      floor = max_floor(floor, after(bank.write_data_end, timing_.tWR));
      return Legality::at(floor);
    }

    case CommandKind::Read:
    case CommandKind::Write: {
      const BankState& bank = banks_[cmd.bank];
      if (bank.phase == BankPhase::Precharged)
        return Legality::never(ProtocolFault::IllegalTransition,
                               "column access to a precharged bank");
      floor = max_floor(floor, after(bank.last_act, timing_.tRCD));
      const Time last_same = cmd.kind == CommandKind::Read ? last_rd_ : last_wr_;
      floor = max_floor(floor, after(last_same, timing_.tCCD));
      return Legality::at(floor);
    }

    case CommandKind::Transfer: {
      if (!features_.transfer)
        return Legality::never(ProtocolFault::IllegalTransition,
                               "transfer command not enabled");
      const BankState& src = banks_[cmd.bank];
      const BankState& dst = banks_[cmd.dst_bank];
      if (src.phase == BankPhase::Precharged || dst.phase == BankPhase::Precharged)
        return Legality::never(ProtocolFault::IllegalTransition,
                               "transfer with a precharged bank");
      // The source row must be column-ready at issue; the destination only by
      // the end of the burst, when the data reaches its sense amplifiers.
      floor = max_floor(floor, after(src.last_act, timing_.tRCD));
      floor = max_floor(floor, after(dst.last_act, timing_.tRCD - timing_.tBURST));
      floor = max_floor(floor, after(last_transfer_, timing_.tCCD));
      return Legality::at(floor);
    }
  }
  return Legality::never(ProtocolFault::IllegalTransition, "unknown command");
}

DramModel::Applied DramModel::apply(const Command& cmd, Time issue,
                                    std::span<const std::uint8_t> write_data) {
  if (auto bad = validate_command(cmd, geom_))
    throw ProtocolError(ProtocolFault::IllegalTransition, "malformed command: " + *bad);

  Legality legal = earliest_issue(cmd, issue);
  if (!legal.ok) throw ProtocolError(legal.fault, legal.reason);
  if (legal.time > issue)
    throw ProtocolError(ProtocolFault::TimingViolation,
                        std::string(to_string(cmd.kind)) + " issued " +
                            std::to_string(issue - legal.time) + " ps early");

  const std::uint32_t line = geom_.cacheline_bytes;
  Applied out;
  out.completion = command_completion(cmd.kind, issue, timing_);
  counts_[static_cast<int>(cmd.kind)]++;

  BankState& bank = banks_[cmd.bank];
  switch (cmd.kind) {
    case CommandKind::Act: {
      if (bank.phase == BankPhase::FpmArmed) {
        // Second activation without a precharge: the row buffer still holds
        // the previously activated row, and activating the destination row
        // overwrites it with that data.
        image_.mutable_row(cmd.bank, cmd.subarray, cmd.row) = row_buffers_[cmd.bank];
      } else {
        auto src = image_.row(cmd.bank, cmd.subarray, cmd.row);
        std::copy(src.begin(), src.end(), row_buffers_[cmd.bank].begin());
      }
      bank.phase = features_.fpm ? BankPhase::FpmArmed : BankPhase::Activated;
      bank.open_subarray = cmd.subarray;
      bank.open_row = cmd.row;
      bank.last_act = issue;
      if (recent_acts_.size() == 4) recent_acts_.pop_front();
      recent_acts_.push_back(issue);
      break;
    }

    case CommandKind::Pre:
      bank.phase = BankPhase::Precharged;
      bank.open_subarray = -1;
      bank.open_row = -1;
      bank.last_pre = issue;
      break;

    case CommandKind::Read: {
      auto& buf = row_buffers_[cmd.bank];
      out.read_data = std::span<const std::uint8_t>(buf).subspan(
          static_cast<std::size_t>(cmd.column) * line, line);
      channel_bytes_ += line;
      bank.read_side_last = max_floor(bank.read_side_last, issue);
      last_rd_ = issue;
      if (bank.phase == BankPhase::FpmArmed) bank.phase = BankPhase::Activated;
      break;
    }

    case CommandKind::Write: {
      auto& buf = row_buffers_[cmd.bank];
      auto& backing = image_.mutable_row(cmd.bank, bank.open_subarray, bank.open_row);
      const std::size_t off = static_cast<std::size_t>(cmd.column) * line;
      if (write_data.empty()) {
        std::fill_n(buf.begin() + off, line, 0);
        std::fill_n(backing.begin() + off, line, 0);
      } else {
        std::copy_n(write_data.begin(), line, buf.begin() + off);
        std::copy_n(write_data.begin(), line, backing.begin() + off);
      }
      channel_bytes_ += line;
      bank.write_data_end = max_floor(bank.write_data_end, issue + timing_.CWL + timing_.tBURST);
      last_wr_ = issue;
      if (bank.phase == BankPhase::FpmArmed) bank.phase = BankPhase::Activated;
      break;
    }

    case CommandKind::Transfer: {
      BankState& dst = banks_[cmd.dst_bank];
      auto& src_buf = row_buffers_[cmd.bank];
      auto& dst_buf = row_buffers_[cmd.dst_bank];
      auto& backing = image_.mutable_row(cmd.dst_bank, dst.open_subarray, dst.open_row);
      const std::size_t src_off = static_cast<std::size_t>(cmd.column) * line;
      const std::size_t dst_off = static_cast<std::size_t>(cmd.dst_column) * line;
      std::copy_n(src_buf.begin() + src_off, line, dst_buf.begin() + dst_off);
      std::copy_n(src_buf.begin() + src_off, line, backing.begin() + dst_off);
      // No channel traffic: the line moves over the shared internal bus.
      bank.read_side_last = max_floor(bank.read_side_last, issue);
      dst.write_data_end = max_floor(dst.write_data_end, issue + timing_.tBURST);
      last_transfer_ = issue;
      if (bank.phase == BankPhase::FpmArmed) bank.phase = BankPhase::Activated;
      if (dst.phase == BankPhase::FpmArmed) dst.phase = BankPhase::Activated;
      break;
    }
  }
  return out;
}

}  // namespace rowsim
