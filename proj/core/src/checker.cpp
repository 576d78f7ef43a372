#include "rowsim/checker.hpp"

#include <algorithm>

namespace rowsim {

namespace {

// Review state per bank, tracked pairwise rather than as a phase machine so
// that this pass stays an independent cross-check of the forward model.
struct BankHistory {
  bool open = false;
  std::int32_t subarray = -1;
  std::int32_t row = -1;
  bool column_accessed = false;  // RD/WR/TRANSFER since the last ACT
  Time act = kNoTime;
  Time pre = kNoTime;
  Time last_read_like = kNoTime;    // RD issue or source-side TRANSFER issue
  Time last_write_end = kNoTime;    // WR or dest-side TRANSFER data completion
};

std::string ps_gap(Time need, Time got) {
  return "needs " + std::to_string(need) + " ps, got " + std::to_string(got) + " ps";
}

}  // namespace

std::optional<ScheduleViolation> check_schedule(const Geometry& g, const Timing& t,
                                                bool fpm_enabled,
                                                std::span<const TimedCommand> schedule) {
  std::vector<BankHistory> banks(g.num_banks);
  std::vector<Time> all_acts;  // every ACT issue time, for the tFAW window scan
  Time prev_issue = kNoTime;
  Time last_rd = kNoTime, last_wr = kNoTime, last_tr = kNoTime;

  auto fail = [](std::size_t i, const char* name, std::string detail) {
    return ScheduleViolation{i, name, std::move(detail)};
  };

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Command& c = schedule[i].cmd;
    const Time at = schedule[i].issue;

    if (auto bad = validate_command(c, g)) return fail(i, "structure", *bad);
    if (prev_issue != kNoTime && at < prev_issue)
      return fail(i, "order", "issue times must be non-decreasing");
    prev_issue = at;

    BankHistory& bank = banks[c.bank];
    switch (c.kind) {
      case CommandKind::Act: {
        if (bank.open) {
          // A second ACT without an intervening PRE is only the in-DRAM row
          // copy form: same subarray, device support on, no column access in
          // between, and at least the restore time after the first ACT.
          if (!fpm_enabled || bank.column_accessed)
            return fail(i, "state", "activate while a row is open");
          if (c.subarray != bank.subarray)
            return fail(i, "fpm_cross_subarray",
                        "back-to-back activation must stay in one subarray");
          if (at - bank.act < t.tRAS) return fail(i, "tRAS", ps_gap(bank.act + t.tRAS, at));
        } else {
          if (bank.act != kNoTime && at - bank.act < t.tRC)
            return fail(i, "tRC", ps_gap(bank.act + t.tRC, at));
          if (bank.pre != kNoTime && at - bank.pre < t.tRP)
            return fail(i, "tRP", ps_gap(bank.pre + t.tRP, at));
        }
        for (std::size_t b = 0; b < banks.size(); ++b) {
          if (static_cast<std::int32_t>(b) == c.bank) continue;
          if (banks[b].act != kNoTime && at - banks[b].act < t.tRRD)
            return fail(i, "tRRD", ps_gap(banks[b].act + t.tRRD, at));
        }
        // Sliding window over the full activation record: this ACT plus any
        // four earlier ones may not fit inside one tFAW span.
        {
          std::size_t in_window = 1;
          for (auto it = all_acts.rbegin(); it != all_acts.rend() && *it > at - t.tFAW; ++it)
            ++in_window;
          if (in_window > 4) return fail(i, "tFAW", "more than 4 activations in one window");
        }
        bank.open = true;
        bank.subarray = c.subarray;
        bank.row = c.row;
        bank.column_accessed = false;
        bank.act = at;
        all_acts.push_back(at);
        break;
      }

      case CommandKind::Pre: {
        if (bank.act != kNoTime && bank.open && at - bank.act < t.tRAS)
          return fail(i, "tRAS", ps_gap(bank.act + t.tRAS, at));
        if (bank.last_read_like != kNoTime && at - bank.last_read_like < t.tRTP)
          return fail(i, "tRTP", ps_gap(bank.last_read_like + t.tRTP, at));
        if (bank.last_write_end != kNoTime && at - bank.last_write_end < t.tWR)
          return fail(i, "tWR", ps_gap(bank.last_write_end + t.tWR, at));
        bank.open = false;
        bank.pre = at;
        break;
      }

      case CommandKind::Read:
      case CommandKind::Write: {
        if (!bank.open) return fail(i, "state", "column access to a precharged bank");
        if (at - bank.act < t.tRCD) return fail(i, "tRCD", ps_gap(bank.act + t.tRCD, at));
        Time& last_same = c.kind == CommandKind::Read ? last_rd : last_wr;
        if (last_same != kNoTime && at - last_same < t.tCCD)
          return fail(i, "tCCD", ps_gap(last_same + t.tCCD, at));
        bank.column_accessed = true;
        if (c.kind == CommandKind::Read) {
          bank.last_read_like = at;
          last_rd = at;
        } else {
          bank.last_write_end = at + t.CWL + t.tBURST;
          last_wr = at;
        }
        break;
      }

      case CommandKind::Transfer: {
        BankHistory& dst = banks[c.dst_bank];
        if (!bank.open || !dst.open)
          return fail(i, "state", "transfer with a precharged bank");
        if (at - bank.act < t.tRCD) return fail(i, "tRCD", ps_gap(bank.act + t.tRCD, at));
        if (at + t.tBURST - dst.act < t.tRCD)
          return fail(i, "tRCD", ps_gap(dst.act + t.tRCD - t.tBURST, at));
        if (last_tr != kNoTime && at - last_tr < t.tCCD)
          return fail(i, "tCCD", ps_gap(last_tr + t.tCCD, at));
        bank.column_accessed = true;
        dst.column_accessed = true;
        bank.last_read_like = at;
        dst.last_write_end = at + t.tBURST;
        last_tr = at;
        break;
      }
    }
  }
  return std::nullopt;
}

}  // namespace rowsim
