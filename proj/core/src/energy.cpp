#include "rowsim/energy.hpp"

#include <unordered_map>

namespace rowsim {

std::vector<ValidationIssue> validate_power(const PowerParams& p) {
  std::vector<ValidationIssue> issues;
  auto non_negative = [&](double v, const char* field) {
    if (v < 0.0) issues.push_back({field, "must be non-negative"});
  };
  non_negative(p.e_act_pre, "power.e_act_pre");
  non_negative(p.e_rd_array, "power.e_rd_array");
  non_negative(p.e_wr_array, "power.e_wr_array");
  non_negative(p.e_io, "power.e_io");
  non_negative(p.e_transfer, "power.e_transfer");
  non_negative(p.p_background_mw, "power.p_background_mw");
  if (p.e_transfer >= p.e_rd_array + p.e_wr_array + 2.0 * p.e_io)
    issues.push_back({"power.e_transfer",
                      "must cost less than the read, write and I/O bursts it replaces"});
  return issues;
}

namespace {

void charge(EnergyLedger& led, const Command& cmd, const PowerParams& p) {
  switch (cmd.kind) {
    case CommandKind::Act:
      led.acts++;
      led.act_pre_nj += p.e_act_pre / 2.0;
      break;
    case CommandKind::Pre:
      led.pres++;
      led.act_pre_nj += p.e_act_pre / 2.0;
      break;
    case CommandKind::Read:
      led.reads++;
      led.array_nj += p.e_rd_array;
      led.io_nj += p.e_io;
      break;
    case CommandKind::Write:
      led.writes++;
      led.array_nj += p.e_wr_array;
      led.io_nj += p.e_io;
      break;
    case CommandKind::Transfer:
      led.transfers++;
      led.transfer_nj += p.e_transfer;
      break;
  }
}

}  // namespace

EnergyLedger account(const Timeline& tl, const PowerParams& p) {
  EnergyLedger led;
  for (const auto& e : tl.entries) charge(led, e.cmd, p);
  led.background_nj = p.p_background_mw * ps_to_ns(tl.makespan) * 1e-3;
  return led;
}

EnergyLedger account_class(const Timeline& tl, const PowerParams& p, OpClass klass) {
  std::unordered_map<std::uint64_t, OpClass> class_of;
  class_of.reserve(tl.requests.size());
  for (const auto& r : tl.requests) class_of.emplace(r.seq, r.op_class);

  EnergyLedger led;
  for (const auto& e : tl.entries) {
    auto it = class_of.find(e.request_seq);
    if (it != class_of.end() && it->second == klass) charge(led, e.cmd, p);
  }
  return led;
}

double energy_ratio(const EnergyLedger& a, const EnergyLedger& b) {
  if (b.total_nj() <= 0.0) throw InternalError("energy ratio against a zero total");
  return a.total_nj() / b.total_nj();
}

}  // namespace rowsim
