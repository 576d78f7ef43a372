#pragma once

#include <cstdint>
#include <vector>

#include "rowsim/controller.hpp"
#include "rowsim/geometry.hpp"

namespace rowsim {

/// Per-command energy costs in nanojoules plus a static background draw.
///
/// The defaults are calibrated against a DDR3-1066 x8 rank following the
/// usual IDD-based estimation: an activate/precharge pair costs on the order
/// of 24 nJ, a read or write burst splits into an array portion and a channel
/// I/O portion, and an internal transfer burst pays only the array portions
/// because no data crosses the channel.
struct PowerParams {
  double e_act_pre = 24.0;    ///< nJ per activate/precharge pair.
  double e_rd_array = 3.75;   ///< nJ array cost of one read burst.
  double e_wr_array = 8.58;   ///< nJ array cost of one write burst.
  double e_io = 14.39;        ///< nJ channel I/O cost of one data burst.
  double e_transfer = 12.33;  ///< nJ per internal transfer burst.
  double p_background_mw = 0.0;  ///< Static draw in milliwatts.
};

std::vector<ValidationIssue> validate_power(const PowerParams& p);

/// Energy totals for a command stream, split by component.
struct EnergyLedger {
  std::uint64_t acts = 0;
  std::uint64_t pres = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t transfers = 0;

  double act_pre_nj = 0.0;
  double array_nj = 0.0;
  double io_nj = 0.0;
  double transfer_nj = 0.0;
  double background_nj = 0.0;

  double total_nj() const {
    return act_pre_nj + array_nj + io_nj + transfer_nj + background_nj;
  }
};

/// Accounts every command in the timeline. Background energy covers the whole
/// makespan.
EnergyLedger account(const Timeline& tl, const PowerParams& p);

/// Accounts only commands issued on behalf of requests of one class.
/// Background energy is not attributed to any class.
EnergyLedger account_class(const Timeline& tl, const PowerParams& p, OpClass klass);

/// Total energy of `a` over total energy of `b`. Throws if `b` is zero.
double energy_ratio(const EnergyLedger& a, const EnergyLedger& b);

}  // namespace rowsim
