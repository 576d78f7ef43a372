#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rowsim/command.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

struct TimedCommand {
  Command cmd;
  Time issue = 0;
};

struct ScheduleViolation {
  std::size_t index = 0;      ///< position of the offending command
  std::string constraint;     ///< violated timing parameter or structural rule
  std::string detail;
};

// Re-checks an issued command sequence against the device timing rules,
// independently of the forward state machine that produced it. Commands must
// be ordered by issue time. Returns the first violation found, with the
// constraint named after the timing parameter it breaks (tRC, tRP, tRRD,
// tFAW, tRAS, tRCD, tCCD, tWR, tRTP) or a structural rule name ("order",
// "state", "fpm_cross_subarray", "transfer_banks").
std::optional<ScheduleViolation> check_schedule(const Geometry& g, const Timing& t,
                                                bool fpm_enabled,
                                                std::span<const TimedCommand> schedule);

}  // namespace rowsim
