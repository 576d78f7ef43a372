#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "rowsim/command.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/memory_image.hpp"
#include "rowsim/types.hpp"

namespace rowsim {

enum class BankPhase : std::uint8_t {
  Precharged,
  Activated,  // row open, back-to-back activation window passed or disarmed
  FpmArmed,   // row open and a second ACT to the same subarray would copy it
};

struct BankState {
  BankPhase phase = BankPhase::Precharged;
  std::int32_t open_subarray = -1;
  std::int32_t open_row = -1;
  Time last_act = kNoTime;        ///< issue time of the most recent ACT
  Time last_pre = kNoTime;        ///< issue time of the most recent PRE
  Time read_side_last = kNoTime;  ///< latest RD or source-side TRANSFER issue
  Time write_data_end = kNoTime;  ///< latest write data completion (WR or dest-side TRANSFER)
};

// Which in-DRAM operations the device accepts. With fpm disabled a second
// ACT without an intervening PRE is a protocol error; with transfer disabled
// the TRANSFER command is rejected.
struct DeviceFeatures {
  bool fpm = true;
  bool transfer = true;
};

struct Legality {
  bool ok = false;
  Time time = 0;  // earliest legal issue time when ok
  ProtocolFault fault = ProtocolFault::IllegalTransition;
  const char* reason = "";

  static Legality at(Time t) { return Legality{true, t, ProtocolFault::IllegalTransition, ""}; }
  static Legality never(ProtocolFault f, const char* why) { return Legality{false, 0, f, why}; }
};

// Functional and timing model of one memory channel's banks.
//
// Timing rules enforced:
//   ACT->ACT   same bank through PRE      >= tRC
//   ACT->ACT   same bank, no PRE between  >= tRAS (back-to-back copy activation)
//   ACT->ACT   different banks            >= tRRD, and at most 4 ACTs per tFAW
//   ACT->RD/WR same bank                  >= tRCD
//   ACT->PRE   same bank                  >= tRAS
//   PRE->ACT   same bank                  >= tRP
//   RD->RD, WR->WR, TRANSFER->TRANSFER    >= tCCD (shared data path)
//   WR data end->PRE same bank            >= tWR
//   RD->PRE    same bank                  >= tRTP
//   TRANSFER at t: source bank ACT + tRCD <= t, and the destination bank must
//   be column-ready by the end of the burst, ACT + tRCD <= t + tBURST; its
//   write recovery ends at t + tBURST + tWR.
//
// A second ACT while a bank is FpmArmed writes the row buffer into the newly
// activated row of the same subarray, which is how a whole row is copied
// without touching the channel. A TRANSFER moves one cacheline between the
// open rows of two different banks over the shared internal bus.
class DramModel {
 public:
  DramModel(const Geometry& g, const Timing& t, const DeviceFeatures& f);

  // Earliest time >= not_before at which cmd could issue, or a never-legal
  // verdict when no wait makes it legal from the current state.
  Legality earliest_issue(const Command& cmd, Time not_before) const;

  struct Applied {
    Time completion = 0;
    // Cacheline read by RD, valid until the next apply call.
    std::span<const std::uint8_t> read_data;
  };

  // Issues cmd at `issue`, updating timing state and memory contents.
  // write_data supplies the WR cacheline (zeros when empty). Throws
  // ProtocolError when the command is not legal at `issue`.
  Applied apply(const Command& cmd, Time issue, std::span<const std::uint8_t> write_data = {});

  const Geometry& geometry() const { return geom_; }
  const Timing& timing() const { return timing_; }
  const BankState& bank(std::uint32_t b) const { return banks_[b]; }
  const MemoryImage& image() const { return image_; }
  MemoryImage& image() { return image_; }
  std::span<const std::uint8_t> row_buffer(std::uint32_t bank) const { return row_buffers_[bank]; }

  std::uint64_t channel_bytes() const { return channel_bytes_; }
  std::uint64_t count(CommandKind kind) const { return counts_[static_cast<int>(kind)]; }

 private:
  Legality earliest_act(const Command& cmd, Time floor) const;
  Time device_act_floor(Time floor, std::int32_t bank) const;

  Geometry geom_;
  Timing timing_;
  DeviceFeatures features_;
  std::vector<BankState> banks_;
  std::vector<std::vector<std::uint8_t>> row_buffers_;
  std::deque<Time> recent_acts_;  // device-wide, holds at most the last 4
  Time last_rd_ = kNoTime;
  Time last_wr_ = kNoTime;
  Time last_transfer_ = kNoTime;
  MemoryImage image_;
  std::uint64_t channel_bytes_ = 0;
  std::uint64_t counts_[5] = {0, 0, 0, 0, 0};
};

}  // namespace rowsim
