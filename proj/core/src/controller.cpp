#include "rowsim/controller.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace rowsim {

namespace {

bool whole_rows(Addr src, Addr dst, std::uint64_t len, const Geometry& g) {
  const std::uint64_t row = g.row_size_bytes;
  return len > 0 && len % row == 0 && src % row == 0 && dst % row == 0;
}

CompiledCommand make_act(const Location& loc, bool opens_row) {
  CompiledCommand c;
  c.cmd = Command::act(static_cast<std::int32_t>(loc.bank), static_cast<std::int32_t>(loc.subarray),
                       static_cast<std::int32_t>(loc.row));
  c.opens_row = opens_row;
  return c;
}

CompiledCommand make_pre(std::uint32_t bank) {
  CompiledCommand c;
  c.cmd = Command::pre(static_cast<std::int32_t>(bank));
  return c;
}

}  // namespace

Mechanism select_mechanism(RequestKind kind, Addr src, Addr dst, std::uint64_t len,
                           const MechanismFlags& flags, const AddressMapping& m,
                           const Geometry& g) {
  if (kind == RequestKind::Zero) {
    if (flags.rowclone && flags.fpm && whole_rows(dst, dst, len, g)) return Mechanism::FpmZero;
    return Mechanism::BaselineZero;
  }
  if (kind != RequestKind::Copy) return Mechanism::BaselineCopy;
  if (!flags.rowclone || !whole_rows(src, dst, len, g)) return Mechanism::BaselineCopy;

  bool all_same_subarray = true;
  bool all_cross_bank = true;
  for (std::uint64_t off = 0; off < len; off += g.row_size_bytes) {
    const Location s = map_address(src + off, m, g);
    const Location d = map_address(dst + off, m, g);
    all_same_subarray = all_same_subarray && s.bank == d.bank && s.subarray == d.subarray;
    all_cross_bank = all_cross_bank && s.bank != d.bank;
  }
  if (flags.fpm && all_same_subarray) return Mechanism::Fpm;
  if (flags.psm && all_cross_bank) return Mechanism::Psm;
  return Mechanism::BaselineCopy;
}

std::vector<CompiledCommand> compile_copy(Addr src, Addr dst, std::uint64_t len, Mechanism mech,
                                          const AddressMapping& m, const Geometry& g) {
  std::vector<CompiledCommand> out;
  if (len == 0) return out;
  const std::uint64_t row = g.row_size_bytes;
  const std::uint32_t line = g.cacheline_bytes;

  if (mech == Mechanism::Fpm) {
    // Group row pairs into waves: the i-th pair landing in any given bank
    // belongs to wave i. Within a wave all banks are distinct, so emitting
    // the wave's activations together lets the banks overlap while each
    // bank still sees its strict ACT, ACT, PRE order.
    std::map<std::uint32_t, std::uint32_t> pairs_in_bank;
    std::vector<std::vector<std::pair<Location, Location>>> waves;
    for (std::uint64_t off = 0; off < len; off += row) {
      const Location s = map_address(src + off, m, g);
      const Location d = map_address(dst + off, m, g);
      if (s.bank != d.bank || s.subarray != d.subarray)
        throw InternalError("copy pair not within one subarray");
      const std::uint32_t wave = pairs_in_bank[s.bank]++;
      if (waves.size() <= wave) waves.resize(wave + 1);
      waves[wave].emplace_back(s, d);
    }
    for (const auto& wave : waves) {
      for (const auto& [s, d] : wave) out.push_back(make_act(s, true));
      for (const auto& [s, d] : wave) out.push_back(make_act(d, false));
      for (const auto& [s, d] : wave) out.push_back(make_pre(s.bank));
    }
    return out;
  }

  if (mech == Mechanism::Psm) {
    const std::uint32_t lines = g.lines_per_row();
    for (std::uint64_t off = 0; off < len; off += row) {
      const Location s = map_address(src + off, m, g);
      const Location d = map_address(dst + off, m, g);
      if (s.bank == d.bank) throw InternalError("transfer copy pair within one bank");
      out.push_back(make_act(s, true));
      out.push_back(make_act(d, true));
      for (std::uint32_t c = 0; c < lines; ++c) {
        CompiledCommand t;
        t.cmd = Command::transfer(static_cast<std::int32_t>(s.bank), static_cast<std::int32_t>(c),
                                  static_cast<std::int32_t>(d.bank), static_cast<std::int32_t>(c));
        out.push_back(t);
      }
      out.push_back(make_pre(s.bank));
      out.push_back(make_pre(d.bank));
    }
    return out;
  }

  // Channel copy. Pieces never straddle a row boundary on either side.
  std::uint64_t off = 0;
  std::int32_t read_ordinal = 0;
  while (off < len) {
    const std::uint64_t src_room = row - (src + off) % row;
    const std::uint64_t dst_room = row - (dst + off) % row;
    const std::uint64_t piece = std::min({len - off, src_room, dst_room});
    const Location s = map_address(src + off, m, g);
    const Location d = map_address(dst + off, m, g);
    const std::uint32_t nlines = static_cast<std::uint32_t>(piece / line);
    const std::int32_t base = read_ordinal;

    auto emit_reads = [&](const Location& at) {
      for (std::uint32_t k = 0; k < nlines; ++k) {
        CompiledCommand c;
        c.cmd = Command::rd(static_cast<std::int32_t>(at.bank),
                            static_cast<std::int32_t>(at.column + k));
        out.push_back(c);
        ++read_ordinal;
      }
    };
    auto emit_writes = [&](const Location& at) {
      for (std::uint32_t k = 0; k < nlines; ++k) {
        CompiledCommand c;
        c.cmd = Command::wr(static_cast<std::int32_t>(at.bank),
                            static_cast<std::int32_t>(at.column + k));
        c.data = WriteSource::FromRead;
        c.read_index = base + static_cast<std::int32_t>(k);
        out.push_back(c);
      }
    };

    if (s.same_row(d)) {
      out.push_back(make_act(s, true));
      emit_reads(s);
      emit_writes(d);
      out.push_back(make_pre(s.bank));
    } else if (s.bank == d.bank) {
      out.push_back(make_act(s, true));
      emit_reads(s);
      out.push_back(make_pre(s.bank));
      out.push_back(make_act(d, true));
      emit_writes(d);
      out.push_back(make_pre(d.bank));
    } else {
      out.push_back(make_act(s, true));
      out.push_back(make_act(d, true));
      emit_reads(s);
      emit_writes(d);
      out.push_back(make_pre(s.bank));
      out.push_back(make_pre(d.bank));
    }
    off += piece;
  }
  return out;
}

std::vector<CompiledCommand> compile_zero(Addr dst, std::uint64_t len, Mechanism mech,
                                          const AddressMapping& m, const Geometry& g,
                                          bool zero_row_reserved) {
  std::vector<CompiledCommand> out;
  if (len == 0) return out;
  const std::uint64_t row = g.row_size_bytes;
  const std::uint32_t line = g.cacheline_bytes;

  if (mech == Mechanism::FpmZero) {
    if (!zero_row_reserved)
      throw InternalError("in-DRAM zeroing needs the reserved zero rows");
    for (std::uint64_t off = 0; off < len; off += row) {
      const Location d = map_address(dst + off, m, g);
      if (d.row == zero_row_id(g))
        throw InternalError("zeroing the reserved zero row itself");
      Location z = d;
      z.row = zero_row_id(g);
      out.push_back(make_act(z, true));
      out.push_back(make_act(d, false));
      out.push_back(make_pre(d.bank));
    }
    return out;
  }

  std::uint64_t off = 0;
  while (off < len) {
    const std::uint64_t room = row - (dst + off) % row;
    const std::uint64_t piece = std::min(len - off, room);
    const Location d = map_address(dst + off, m, g);
    const std::uint32_t nlines = static_cast<std::uint32_t>(piece / line);
    out.push_back(make_act(d, true));
    for (std::uint32_t k = 0; k < nlines; ++k) {
      CompiledCommand c;
      c.cmd = Command::wr(static_cast<std::int32_t>(d.bank),
                          static_cast<std::int32_t>(d.column + k));
      c.data = WriteSource::Zeros;
      out.push_back(c);
    }
    out.push_back(make_pre(d.bank));
    off += piece;
  }
  return out;
}

std::vector<TimedCommand> Timeline::timed_commands() const {
  std::vector<TimedCommand> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e.cmd, e.issue});
  return out;
}

Controller::Controller(const Geometry& g, const Timing& t, const ControllerConfig& cfg)
    : geom_(g),
      timing_(t),
      cfg_(cfg),
      dram_(g, t,
            DeviceFeatures{cfg.flags.rowclone && cfg.flags.fpm,
                           cfg.flags.rowclone && cfg.flags.psm}) {}

Mechanism Controller::select(const BulkRequest& req) const {
  return select_mechanism(req.kind, req.src, req.dst, req.len, cfg_.flags, cfg_.mapping, geom_);
}

namespace {

// How many of the oldest outstanding requests compete for the next command
// slot. Everything younger waits. Hazard edges and bank claims only ever
// point at older requests, which are in the window whenever a blocked
// younger one is, so the window cannot deadlock.
constexpr std::size_t kSchedulerWindow = 64;

struct ReqState {
  const BulkRequest* req = nullptr;
  OpClass op_class = OpClass::Access;
  Mechanism mech = Mechanism::BaselineCopy;
  bool has_mech = false;
  bool dynamic_plan = false;  // single-line access planned against live bank state
  bool plan_fixed = false;
  std::vector<CompiledCommand> cmds;
  std::vector<std::uint32_t> bank_refs;  // commands still to issue, per bank
  std::size_t next = 0;
  std::vector<Time> rd_issue;
  std::vector<std::vector<std::uint8_t>> rd_data;
  std::vector<std::uint32_t> claim_banks;
  std::vector<std::uint32_t> dependents;
  std::uint32_t deps_remaining = 0;
  Time dep_floor = 0;  // latest completion among finished prerequisites
  bool admitted = false;
  bool complete = false;
  Time start = kNoTime;
  Time end = kNoTime;
  std::uint64_t channel_bytes = 0;
};

struct Candidate {
  std::size_t idx = 0;
  Time t = 0;
  Command cmd;
  bool conditioning = false;
  bool row_hit = false;
  bool valid = false;
};

// Readers and the last writer of one cacheline, used to order requests
// whose byte ranges conflict.
struct LineUse {
  std::int64_t last_writer = -1;
  std::vector<std::uint32_t> readers;
};

}  // namespace

Timeline Controller::run(const std::vector<BulkRequest>& requests) {
  const std::size_t n = requests.size();
  const std::uint32_t line = geom_.cacheline_bytes;
  for (std::size_t i = 1; i < n; ++i) {
    if (requests[i].arrival < requests[i - 1].arrival)
      throw InternalError("requests not sorted by arrival");
  }

  std::vector<ReqState> st(n);
  auto count_bank_refs = [&](ReqState& s) {
    s.bank_refs.assign(geom_.num_banks, 0);
    for (const auto& c : s.cmds) {
      s.bank_refs[static_cast<std::uint32_t>(c.cmd.bank)]++;
      if (c.cmd.kind == CommandKind::Transfer)
        s.bank_refs[static_cast<std::uint32_t>(c.cmd.dst_bank)]++;
    }
    s.claim_banks.clear();
    for (std::uint32_t b = 0; b < geom_.num_banks; ++b)
      if (s.bank_refs[b] > 0) s.claim_banks.push_back(b);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const BulkRequest& r = requests[i];
    ReqState& s = st[i];
    s.req = &r;
    s.op_class = classify_request(r, cfg_.mapping, geom_);
    switch (r.kind) {
      case RequestKind::Read:
      case RequestKind::Write:
        s.dynamic_plan = true;
        s.claim_banks = {map_address(r.addr, cfg_.mapping, geom_).bank};
        break;
      case RequestKind::Copy:
        s.mech = select(r);
        s.has_mech = true;
        s.cmds = compile_copy(r.src, r.dst, r.len, s.mech, cfg_.mapping, geom_);
        s.plan_fixed = true;
        count_bank_refs(s);
        break;
      case RequestKind::Zero:
        s.mech = select(r);
        s.has_mech = true;
        s.cmds = compile_zero(r.dst, r.len, s.mech, cfg_.mapping, geom_);
        s.plan_fixed = true;
        count_bank_refs(s);
        break;
    }
  }

  // Requests whose byte ranges conflict execute in arrival order. Track per
  // line who last wrote it and who read it since; a reader depends on the
  // last writer, a writer on the last writer and every reader since.
  {
    std::unordered_map<std::uint64_t, LineUse> use;
    std::vector<std::int64_t> raw;
    for (std::size_t i = 0; i < n; ++i) {
      const BulkRequest& r = requests[i];
      raw.clear();
      auto read_range = [&](Addr lo, std::uint64_t len) {
        for (Addr a = lo / line; a < (lo + len) / line; ++a) {
          LineUse& u = use[a];
          raw.push_back(u.last_writer);
          u.readers.push_back(static_cast<std::uint32_t>(i));
        }
      };
      auto write_range = [&](Addr lo, std::uint64_t len) {
        for (Addr a = lo / line; a < (lo + len) / line; ++a) {
          LineUse& u = use[a];
          raw.push_back(u.last_writer);
          for (std::uint32_t rd : u.readers) raw.push_back(rd);
          u.last_writer = static_cast<std::int64_t>(i);
          u.readers.clear();
        }
      };
      switch (r.kind) {
        case RequestKind::Read:
          read_range(r.addr, line);
          break;
        case RequestKind::Write:
          write_range(r.addr, line);
          break;
        case RequestKind::Copy:
          read_range(r.src, r.len);
          write_range(r.dst, r.len);
          break;
        case RequestKind::Zero:
          write_range(r.dst, r.len);
          break;
      }
      std::sort(raw.begin(), raw.end());
      raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
      for (std::int64_t j : raw) {
        if (j < 0 || j == static_cast<std::int64_t>(i)) continue;
        st[static_cast<std::size_t>(j)].dependents.push_back(static_cast<std::uint32_t>(i));
        st[i].deps_remaining++;
      }
    }
  }

  Timeline tl;
  std::vector<std::int64_t> owner(geom_.num_banks, -1);
  Time channel_free = 0;
  // The command bus is serial: no command may issue before one already
  // issued, whatever its bank-level floors allow.
  Time bus_floor = 0;
  std::size_t done = 0;
  std::size_t first_active = 0;

  auto finish = [&](std::size_t i, Time at) {
    ReqState& s = st[i];
    s.complete = true;
    if (s.start == kNoTime) s.start = at;
    if (s.end == kNoTime) s.end = at;
    ++done;
    for (std::uint32_t d : s.dependents) {
      st[d].deps_remaining--;
      st[d].dep_floor = std::max(st[d].dep_floor, s.end);
    }
  };

  auto build_access_plan = [&](ReqState& s) {
    const BulkRequest& r = *s.req;
    const Location loc = map_address(r.addr, cfg_.mapping, geom_);
    s.cmds.clear();
    const BankState& b = dram_.bank(loc.bank);
    const bool row_open = b.phase != BankPhase::Precharged &&
                          b.open_subarray == static_cast<std::int32_t>(loc.subarray) &&
                          b.open_row == static_cast<std::int32_t>(loc.row);
    if (!row_open) {
      if (b.phase != BankPhase::Precharged) s.cmds.push_back(make_pre(loc.bank));
      s.cmds.push_back(make_act(loc, true));
    }
    CompiledCommand c;
    c.cmd = r.kind == RequestKind::Read
                ? Command::rd(static_cast<std::int32_t>(loc.bank),
                              static_cast<std::int32_t>(loc.column))
                : Command::wr(static_cast<std::int32_t>(loc.bank),
                              static_cast<std::int32_t>(loc.column));
    c.data = r.kind == RequestKind::Write ? WriteSource::Immediate : WriteSource::None;
    s.cmds.push_back(c);
    count_bank_refs(s);
  };

  while (done < n) {
    while (first_active < n && st[first_active].complete) ++first_active;

    Candidate best, best_hit;
    bool retired = false;
    std::size_t considered = 0;
    for (std::size_t i = first_active; i < n && considered < kSchedulerWindow; ++i) {
      ReqState& s = st[i];
      if (s.complete) continue;
      ++considered;
      if (s.deps_remaining > 0) continue;

      if (!s.plan_fixed && s.dynamic_plan) build_access_plan(s);
      if (s.cmds.empty()) {
        finish(i, std::max(s.req->arrival, s.dep_floor));
        retired = true;
        continue;
      }

      if (!s.admitted) {
        bool blocked = false;
        for (std::uint32_t b : s.claim_banks) {
          if (owner[b] != -1 && owner[b] != static_cast<std::int64_t>(i)) {
            blocked = true;
            break;
          }
        }
        if (blocked) continue;
      }

      const CompiledCommand& cc = s.cmds[s.next];
      Command actual = cc.cmd;
      bool conditioning = false;
      if (cc.cmd.kind == CommandKind::Act && cc.opens_row &&
          dram_.bank(cc.cmd.bank).phase != BankPhase::Precharged) {
        actual = Command::pre(cc.cmd.bank);
        conditioning = true;
      }

      Time floor = std::max({s.req->arrival, s.dep_floor, bus_floor});
      if (!conditioning && cc.data == WriteSource::FromRead) {
        if (cc.read_index < 0 || static_cast<std::size_t>(cc.read_index) >= s.rd_issue.size())
          throw InternalError("write sourced from a read that has not issued");
        // The write burst may start once the sourcing read's last data beat
        // has left the channel.
        floor = std::max(floor,
                         s.rd_issue[cc.read_index] + timing_.CL + timing_.tBURST - timing_.CWL);
      }
      if (actual.kind == CommandKind::Read) floor = std::max(floor, channel_free - timing_.CL);
      if (actual.kind == CommandKind::Write) floor = std::max(floor, channel_free - timing_.CWL);

      const Legality leg = dram_.earliest_issue(actual, floor);
      if (!leg.ok) throw InternalError(std::string("scheduled illegal command: ") + leg.reason);

      Candidate cand;
      cand.idx = i;
      cand.t = leg.time;
      cand.cmd = actual;
      cand.conditioning = conditioning;
      cand.row_hit = s.dynamic_plan && s.cmds.size() - s.next == 1 && !conditioning;
      cand.valid = true;

      if (cfg_.policy == SchedulingPolicy::Fifo && !retired) {
        // Oldest ready request wins outright; the scan runs in age order.
        best = cand;
        break;
      }
      if (!best.valid || cand.t < best.t) best = cand;
      if (cand.row_hit && (!best_hit.valid || cand.t < best_hit.t)) best_hit = cand;
    }
    if (retired) continue;
    if (!best.valid) throw InternalError("scheduler stalled with requests outstanding");

    Candidate chosen = best;
    if (cfg_.policy == SchedulingPolicy::FrFcfs && best_hit.valid &&
        best_hit.t <= best.t + timing_.tCK)
      chosen = best_hit;

    ReqState& s = st[chosen.idx];
    std::span<const std::uint8_t> wdata;
    if (!chosen.conditioning) {
      const CompiledCommand& cc = s.cmds[s.next];
      switch (cc.data) {
        case WriteSource::Immediate:
          if (s.req->payload.size() < line) throw InternalError("short write payload");
          wdata = std::span<const std::uint8_t>(s.req->payload.data(), line);
          break;
        case WriteSource::FromRead:
          wdata = s.rd_data[cc.read_index];
          break;
        case WriteSource::Zeros:
        case WriteSource::None:
          break;
      }
    }

    const DramModel::Applied applied = dram_.apply(chosen.cmd, chosen.t, wdata);
    tl.entries.push_back({chosen.cmd, chosen.t, applied.completion, s.req->seq});
    bus_floor = chosen.t;

    if (chosen.cmd.kind == CommandKind::Read || chosen.cmd.kind == CommandKind::Write) {
      channel_free = std::max(channel_free, applied.completion);
      s.channel_bytes += line;
    }
    if (chosen.cmd.kind == CommandKind::Read && !chosen.conditioning) {
      s.rd_issue.push_back(chosen.t);
      s.rd_data.emplace_back(applied.read_data.begin(), applied.read_data.end());
    }

    if (s.start == kNoTime) s.start = chosen.t;
    s.end = s.end == kNoTime ? applied.completion : std::max(s.end, applied.completion);

    if (!s.admitted) {
      s.admitted = true;
      s.plan_fixed = true;
      for (std::uint32_t b : s.claim_banks) owner[b] = static_cast<std::int64_t>(chosen.idx);
    }
    if (!chosen.conditioning) {
      const Command cmd = s.cmds[s.next].cmd;
      s.next++;
      auto drop_ref = [&](std::int32_t b) {
        const auto ub = static_cast<std::uint32_t>(b);
        if (--s.bank_refs[ub] == 0 && owner[ub] == static_cast<std::int64_t>(chosen.idx))
          owner[ub] = -1;
      };
      drop_ref(cmd.bank);
      if (cmd.kind == CommandKind::Transfer) drop_ref(cmd.dst_bank);
    }

    if (s.next == s.cmds.size()) finish(chosen.idx, applied.completion);
  }

  tl.requests.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ReqState& s = st[i];
    const BulkRequest& r = *s.req;
    RequestRecord rec;
    rec.seq = r.seq;
    rec.kind = r.kind;
    rec.origin = r.origin;
    rec.op_class = s.op_class;
    rec.mechanism = s.mech;
    rec.has_mechanism = s.has_mech;
    rec.addr = r.addr;
    rec.src = r.src;
    rec.dst = r.dst;
    rec.len = r.len;
    rec.arrival = r.arrival;
    rec.start = s.start;
    rec.end = s.end;
    rec.channel_bytes = s.channel_bytes;
    tl.requests.push_back(rec);
    tl.makespan = std::max(tl.makespan, s.end);
  }
  tl.channel_bytes = dram_.channel_bytes();
  return tl;
}

}  // namespace rowsim
