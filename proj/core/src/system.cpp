#include "rowsim/system.hpp"

#include <algorithm>

namespace rowsim {

FlatMemory::FlatMemory(std::uint32_t page_bytes) : page_bytes_(page_bytes) {
  if (page_bytes_ == 0) throw InternalError("flat memory needs a positive page size");
}

std::uint8_t FlatMemory::byte(Addr a) const {
  const auto it = pages_.find(a / page_bytes_);
  if (it == pages_.end()) return 0;
  return it->second[a % page_bytes_];
}

void FlatMemory::read(Addr a, std::span<std::uint8_t> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = byte(a + i);
}

void FlatMemory::write(Addr a, std::span<const std::uint8_t> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& page = pages_[(a + i) / page_bytes_];
    if (page.empty()) page.assign(page_bytes_, 0);
    page[(a + i) % page_bytes_] = data[i];
  }
}

void FlatMemory::fill(Addr a, std::uint64_t len, std::uint8_t value) {
  for (std::uint64_t i = 0; i < len; ++i) {
    auto& page = pages_[(a + i) / page_bytes_];
    if (page.empty()) page.assign(page_bytes_, 0);
    page[(a + i) % page_bytes_] = value;
  }
}

void FlatMemory::copy(Addr src, Addr dst, std::uint64_t len) {
  if (len == 0) return;
  if (src < dst + len && dst < src + len)
    throw InternalError("flat memory copy ranges overlap");
  std::vector<std::uint8_t> buf(len);
  read(src, buf);
  write(dst, buf);
}

System::System(const Geometry& g, const Timing& t, const SystemConfig& cfg)
    : geom_(g),
      cfg_(cfg),
      ctl_(g, t, ControllerConfig{cfg.mapping, cfg.policy, cfg.flags}),
      pt_(g, cfg.mapping),
      cache_(cfg.cache),
      ref_(g.row_size_bytes) {
  if (cfg.cache.line_bytes != g.cacheline_bytes)
    throw ConfigError("cache.line_bytes", "must match the geometry cacheline size");
  if (cfg.zi && !cfg.cache_enabled)
    throw ConfigError("features.zi", "needs the cache enabled");
}

void System::emit(BulkRequest req, Time at) {
  req.arrival = at;
  req.seq = next_seq_++;
  pending_.push_back(std::move(req));
}

void System::handle_eviction(std::optional<Eviction> ev, Time at) {
  if (!ev || !ev->dirty) return;
  BulkRequest wb;
  wb.kind = RequestKind::Write;
  wb.addr = ev->addr;
  wb.origin = Origin::Writeback;
  wb.payload = std::move(ev->data);
  emit(std::move(wb), at);
  stats_.writebacks++;
}

void System::line_read(Addr paddr, Time at) {
  if (!cfg_.cache_enabled) {
    BulkRequest rd;
    rd.kind = RequestKind::Read;
    rd.addr = paddr;
    rd.origin = Origin::Trace;
    emit(std::move(rd), at);
    return;
  }
  std::vector<std::uint8_t> buf(geom_.cacheline_bytes);
  if (cache_.read(paddr, buf)) {
    stats_.cache_hits++;
    return;
  }
  stats_.cache_misses++;
  stats_.fills++;
  ref_.read(paddr, buf);
  BulkRequest fill;
  fill.kind = RequestKind::Read;
  fill.addr = paddr;
  fill.origin = Origin::CacheFill;
  emit(std::move(fill), at);
  handle_eviction(cache_.insert(paddr, buf, LineState::Clean), at);
}

void System::line_write(Addr paddr, std::span<const std::uint8_t> payload, Time at) {
  if (!cfg_.cache_enabled) {
    BulkRequest wr;
    wr.kind = RequestKind::Write;
    wr.addr = paddr;
    wr.origin = Origin::Trace;
    wr.payload.assign(payload.begin(), payload.end());
    emit(std::move(wr), at);
    ref_.write(paddr, payload);
    return;
  }
  if (cache_.write(paddr, payload)) {
    stats_.cache_hits++;
  } else {
    // Write-allocate: fill the line with its pre-write contents, then
    // overwrite it in the cache.
    stats_.cache_misses++;
    stats_.fills++;
    std::vector<std::uint8_t> old(geom_.cacheline_bytes);
    ref_.read(paddr, old);
    BulkRequest fill;
    fill.kind = RequestKind::Read;
    fill.addr = paddr;
    fill.origin = Origin::CacheFill;
    emit(std::move(fill), at);
    handle_eviction(cache_.insert(paddr, old, LineState::Clean), at);
    cache_.write(paddr, payload);
  }
  ref_.write(paddr, payload);
}

void System::bulk_copy(Addr psrc, Addr pdst, std::uint64_t len, Origin origin, Time at) {
  if (len == 0) return;
  if (psrc < pdst + len && pdst < psrc + len)
    throw InternalError("bulk copy ranges overlap");
  const std::uint32_t line = geom_.cacheline_bytes;

  if (cfg_.cache_enabled) {
    // Dirty source lines must reach DRAM before the copy reads it there.
    for (std::uint64_t off = 0; off < len; off += line) {
      if (auto data = cache_.clean(psrc + off)) {
        BulkRequest wb;
        wb.kind = RequestKind::Write;
        wb.addr = psrc + off;
        wb.origin = Origin::Writeback;
        wb.payload = std::move(*data);
        emit(std::move(wb), at);
        stats_.writebacks++;
      }
    }
    for (std::uint64_t off = 0; off < len; off += line) {
      const std::span<const std::uint8_t> src_line = cache_.peek(psrc + off);
      if (cfg_.zi && !src_line.empty()) {
        const std::vector<std::uint8_t> data(src_line.begin(), src_line.end());
        handle_eviction(cache_.insert(pdst + off, data, LineState::Dirty), at);
        stats_.copy_lines_installed++;
      } else {
        cache_.invalidate(pdst + off);
      }
    }
  }

  BulkRequest cp;
  cp.kind = RequestKind::Copy;
  cp.src = psrc;
  cp.dst = pdst;
  cp.len = len;
  cp.origin = origin;
  emit(std::move(cp), at);
  ref_.copy(psrc, pdst, len);
}

void System::bulk_zero(Addr pdst, std::uint64_t len, Time at) {
  if (len == 0) return;
  const std::uint32_t line = geom_.cacheline_bytes;
  if (cfg_.cache_enabled) {
    const std::vector<std::uint8_t> zeros(line, 0);
    for (std::uint64_t off = 0; off < len; off += line) {
      if (cfg_.zi) {
        // Only lines already resident become zero lines; absent lines are
        // not worth displacing others for.
        if (cache_.probe(pdst + off) != LineState::Invalid) {
          cache_.insert(pdst + off, zeros, LineState::CleanZero);
          stats_.zero_lines_installed++;
        }
      } else {
        cache_.invalidate(pdst + off);
      }
    }
  }
  BulkRequest z;
  z.kind = RequestKind::Zero;
  z.dst = pdst;
  z.len = len;
  z.origin = Origin::Meminit;
  emit(std::move(z), at);
  ref_.fill(pdst, len, 0);
}

void System::cow_copy(std::uint64_t old_frame, std::uint64_t new_frame, Time at) {
  const std::uint64_t page = geom_.row_size_bytes;
  bulk_copy(old_frame * page, new_frame * page, page, Origin::CowCopy, at);
}

Addr System::resolve_read(Addr vaddr, Time at) {
  (void)at;
  const std::uint64_t page = geom_.row_size_bytes;
  const std::uint64_t frame = pt_.translate_read(0, vaddr / page);
  return frame * page + vaddr % page;
}

Addr System::resolve_write(Addr vaddr, Time at) {
  const std::uint64_t page = geom_.row_size_bytes;
  const CowResult cw = pt_.write_fault(0, vaddr / page);
  if (cw.copied) cow_copy(cw.old_frame, cw.new_frame, at);
  return cw.new_frame * page + vaddr % page;
}

void System::process(const TraceRecord& rec) {
  const std::uint64_t page = geom_.row_size_bytes;
  stats_.records++;
  switch (rec.op) {
    case TraceOp::Read:
      line_read(resolve_read(rec.addr, rec.at), rec.at);
      break;
    case TraceOp::Write: {
      std::vector<std::uint8_t> payload(geom_.cacheline_bytes);
      fill_pattern(payload, cfg_.seed, rec.addr, record_index_);
      line_write(resolve_write(rec.addr, rec.at), payload, rec.at);
      break;
    }
    case TraceOp::Copy: {
      if (rec.src < rec.dst + rec.len && rec.dst < rec.src + rec.len && rec.len > 0)
        throw TraceError(rec.line, "copy source and destination overlap");
      std::uint64_t off = 0;
      while (off < rec.len) {
        const std::uint64_t src_room = page - (rec.src + off) % page;
        const std::uint64_t dst_room = page - (rec.dst + off) % page;
        const std::uint64_t piece = std::min({rec.len - off, src_room, dst_room});
        const Addr psrc = resolve_read(rec.src + off, rec.at);
        const Addr pdst = resolve_write(rec.dst + off, rec.at);
        bulk_copy(psrc, pdst, piece, Origin::Memcopy, rec.at);
        off += piece;
      }
      break;
    }
    case TraceOp::Zero: {
      std::uint64_t off = 0;
      while (off < rec.len) {
        const std::uint64_t room = page - (rec.dst + off) % page;
        const std::uint64_t piece = std::min(rec.len - off, room);
        bulk_zero(resolve_write(rec.dst + off, rec.at), piece, rec.at);
        off += piece;
      }
      break;
    }
    case TraceOp::Fork:
      pt_.fork();
      break;
    case TraceOp::CowWrite: {
      const std::uint32_t proc = pt_.youngest();
      const Addr vaddr = rec.vpage * page;
      std::vector<std::uint8_t> payload(geom_.cacheline_bytes);
      fill_pattern(payload, cfg_.seed, vaddr, record_index_);
      const CowResult cw = pt_.write_fault(proc, rec.vpage);
      if (cw.copied) cow_copy(cw.old_frame, cw.new_frame, rec.at);
      line_write(cw.new_frame * page, payload, rec.at);
      break;
    }
  }
  record_index_++;
}

void System::memcopy(Addr vsrc, Addr vdst, std::uint64_t len, Time at) {
  const std::uint32_t line = geom_.cacheline_bytes;
  if (vsrc % line != 0 || vdst % line != 0 || len % line != 0)
    throw InternalError("memcopy arguments not line aligned");
  if (vsrc < vdst + len && vdst < vsrc + len && len > 0)
    throw InternalError("memcopy ranges overlap");
  const std::uint64_t page = geom_.row_size_bytes;
  std::uint64_t off = 0;
  while (off < len) {
    const std::uint64_t src_room = page - (vsrc + off) % page;
    const std::uint64_t dst_room = page - (vdst + off) % page;
    const std::uint64_t piece = std::min({len - off, src_room, dst_room});
    const Addr psrc = resolve_read(vsrc + off, at);
    const Addr pdst = resolve_write(vdst + off, at);
    bulk_copy(psrc, pdst, piece, Origin::Memcopy, at);
    off += piece;
  }
}

void System::meminit(Addr vdst, std::uint64_t len, std::uint8_t value, Time at) {
  const std::uint32_t line = geom_.cacheline_bytes;
  if (vdst % line != 0 || len % line != 0)
    throw InternalError("meminit arguments not line aligned");
  const std::uint64_t page = geom_.row_size_bytes;

  if (value == 0) {
    std::uint64_t off = 0;
    while (off < len) {
      const std::uint64_t room = page - (vdst + off) % page;
      const std::uint64_t piece = std::min(len - off, room);
      bulk_zero(resolve_write(vdst + off, at), piece, at);
      off += piece;
    }
    return;
  }

  auto init_lines = [&](Addr pdst, std::uint64_t count) {
    const std::vector<std::uint8_t> pattern(line, value);
    for (std::uint64_t i = 0; i < count; ++i) {
      const Addr a = pdst + i * line;
      if (cfg_.cache_enabled) cache_.invalidate(a);
      BulkRequest wr;
      wr.kind = RequestKind::Write;
      wr.addr = a;
      wr.origin = Origin::Meminit;
      wr.payload = pattern;
      emit(std::move(wr), at);
    }
    ref_.fill(pdst, count * line, value);
  };

  if (vdst % page == 0 && len % page == 0 && len >= 2 * page) {
    // Seed the first page over the channel, then replicate it with copies,
    // which the controller may run in DRAM.
    const Addr seed_frame = resolve_write(vdst, at);
    init_lines(seed_frame, page / line);
    for (std::uint64_t off = page; off < len; off += page) {
      const Addr pdst = resolve_write(vdst + off, at);
      if (cfg_.cache_enabled) {
        for (std::uint64_t l = 0; l < page; l += line) cache_.invalidate(pdst + l);
      }
      BulkRequest cp;
      cp.kind = RequestKind::Copy;
      cp.src = seed_frame;
      cp.dst = pdst;
      cp.len = page;
      cp.origin = Origin::Meminit;
      emit(std::move(cp), at);
      ref_.fill(pdst, page, value);
    }
    return;
  }

  std::uint64_t off = 0;
  while (off < len) {
    const std::uint64_t room = page - (vdst + off) % page;
    const std::uint64_t piece = std::min(len - off, room);
    init_lines(resolve_write(vdst + off, at), piece / line);
    off += piece;
  }
}

SystemResult System::run(std::span<const TraceRecord> trace) {
  for (const TraceRecord& rec : trace) process(rec);
  return finish();
}

SystemResult System::finish() {
  if (finished_) throw InternalError("finish called twice");
  finished_ = true;
  stats_.page_table = pt_.stats();
  stats_.processes = pt_.process_count();
  SystemResult res;
  res.timeline = ctl_.run(pending_);
  res.stats = stats_;
  return res;
}

std::uint8_t System::observable_byte(Addr paddr) const {
  const std::uint32_t line = geom_.cacheline_bytes;
  if (cfg_.cache_enabled) {
    const Addr laddr = paddr / line * line;
    const auto data = cache_.peek(laddr);
    if (!data.empty()) return data[paddr % line];
  }
  const Location loc = map_address(paddr, cfg_.mapping, geom_);
  return ctl_.dram().image().byte_at(loc.bank, loc.subarray, loc.row,
                                     loc.column * line + loc.offset);
}

std::uint8_t System::reference_byte(Addr paddr) const { return ref_.byte(paddr); }

}  // namespace rowsim
