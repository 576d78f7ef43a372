#include "rowsim/cache.hpp"

#include <algorithm>

namespace rowsim {

const char* to_string(LineState s) {
  switch (s) {
    case LineState::Invalid: return "invalid";
    case LineState::Clean: return "clean";
    case LineState::Dirty: return "dirty";
    case LineState::CleanZero: return "clean_zero";
  }
  return "?";
}

std::vector<ValidationIssue> validate_cache(const CacheConfig& cfg) {
  std::vector<ValidationIssue> issues;
  if (cfg.line_bytes == 0) issues.push_back({"cache.line_bytes", "must be positive"});
  if (cfg.associativity == 0) issues.push_back({"cache.associativity", "must be positive"});
  if (cfg.capacity_bytes == 0) issues.push_back({"cache.capacity_bytes", "must be positive"});
  if (!issues.empty()) return issues;
  const std::uint64_t way_bytes = static_cast<std::uint64_t>(cfg.line_bytes) * cfg.associativity;
  if (cfg.capacity_bytes % way_bytes != 0)
    issues.push_back(
        {"cache.capacity_bytes", "must be a multiple of line_bytes times associativity"});
  return issues;
}

Cache::Cache(const CacheConfig& cfg) : cfg_(cfg) {
  auto issues = validate_cache(cfg);
  if (!issues.empty()) throw ConfigError(issues.front().field, issues.front().reason);
  num_sets_ = static_cast<std::uint32_t>(
      cfg.capacity_bytes / (static_cast<std::uint64_t>(cfg.line_bytes) * cfg.associativity));
  lines_.resize(static_cast<std::size_t>(num_sets_) * cfg.associativity);
}

std::uint32_t Cache::set_of(Addr line_addr) const {
  if (line_addr % cfg_.line_bytes != 0)
    throw InternalError("cache access not line aligned");
  return static_cast<std::uint32_t>((line_addr / cfg_.line_bytes) % num_sets_);
}

Cache::Line* Cache::find(Addr line_addr) {
  const std::size_t base = static_cast<std::size_t>(set_of(line_addr)) * cfg_.associativity;
  for (std::uint32_t w = 0; w < cfg_.associativity; ++w) {
    Line& l = lines_[base + w];
    if (l.state != LineState::Invalid && l.addr == line_addr) return &l;
  }
  return nullptr;
}

const Cache::Line* Cache::find(Addr line_addr) const {
  return const_cast<Cache*>(this)->find(line_addr);
}

LineState Cache::probe(Addr line_addr) const {
  const Line* l = find(line_addr);
  return l ? l->state : LineState::Invalid;
}

std::span<const std::uint8_t> Cache::peek(Addr line_addr) const {
  const Line* l = find(line_addr);
  if (!l) return {};
  return {l->data.data(), l->data.size()};
}

bool Cache::read(Addr line_addr, std::span<std::uint8_t> out) {
  Line* l = find(line_addr);
  if (!l) return false;
  if (out.size() < l->data.size()) throw InternalError("cache read buffer too small");
  std::copy(l->data.begin(), l->data.end(), out.begin());
  l->stamp = ++clock_;
  return true;
}

bool Cache::write(Addr line_addr, std::span<const std::uint8_t> data) {
  Line* l = find(line_addr);
  if (!l) return false;
  if (data.size() != cfg_.line_bytes) throw InternalError("cache write not a full line");
  l->data.assign(data.begin(), data.end());
  l->state = LineState::Dirty;
  l->stamp = ++clock_;
  return true;
}

std::optional<Eviction> Cache::insert(Addr line_addr, std::span<const std::uint8_t> data,
                                      LineState state) {
  if (data.size() != cfg_.line_bytes) throw InternalError("cache insert not a full line");
  if (state == LineState::Invalid) throw InternalError("cache insert of an invalid line");
  if (Line* l = find(line_addr)) {
    l->data.assign(data.begin(), data.end());
    l->state = state;
    l->stamp = ++clock_;
    return std::nullopt;
  }
  const std::size_t base = static_cast<std::size_t>(set_of(line_addr)) * cfg_.associativity;
  Line* victim = &lines_[base];
  for (std::uint32_t w = 0; w < cfg_.associativity; ++w) {
    Line& l = lines_[base + w];
    if (l.state == LineState::Invalid) {
      victim = &l;
      break;
    }
    if (l.stamp < victim->stamp) victim = &l;
  }
  std::optional<Eviction> evicted;
  if (victim->state != LineState::Invalid) {
    Eviction ev;
    ev.addr = victim->addr;
    ev.dirty = victim->state == LineState::Dirty;
    if (ev.dirty) ev.data = std::move(victim->data);
    evicted = std::move(ev);
  }
  victim->addr = line_addr;
  victim->state = state;
  victim->data.assign(data.begin(), data.end());
  victim->stamp = ++clock_;
  return evicted;
}

std::optional<std::vector<std::uint8_t>> Cache::clean(Addr line_addr) {
  Line* l = find(line_addr);
  if (!l || l->state != LineState::Dirty) return std::nullopt;
  l->state = LineState::Clean;
  return l->data;
}

bool Cache::invalidate(Addr line_addr) {
  Line* l = find(line_addr);
  if (!l) return false;
  l->state = LineState::Invalid;
  l->data.clear();
  return true;
}

std::uint64_t Cache::resident_lines() const {
  std::uint64_t n = 0;
  for (const Line& l : lines_)
    if (l.state != LineState::Invalid) ++n;
  return n;
}

}  // namespace rowsim
