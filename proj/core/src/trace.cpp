#include "rowsim/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace rowsim {

const char* to_string(TraceOp op) {
  switch (op) {
    case TraceOp::Read: return "R";
    case TraceOp::Write: return "W";
    case TraceOp::Copy: return "C";
    case TraceOp::Zero: return "Z";
    case TraceOp::Fork: return "F";
    case TraceOp::CowWrite: return "CW";
  }
  return "?";
}

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  return a.op == b.op && a.at == b.at && a.addr == b.addr && a.src == b.src && a.dst == b.dst &&
         a.len == b.len && a.vpage == b.vpage;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

std::uint64_t parse_u64(std::string_view tok, std::uint32_t line) {
  std::uint64_t value = 0;
  const bool hex = tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X');
  const char* first = tok.data() + (hex ? 2 : 0);
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, value, hex ? 16 : 10);
  if (res.ec != std::errc{} || res.ptr != last)
    throw TraceError(line, "expected a number, got '" + std::string(tok) + "'");
  return value;
}

Time parse_timestamp(std::string_view tok, std::uint32_t line) {
  const std::string text(tok.substr(1));
  if (text.empty()) throw TraceError(line, "empty timestamp");
  std::size_t pos = 0;
  double ns = 0.0;
  try {
    ns = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw TraceError(line, "bad timestamp '" + text + "'");
  }
  if (pos != text.size() || ns < 0.0 || !std::isfinite(ns))
    throw TraceError(line, "bad timestamp '" + text + "'");
  return static_cast<Time>(std::llround(ns * 1000.0));
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::string_view text, std::uint32_t line_bytes,
                                     Time default_gap) {
  if (line_bytes == 0) throw InternalError("trace parser needs a positive line size");
  std::vector<TraceRecord> out;
  std::uint32_t lineno = 0;
  Time prev = 0;
  bool first = true;

  auto check_aligned = [&](std::uint64_t v, const char* what, std::uint32_t ln) {
    if (v % line_bytes != 0)
      throw TraceError(ln, std::string(what) + " not aligned to " + std::to_string(line_bytes) +
                               " bytes");
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    auto toks = tokenize(raw);
    if (toks.empty()) continue;

    TraceRecord rec;
    rec.line = lineno;
    std::size_t k = 0;
    if (toks[0].front() == '@') {
      rec.at = parse_timestamp(toks[0], lineno);
      ++k;
    } else {
      rec.at = first ? 0 : prev + default_gap;
    }
    if (k >= toks.size()) throw TraceError(lineno, "timestamp without a record");
    if (!first && rec.at < prev) throw TraceError(lineno, "timestamp goes backwards");

    const std::string_view op = toks[k++];
    const std::size_t args = toks.size() - k;
    auto need = [&](std::size_t n) {
      if (args != n)
        throw TraceError(lineno, std::string(op) + " takes " + std::to_string(n) +
                                     " argument(s), got " + std::to_string(args));
    };

    if (op == "R" || op == "W") {
      need(1);
      rec.op = op == "R" ? TraceOp::Read : TraceOp::Write;
      rec.addr = parse_u64(toks[k], lineno);
      check_aligned(rec.addr, "address", lineno);
    } else if (op == "C") {
      need(3);
      rec.op = TraceOp::Copy;
      rec.src = parse_u64(toks[k], lineno);
      rec.dst = parse_u64(toks[k + 1], lineno);
      rec.len = parse_u64(toks[k + 2], lineno);
      check_aligned(rec.src, "source", lineno);
      check_aligned(rec.dst, "destination", lineno);
      check_aligned(rec.len, "length", lineno);
    } else if (op == "Z") {
      need(2);
      rec.op = TraceOp::Zero;
      rec.dst = parse_u64(toks[k], lineno);
      rec.len = parse_u64(toks[k + 1], lineno);
      check_aligned(rec.dst, "destination", lineno);
      check_aligned(rec.len, "length", lineno);
    } else if (op == "F") {
      need(0);
      rec.op = TraceOp::Fork;
    } else if (op == "CW") {
      need(1);
      rec.op = TraceOp::CowWrite;
      rec.vpage = parse_u64(toks[k], lineno);
    } else {
      throw TraceError(lineno, "unknown record '" + std::string(op) + "'");
    }

    prev = rec.at;
    first = false;
    out.push_back(rec);
  }
  return out;
}

namespace {

std::string format_ns(Time ps) {
  if (ps % 1000 == 0) return std::to_string(ps / 1000);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(ps / 1000),
                static_cast<long long>(ps % 1000));
  return buf;
}

std::string hex(Addr a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(a));
  return buf;
}

}  // namespace

std::string serialize_trace(std::span<const TraceRecord> records) {
  std::ostringstream out;
  for (const TraceRecord& r : records) {
    out << '@' << format_ns(r.at) << ' ';
    switch (r.op) {
      case TraceOp::Read:
      case TraceOp::Write:
        out << to_string(r.op) << ' ' << hex(r.addr);
        break;
      case TraceOp::Copy:
        out << "C " << hex(r.src) << ' ' << hex(r.dst) << ' ' << r.len;
        break;
      case TraceOp::Zero:
        out << "Z " << hex(r.dst) << ' ' << r.len;
        break;
      case TraceOp::Fork:
        out << 'F';
        break;
      case TraceOp::CowWrite:
        out << "CW " << r.vpage;
        break;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<TraceRecord> load_trace(const std::string& path, std::uint32_t line_bytes,
                                    Time default_gap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError(ErrorKind::Trace, "cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), line_bytes, default_gap);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_pattern(std::span<std::uint8_t> out, std::uint64_t seed, Addr addr, std::uint64_t seq) {
  std::uint64_t state = splitmix64(seed ^ splitmix64(addr) ^ splitmix64(seq * 0x9e3779b9ULL + 1));
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i % 8 == 0) {
      state = splitmix64(state);
      word = state;
    }
    out[i] = static_cast<std::uint8_t>(word >> ((i % 8) * 8));
  }
}

std::vector<TraceRecord> gen_forkbench(const ForkbenchParams& p) {
  if (p.num_pages == 0) throw ConfigError("workload.num_pages", "must be positive");
  if (p.write_fraction < 0.0 || p.write_fraction > 1.0)
    throw ConfigError("workload.write_fraction", "must be within [0, 1]");
  if (p.page_bytes == 0 || p.line_bytes == 0 || p.page_bytes % p.line_bytes != 0)
    throw ConfigError("workload.page_bytes", "must be a positive multiple of line_bytes");

  std::mt19937_64 rng(p.seed);
  const Time gap = ns_to_ps(p.gap_ns);
  Time t = 0;
  std::vector<TraceRecord> out;

  for (std::uint64_t page = 0; page < p.num_pages; ++page) {
    TraceRecord r;
    r.op = TraceOp::Write;
    r.at = t;
    r.addr = page * p.page_bytes;
    out.push_back(r);
    t += gap;
  }

  TraceRecord fork;
  fork.op = TraceOp::Fork;
  fork.at = t;
  out.push_back(fork);
  t += gap;

  const auto writes = static_cast<std::uint64_t>(
      std::llround(p.write_fraction * static_cast<double>(p.num_pages)));
  std::vector<std::uint64_t> pages(p.num_pages);
  for (std::uint64_t i = 0; i < p.num_pages; ++i) pages[i] = i;
  std::shuffle(pages.begin(), pages.end(), rng);
  pages.resize(writes);

  const std::uint64_t lines_per_page = p.page_bytes / p.line_bytes;
  for (std::uint64_t page : pages) {
    TraceRecord cw;
    cw.op = TraceOp::CowWrite;
    cw.at = t;
    cw.vpage = page;
    out.push_back(cw);
    t += gap;

    TraceRecord rd;
    rd.op = TraceOp::Read;
    rd.at = t;
    rd.addr = (rng() % p.num_pages) * p.page_bytes + (rng() % lines_per_page) * p.line_bytes;
    out.push_back(rd);
    t += gap;
  }
  return out;
}

std::vector<TraceRecord> gen_bulkzero(const BulkzeroParams& p) {
  if (p.pages == 0) throw ConfigError("workload.pages", "must be positive");
  if (p.stride_pages == 0) throw ConfigError("workload.stride_pages", "must be positive");
  if (p.page_bytes == 0) throw ConfigError("workload.page_bytes", "must be positive");

  const Time gap = ns_to_ps(p.gap_ns);
  std::vector<TraceRecord> out;
  Time t = 0;
  for (std::uint64_t i = 0; i < p.pages; ++i) {
    TraceRecord r;
    r.op = TraceOp::Zero;
    r.at = t;
    r.dst = i * p.stride_pages * p.page_bytes;
    r.len = p.page_bytes;
    out.push_back(r);
    t += gap;
  }
  return out;
}

}  // namespace rowsim
