#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rowsim/trace.hpp"

using namespace rowsim;

namespace {

// Expects a TraceError carrying this 1-based line number.
template <typename Fn>
void check_trace_error_at(Fn&& fn, std::size_t line) {
  try {
    fn();
    FAIL_CHECK("expected a trace error on line " << line);
  } catch (const TraceError& e) {
    CHECK(e.line() == line);
  }
}

}  // namespace

TEST_CASE("records parse with timestamps, hex, comments and blank lines") {
  const char* text =
      "# warmup\n"
      "@0 W 0x1000\n"
      "@1.875 R 4096\n"
      "\n"
      "@5 C 0x0 0x2000 4096   # page copy\n"
      "@5 Z 0x3000 128\n"
      "@6 F\n"
      "@7 CW 12\n";
  const auto recs = parse_trace(text, 64);
  REQUIRE(recs.size() == 6);

  CHECK(recs[0].op == TraceOp::Write);
  CHECK(recs[0].addr == 0x1000);
  CHECK(recs[0].at == 0);
  CHECK(recs[0].line == 2);

  CHECK(recs[1].op == TraceOp::Read);
  CHECK(recs[1].addr == 4096);
  CHECK(recs[1].at == 1875);

  CHECK(recs[2].op == TraceOp::Copy);
  CHECK(recs[2].src == 0);
  CHECK(recs[2].dst == 0x2000);
  CHECK(recs[2].len == 4096);
  CHECK(recs[2].at == 5000);
  CHECK(recs[2].line == 5);

  CHECK(recs[3].op == TraceOp::Zero);
  CHECK(recs[3].dst == 0x3000);
  CHECK(recs[3].len == 128);

  CHECK(recs[4].op == TraceOp::Fork);
  CHECK(recs[5].op == TraceOp::CowWrite);
  CHECK(recs[5].vpage == 12);
}

TEST_CASE("untimed records space out by the default gap") {
  const char* text =
      "R 0x0\n"
      "R 0x40\n"
      "@100 R 0x80\n"
      "R 0xc0\n";
  const auto recs = parse_trace(text, 64, 2500);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].at == 0);
  CHECK(recs[1].at == 2500);
  CHECK(recs[2].at == 100000);
  CHECK(recs[3].at == 102500);
}

TEST_CASE("parse errors name the offending line") {
  check_trace_error_at([] { parse_trace("R 0x21\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("R 0x0\nW 33\n", 64); }, 2);
  check_trace_error_at([] { parse_trace("C 0x0 0x40 63\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("@5 R 0x0\n@4 R 0x0\n", 64); }, 2);
  check_trace_error_at([] { parse_trace("R 0x0\nQ 0x40\n", 64); }, 2);
  check_trace_error_at([] { parse_trace("R 0x0 0x40\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("Z 0x0\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("@5\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("@oops R 0x0\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("R zero\n", 64); }, 1);
  check_trace_error_at([] { parse_trace("F extra\n", 64); }, 1);
}

TEST_CASE("serialize and parse round-trip every record shape") {
  std::vector<TraceRecord> recs;
  TraceRecord r;
  r.op = TraceOp::Write;
  r.addr = 0x7ff40;
  r.at = 0;
  recs.push_back(r);

  r = TraceRecord{};
  r.op = TraceOp::Read;
  r.addr = 64;
  r.at = 1875;  // fractional nanoseconds survive the text form
  recs.push_back(r);

  r = TraceRecord{};
  r.op = TraceOp::Copy;
  r.src = 0x1000;
  r.dst = 0x3000;
  r.len = 8192;
  r.at = 50625;
  recs.push_back(r);

  r = TraceRecord{};
  r.op = TraceOp::Zero;
  r.dst = 0x5000;
  r.len = 4096;
  r.at = 50625;
  recs.push_back(r);

  r = TraceRecord{};
  r.op = TraceOp::Fork;
  r.at = 60000;
  recs.push_back(r);

  r = TraceRecord{};
  r.op = TraceOp::CowWrite;
  r.vpage = 933;
  r.at = 71875;
  recs.push_back(r);

  const std::string text = serialize_trace(recs);
  const auto back = parse_trace(text, 64);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CAPTURE(i);
    CHECK(back[i] == recs[i]);
  }

  // Serializing the parsed records reproduces the text exactly.
  CHECK(serialize_trace(back) == text);
}

TEST_CASE("load rejects missing files and reads real ones") {
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.txt", 64), SimError);

  const std::string path = "test_trace_roundtrip.tmp";
  {
    std::ofstream out(path);
    out << "@0 W 0x0\n@1 R 0x40\n";
  }
  const auto recs = load_trace(path, 64);
  std::remove(path.c_str());
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].at == 1000);
}

TEST_CASE("write patterns are a pure function of seed, address and sequence") {
  std::vector<std::uint8_t> a(64), b(64), c(64);
  fill_pattern(a, 1, 0x1000, 5);
  fill_pattern(b, 1, 0x1000, 5);
  CHECK(a == b);

  fill_pattern(c, 2, 0x1000, 5);
  CHECK(a != c);
  fill_pattern(c, 1, 0x1040, 5);
  CHECK(a != c);
  fill_pattern(c, 1, 0x1000, 6);
  CHECK(a != c);

  // The underlying mixer matches the published constants.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("forkbench generation is deterministic and shaped as documented") {
  ForkbenchParams p;
  p.num_pages = 40;
  p.write_fraction = 0.25;
  p.page_bytes = 4096;
  p.line_bytes = 64;
  p.gap_ns = 2.0;
  p.seed = 7;

  const auto recs = gen_forkbench(p);
  CHECK(recs == gen_forkbench(p));

  // 40 pre-fault writes, one fork, then ten copy-on-write writes each
  // paired with a read.
  REQUIRE(recs.size() == 40 + 1 + 2 * 10);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(recs[i].op == TraceOp::Write);
    CHECK(recs[i].addr == i * p.page_bytes);
    CHECK(recs[i].at == static_cast<Time>(i) * 2000);
  }
  CHECK(recs[40].op == TraceOp::Fork);
  for (std::size_t i = 41; i < recs.size(); i += 2) {
    CHECK(recs[i].op == TraceOp::CowWrite);
    CHECK(recs[i].vpage < p.num_pages);
    CHECK(recs[i + 1].op == TraceOp::Read);
    CHECK(recs[i + 1].addr < p.num_pages * p.page_bytes);
    CHECK(recs[i + 1].addr % p.line_bytes == 0);
  }

  ForkbenchParams other = p;
  other.seed = 8;
  CHECK(!(gen_forkbench(other) == recs));

  ForkbenchParams bad = p;
  bad.num_pages = 0;
  CHECK_THROWS_AS(gen_forkbench(bad), ConfigError);
  bad = p;
  bad.write_fraction = 1.5;
  CHECK_THROWS_AS(gen_forkbench(bad), ConfigError);
  bad = p;
  bad.page_bytes = 100;
  CHECK_THROWS_AS(gen_forkbench(bad), ConfigError);
}

TEST_CASE("bulkzero generation walks pages at the configured stride") {
  BulkzeroParams p;
  p.pages = 5;
  p.stride_pages = 3;
  p.page_bytes = 4096;
  p.gap_ns = 1.0;

  const auto recs = gen_bulkzero(p);
  REQUIRE(recs.size() == 5);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].op == TraceOp::Zero);
    CHECK(recs[i].dst == i * 3 * 4096);
    CHECK(recs[i].len == 4096);
    CHECK(recs[i].at == static_cast<Time>(i) * 1000);
  }

  BulkzeroParams bad = p;
  bad.stride_pages = 0;
  CHECK_THROWS_AS(gen_bulkzero(bad), ConfigError);
  bad = p;
  bad.pages = 0;
  CHECK_THROWS_AS(gen_bulkzero(bad), ConfigError);
}
