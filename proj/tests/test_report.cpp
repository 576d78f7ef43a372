#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rowsim/report.hpp"

#include "oracles.hpp"

using namespace rowsim;

namespace {

const Geometry kG = oracle::toy_geometry();
const Timing kT = ddr3_1066_timing();

// One same-subarray copy, one zero and one read. Under the default mapping
// page 4 is the next row of (bank 0, subarray 0).
Timeline sample_timeline() {
  std::vector<BulkRequest> reqs;
  BulkRequest cp;
  cp.kind = RequestKind::Copy;
  cp.src = 0;
  cp.dst = 4 * kG.row_size_bytes;
  cp.len = kG.row_size_bytes;
  cp.seq = 0;
  reqs.push_back(cp);

  BulkRequest z;
  z.kind = RequestKind::Zero;
  z.dst = 3 * kG.row_size_bytes;
  z.len = kG.row_size_bytes;
  z.seq = 1;
  z.origin = Origin::Meminit;
  reqs.push_back(z);

  BulkRequest rd;
  rd.kind = RequestKind::Read;
  rd.addr = 2 * kG.row_size_bytes;
  rd.len = kG.cacheline_bytes;
  rd.seq = 2;
  reqs.push_back(rd);

  Controller ctl(kG, kT, ControllerConfig{});
  return ctl.run(reqs);
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') n++;
  return n;
}

}  // namespace

TEST_CASE("summaries aggregate latency, energy and traffic by class") {
  const Timeline tl = sample_timeline();
  const SimStats stats = summarize(tl, PowerParams{});

  CHECK(stats.makespan == tl.makespan);
  CHECK(stats.channel_bytes == tl.channel_bytes);
  CHECK(stats.energy.total_nj() == doctest::Approx(account(tl, PowerParams{}).total_nj()));

  REQUIRE(stats.by_class.count(OpClass::CopyIntraSubarray) == 1);
  REQUIRE(stats.by_class.count(OpClass::Zeroing) == 1);
  REQUIRE(stats.by_class.count(OpClass::Access) == 1);
  CHECK(stats.by_class.at(OpClass::CopyIntraSubarray).requests == 1);
  CHECK(stats.by_class.at(OpClass::Zeroing).requests == 1);
  CHECK(stats.by_class.at(OpClass::Access).requests == 1);
  CHECK(stats.by_class.at(OpClass::Access).channel_bytes == kG.cacheline_bytes);

  std::uint64_t class_requests = 0;
  for (const auto& [klass, c] : stats.by_class) class_requests += c.requests;
  CHECK(class_requests == tl.requests.size());

  CHECK(stats.mechanism_counts.at(Mechanism::Fpm) == 1);
  CHECK(stats.mechanism_counts.at(Mechanism::FpmZero) == 1);
  CHECK(stats.origin_counts.at(Origin::Meminit) == 1);

  // Classes partition the per-request energy; background is global.
  double class_energy = 0.0;
  for (const auto& [klass, c] : stats.by_class) class_energy += c.energy_nj;
  CHECK(class_energy ==
        doctest::Approx(stats.energy.total_nj() - stats.energy.background_nj));
}

TEST_CASE("mean latency averages over the class's requests") {
  ClassStats c;
  CHECK(c.mean_latency_ns() == 0.0);
  c.requests = 2;
  c.total_latency = 100000;  // 100 ns over two requests
  CHECK(c.mean_latency_ns() == doctest::Approx(50.0));
}

TEST_CASE("json reports are deterministic and carry the documented keys") {
  const Timeline tl = sample_timeline();
  const SimStats stats = summarize(tl, PowerParams{});
  const std::string text = report_json(stats, nullptr);
  CHECK(text == report_json(stats, nullptr));

  const auto j = nlohmann::json::parse(text);
  CHECK(j.contains("makespan_ns"));
  CHECK(j.contains("channel_bytes"));
  CHECK(j.contains("energy_nj"));
  CHECK(j.contains("commands"));
  CHECK(j.contains("classes"));
  CHECK(j.contains("mechanisms"));
  CHECK(j.contains("origins"));
  CHECK(!j.contains("system"));

  CHECK(j["channel_bytes"].get<std::uint64_t>() == tl.channel_bytes);
  CHECK(j["energy_nj"]["total"].get<double>() ==
        doctest::Approx(stats.energy.total_nj()));
  CHECK(j["commands"]["transfer"].get<std::uint64_t>() == 0);
  CHECK(j["mechanisms"].contains("fpm"));

  SystemStats sys;
  sys.records = 3;
  sys.cache_hits = 1;
  const auto with_sys = nlohmann::json::parse(report_json(stats, &sys));
  CHECK(with_sys["system"]["records"].get<std::uint64_t>() == 3);
  CHECK(with_sys["system"]["page_table"].contains("cow_copies"));
}

TEST_CASE("csv reports emit a header and one row per request") {
  const Timeline tl = sample_timeline();
  const std::string text = report_csv(tl);
  CHECK(count_lines(text) == 1 + tl.requests.size());

  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "seq,kind,origin,class,mechanism,arrival_ns,start_ns,end_ns,latency_ns,"
        "channel_bytes");

  std::string row;
  std::getline(in, row);
  CHECK(row.find("copy") != std::string::npos);
  CHECK(row.find("fpm") != std::string::npos);

  // Reads carry no mechanism column value.
  std::getline(in, row);
  std::getline(in, row);
  CHECK(row.find(",-,") != std::string::npos);
}

TEST_CASE("table reports fit a terminal and mention every class") {
  const Timeline tl = sample_timeline();
  const SimStats stats = summarize(tl, PowerParams{});
  SystemStats sys;
  sys.records = 3;
  const std::string text = report_table(stats, &sys);
  CHECK(text == report_table(stats, &sys));

  CHECK(text.find("makespan") != std::string::npos);
  CHECK(text.find("copy_intra_subarray") != std::string::npos);
  CHECK(text.find("zeroing") != std::string::npos);
  CHECK(text.find("access") != std::string::npos);
  CHECK(text.find("fpm") != std::string::npos);

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) CHECK(line.size() <= 100);
}
