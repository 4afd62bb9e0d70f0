#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "driftkit/emulator.hpp"
#include "driftkit/error.hpp"

using namespace driftkit;
using namespace driftkit::emu;

namespace {

ConceptProfile tiny_profile() {
  ConceptProfile p;
  p.concept_id = 1;
  p.image_dims = {16};
  p.request_period_ms = 1000;
  p.period_jitter_frac = 0.0;
  p.activation_time_ms = 0;
  return p;
}

// Request starts within one UE: intra-burst packets are 1 ms apart, so any
// larger gap begins a new request.
std::vector<std::size_t> request_starts(const Dataset& records) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i == 0 || records[i].timestamp_ms - records[i - 1].timestamp_ms > 1) {
      starts.push_back(i);
    }
  }
  return starts;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("payload_bytes follows dim^2 * bpp + overhead") {
  ConceptProfile p = tiny_profile();
  p.image_dims = {16, 32, 512};
  CHECK(payload_bytes(16, p) == 822);
  CHECK(payload_bytes(32, p) == 3126);
  p.header_overhead_bytes = 0;
  CHECK(payload_bytes(512, p) == 786432);
}

TEST_CASE("payload_bytes rejects dims outside the profile") {
  ConceptProfile p = tiny_profile();
  CHECK_THROWS_AS(payload_bytes(48, p), Error);
  try {
    payload_bytes(48, p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("segment_payload splits at the MTU with a remainder") {
  CHECK(segment_payload(3000, 1400) == std::vector<std::uint32_t>{1400, 1400, 200});
  CHECK(segment_payload(1400, 1400) == std::vector<std::uint32_t>{1400});
  CHECK(segment_payload(822, 1400) == std::vector<std::uint32_t>{822});
  CHECK_THROWS_AS(segment_payload(0, 1400), Error);
}

TEST_CASE("segment_payload conserves bytes and respects the MTU") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t total = 1 + rng.next_below(5'000'000);
    const std::uint32_t mtu = 1 + static_cast<std::uint32_t>(rng.next_below(9000));
    const auto segments = segment_payload(total, mtu);
    CHECK(segments.size() == (total + mtu - 1) / mtu);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      sum += segments[i];
      CHECK(segments[i] >= 1);
      CHECK(segments[i] <= mtu);
      if (i + 1 < segments.size()) CHECK(segments[i] == mtu);
    }
    CHECK(sum == total);
  }
}

TEST_CASE("emulate_ue with zero jitter lands on the exact schedule") {
  const auto records = emulate_ue(tiny_profile(), "ueA", 3500, Rng(1));
  REQUIRE(records.size() == 4);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].timestamp_ms == i * 1000);
    CHECK(records[i].length_bytes == 822);
    CHECK(records[i].ue_id == "ueA");
    CHECK(records[i].concept_id == 1);
    CHECK(records[i].direction == Direction::Uplink);
  }
}

TEST_CASE("multi-packet requests go out back-to-back 1 ms apart") {
  ConceptProfile p = tiny_profile();
  p.image_dims = {32};  // 3126 bytes -> [1400, 1400, 326]
  const auto records = emulate_ue(p, "ueA", 900, Rng(1));
  REQUIRE(records.size() == 3);
  CHECK(records[0].timestamp_ms == 0);
  CHECK(records[1].timestamp_ms == 1);
  CHECK(records[2].timestamp_ms == 2);
  CHECK(records[0].length_bytes == 1400);
  CHECK(records[2].length_bytes == 326);
}

TEST_CASE("emulate_ue is deterministic for a fixed seed") {
  auto p = tiny_profile();
  p.period_jitter_frac = 0.2;
  p.image_dims = {16, 32};
  const auto a = emulate_ue(p, "ueA", 60000, Rng::derive(99, "ueA"));
  const auto b = emulate_ue(p, "ueA", 60000, Rng::derive(99, "ueA"));
  CHECK(a == b);
  const auto c = emulate_ue(p, "ueA", 60000, Rng::derive(100, "ueA"));
  CHECK(a != c);
}

TEST_CASE("emulate_ue rejects empty profiles") {
  ConceptProfile p = tiny_profile();
  p.image_dims.clear();
  CHECK_THROWS_AS(emulate_ue(p, "ueA", 1000, Rng(1)), Error);
}

TEST_CASE("class three requests less often than class one") {
  const auto timeline = default_timeline(120000, 1, 5);
  const auto c1 = emulate_ue(timeline.profiles[0], "a", 120000, Rng::derive(5, "a"));
  ConceptProfile three = timeline.profiles[2];
  three.activation_time_ms = 0;
  const auto c3 = emulate_ue(three, "b", 120000, Rng::derive(5, "b"));
  CHECK(request_starts(c1).size() > request_starts(c3).size());
}

TEST_CASE("packet bytes are conserved against the request payloads") {
  ConceptProfile p = tiny_profile();
  p.image_dims = {16, 32};
  p.period_jitter_frac = 0.2;
  p.request_period_ms = 200;
  const auto records = emulate_ue(p, "ueA", 30000, Rng::derive(11, "ueA"));
  const auto starts = request_starts(records);
  REQUIRE(starts.size() > 100);

  const std::set<std::uint64_t> valid = {payload_bytes(16, p), payload_bytes(32, p)};
  std::uint64_t total = 0;
  std::uint64_t request_total = 0;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    const std::size_t end = r + 1 < starts.size() ? starts[r + 1] : records.size();
    std::uint64_t burst = 0;
    for (std::size_t i = starts[r]; i < end; ++i) burst += records[i].length_bytes;
    CHECK(valid.count(burst) == 1);
    request_total += burst;
  }
  for (const auto& rec : records) total += rec.length_bytes;
  CHECK(total == request_total);
}

TEST_CASE("emulate_experiment stages the concepts and keeps them active") {
  const auto timeline = default_timeline(960000, 2, 42);
  const auto records = emulate_experiment(timeline);
  REQUIRE(!records.empty());

  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].timestamp_ms >= records[i - 1].timestamp_ms);
  }
  for (const auto& r : records) {
    if (r.timestamp_ms < 320000) CHECK(r.concept_id == 1);
  }
  // every concept keeps transmitting once activated
  std::map<int, std::uint64_t> last_seen;
  for (const auto& r : records) last_seen[r.concept_id] = r.timestamp_ms;
  for (int cid = 1; cid <= 3; ++cid) {
    CHECK(last_seen.at(cid) > 960000 - 3 * timeline.profiles[cid - 1].request_period_ms);
  }
}

TEST_CASE("mean request gaps track the configured periods and ordering") {
  const auto timeline = default_timeline(960000, 2, 9);
  const auto records = emulate_experiment(timeline);
  const auto stats = concept_stats(records);
  REQUIRE(stats.size() == 3);
  double previous = 0.0;
  for (const auto& s : stats) {
    const auto period = static_cast<double>(
        timeline.profiles[static_cast<std::size_t>(s.concept_id - 1)].request_period_ms);
    CHECK(s.request_count > 100);
    CHECK(s.mean_request_gap_ms == doctest::Approx(period).epsilon(0.05));
    CHECK(s.mean_request_gap_ms > previous);
    previous = s.mean_request_gap_ms;
  }
}

TEST_CASE("zero UEs per concept yields an empty dataset") {
  const auto timeline = default_timeline(1000, 0, 1);
  CHECK(emulate_experiment(timeline).empty());
}

TEST_CASE("dataset CSV round-trips through write and load") {
  const auto timeline = default_timeline(30000, 1, 3);
  const auto records = emulate_experiment(timeline);
  const auto path = temp_file("driftkit_roundtrip.csv");
  write_dataset_csv(records, path);
  const auto loaded = load_dataset(path);
  CHECK(loaded.warnings.empty());
  CHECK(loaded.records == records);
  std::filesystem::remove(path);
}

TEST_CASE("load_dataset maps custom columns") {
  const auto path = temp_file("driftkit_minimal.csv");
  {
    std::ofstream out(path);
    out << "ts,ue,len\n5,ueA,100\n";
  }
  ColumnMap map;
  map.timestamp_ms = "ts";
  map.ue_id = "ue";
  map.length_bytes = "len";
  map.concept_id = "";
  map.direction = "";
  const auto loaded = load_dataset(path, map);
  REQUIRE(loaded.records.size() == 1);
  CHECK(loaded.records[0].timestamp_ms == 5);
  CHECK(loaded.records[0].ue_id == "ueA");
  CHECK(loaded.records[0].length_bytes == 100);
  CHECK(loaded.records[0].concept_id == 0);
  CHECK(loaded.warnings.empty());
  std::filesystem::remove(path);
}

TEST_CASE("load_dataset rejects bad rows with row-numbered diagnostics") {
  const auto path = temp_file("driftkit_badrow.csv");
  {
    std::ofstream out(path);
    out << "ts,ue,len\n5,ueA,abc\n6,ueA,200\n";
  }
  ColumnMap map;
  map.timestamp_ms = "ts";
  map.ue_id = "ue";
  map.length_bytes = "len";
  const auto loaded = load_dataset(path, map);
  REQUIRE(loaded.records.size() == 1);
  CHECK(loaded.records[0].length_bytes == 200);
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find("row 2") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("load_dataset warns on an empty body and errors on bad schema") {
  const auto path = temp_file("driftkit_empty.csv");
  {
    std::ofstream out(path);
    out << "timestamp_ms,ue_id,concept_id,length_bytes,direction\n";
  }
  const auto loaded = load_dataset(path);
  CHECK(loaded.records.empty());
  CHECK(!loaded.warnings.empty());

  ColumnMap map;
  map.timestamp_ms = "nope";
  try {
    load_dataset(path, map);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
  }
  std::filesystem::remove(path);

  try {
    load_dataset(temp_file("driftkit_does_not_exist.csv"));
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("timeline config JSON round-trips") {
  const auto timeline = default_timeline(960000, 3, 42);
  const auto j = timeline_to_json(timeline);
  const auto back = timeline_from_json(j);
  CHECK(back.duration_ms == timeline.duration_ms);
  CHECK(back.seed == timeline.seed);
  CHECK(back.ues_per_concept == timeline.ues_per_concept);
  REQUIRE(back.profiles.size() == 3);
  CHECK(back.profiles[1].image_dims == std::vector<int>{48, 128});
  CHECK(back.profiles[2].activation_time_ms == timeline.profiles[2].activation_time_ms);
}
