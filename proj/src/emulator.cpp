#include "driftkit/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"

namespace driftkit::emu {

std::string to_string(Direction d) {
  return d == Direction::Uplink ? "uplink" : "downlink";
}

Direction direction_from_string(const std::string& s) {
  if (s == "uplink") return Direction::Uplink;
  if (s == "downlink") return Direction::Downlink;
  fail(ErrorKind::Schema, "unknown direction value '" + s + "'");
}

EmulationTimeline default_timeline(std::uint64_t duration_ms,
                                   int ues_per_concept, std::uint64_t seed) {
  EmulationTimeline t;
  t.duration_ms = duration_ms;
  t.ues_per_concept = ues_per_concept;
  t.seed = seed;
  t.profiles = {
      {1, {16, 32}, 200, 0.2, 0},
      {2, {48, 128}, 500, 0.2, duration_ms / 3},
      {3, {256, 512}, 1000, 0.2, 2 * (duration_ms / 3)},
  };
  return t;
}

std::uint64_t payload_bytes(int dim, const ConceptProfile& profile) {
  if (std::find(profile.image_dims.begin(), profile.image_dims.end(), dim) ==
      profile.image_dims.end()) {
    fail(ErrorKind::InvalidArgument,
         "dimension " + std::to_string(dim) + " not offered by concept " +
             std::to_string(profile.concept_id));
  }
  return static_cast<std::uint64_t>(dim) * dim * profile.bytes_per_pixel +
         profile.header_overhead_bytes;
}

std::vector<std::uint32_t> segment_payload(std::uint64_t total_bytes,
                                           std::uint32_t mtu_bytes) {
  if (total_bytes < 1 || mtu_bytes < 1) {
    fail(ErrorKind::InvalidArgument, "segment_payload requires positive sizes");
  }
  std::vector<std::uint32_t> lengths;
  lengths.reserve(static_cast<std::size_t>((total_bytes + mtu_bytes - 1) / mtu_bytes));
  while (total_bytes > mtu_bytes) {
    lengths.push_back(mtu_bytes);
    total_bytes -= mtu_bytes;
  }
  lengths.push_back(static_cast<std::uint32_t>(total_bytes));
  return lengths;
}

Dataset emulate_ue(const ConceptProfile& profile, const std::string& ue_id,
                   std::uint64_t duration_ms, Rng rng) {
  if (profile.image_dims.empty()) {
    fail(ErrorKind::InvalidArgument,
         "concept " + std::to_string(profile.concept_id) + " has no image dimensions");
  }
  if (profile.period_jitter_frac < 0.0 || profile.period_jitter_frac >= 1.0) {
    fail(ErrorKind::InvalidArgument, "period jitter must lie in [0, 1)");
  }
  if (duration_ms <= profile.activation_time_ms) {
    fail(ErrorKind::InvalidArgument, "duration does not reach activation time");
  }

  Dataset records;
  const double period = static_cast<double>(profile.request_period_ms);
  const double jitter = profile.period_jitter_frac;
  std::uint64_t t = profile.activation_time_ms;
  while (t < duration_ms) {
    const int dim = profile.image_dims[rng.next_below(profile.image_dims.size())];
    const auto segments = segment_payload(payload_bytes(dim, profile), profile.mtu_bytes);
    for (std::size_t k = 0; k < segments.size(); ++k) {
      records.push_back({t + k, ue_id, profile.concept_id, segments[k],
                         Direction::Uplink});
    }
    const double factor = 1.0 - jitter + 2.0 * jitter * rng.next_unit();
    const auto gap = static_cast<std::uint64_t>(
        std::max<long long>(1, std::llround(period * factor)));
    t += gap;
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  return records;
}

std::string ue_name(int concept_id, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%du%02d", concept_id, index);
  return buf;
}

Dataset emulate_experiment(const EmulationTimeline& timeline) {
  if (timeline.ues_per_concept < 0) {
    fail(ErrorKind::InvalidArgument, "ues_per_concept must be non-negative");
  }
  for (const auto& p : timeline.profiles) {
    if (timeline.duration_ms <= p.activation_time_ms) {
      fail(ErrorKind::InvalidArgument,
           "duration must exceed every activation time (concept " +
               std::to_string(p.concept_id) + " never activates)");
    }
  }
  Dataset all;
  for (const auto& profile : timeline.profiles) {
    for (int i = 0; i < timeline.ues_per_concept; ++i) {
      const std::string ue = ue_name(profile.concept_id, i);
      Dataset part = emulate_ue(profile, ue, timeline.duration_ms,
                                Rng::derive(timeline.seed, ue));
      all.insert(all.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     if (a.timestamp_ms != b.timestamp_ms)
                       return a.timestamp_ms < b.timestamp_ms;
                     return a.ue_id < b.ue_id;
                   });
  return all;
}

// --- dataset CSV ---------------------------------------------------------

void write_dataset_csv(const Dataset& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << "timestamp_ms,ue_id,concept_id,length_bytes,direction\n";
  for (const auto& r : records) {
    out << r.timestamp_ms << ',' << r.ue_id << ',';
    if (r.concept_id > 0) out << r.concept_id;
    out << ',' << r.length_bytes << ',' << to_string(r.direction) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Index of `name` in `header`, or -1. Throws only when required.
int column_index(const std::vector<std::string>& header, const std::string& name,
                 bool required) {
  if (name.empty()) return -1;
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    if (required) {
      fail(ErrorKind::Schema, "mapped column '" + name + "' not found in header");
    }
    return -1;
  }
  return static_cast<int>(it - header.begin());
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

LoadReport load_dataset(const std::filesystem::path& path,
                        const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());

  LoadReport report;
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::Schema, path.string() + ": missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  const int ts_col = column_index(header, columns.timestamp_ms, true);
  const int ue_col = column_index(header, columns.ue_id, true);
  const int len_col = column_index(header, columns.length_bytes, true);
  const int concept_col = column_index(header, columns.concept_id, false);
  const int dir_col = column_index(header, columns.direction, false);

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    auto reject = [&](const std::string& why) {
      report.warnings.push_back("row " + std::to_string(row) + ": " + why);
    };
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(fields.size()));
      continue;
    }
    PacketRecord rec;
    if (!parse_u64(fields[ts_col], rec.timestamp_ms)) {
      reject("non-numeric timestamp '" + fields[ts_col] + "'");
      continue;
    }
    rec.ue_id = fields[ue_col];
    std::uint64_t len = 0;
    if (!parse_u64(fields[len_col], len) || len < 1 || len > 0xffffffffULL) {
      reject("invalid length '" + fields[len_col] + "'");
      continue;
    }
    rec.length_bytes = static_cast<std::uint32_t>(len);
    if (concept_col >= 0 && !fields[concept_col].empty()) {
      std::uint64_t cid = 0;
      if (!parse_u64(fields[concept_col], cid)) {
        reject("non-numeric concept id '" + fields[concept_col] + "'");
        continue;
      }
      rec.concept_id = static_cast<int>(cid);
    }
    if (dir_col >= 0 && !fields[dir_col].empty()) {
      if (fields[dir_col] == "uplink") {
        rec.direction = Direction::Uplink;
      } else if (fields[dir_col] == "downlink") {
        rec.direction = Direction::Downlink;
      } else {
        reject("unknown direction '" + fields[dir_col] + "'");
        continue;
      }
    }
    report.records.push_back(std::move(rec));
  }
  if (report.records.empty()) {
    report.warnings.push_back("no data rows in " + path.string());
  }
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     if (a.timestamp_ms != b.timestamp_ms)
                       return a.timestamp_ms < b.timestamp_ms;
                     return a.ue_id < b.ue_id;
                   });
  return report;
}

// --- timeline config JSON --------------------------------------------------

nlohmann::json timeline_to_json(const EmulationTimeline& timeline) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& p : timeline.profiles) {
    profiles.push_back({{"concept_id", p.concept_id},
                        {"image_dims", p.image_dims},
                        {"request_period_ms", p.request_period_ms},
                        {"period_jitter_frac", p.period_jitter_frac},
                        {"activation_time_ms", p.activation_time_ms},
                        {"bytes_per_pixel", p.bytes_per_pixel},
                        {"mtu_bytes", p.mtu_bytes},
                        {"header_overhead_bytes", p.header_overhead_bytes}});
  }
  return {{"profiles", profiles},
          {"ues_per_concept", timeline.ues_per_concept},
          {"duration_ms", timeline.duration_ms},
          {"seed", timeline.seed}};
}

EmulationTimeline timeline_from_json(const nlohmann::json& j) {
  try {
    EmulationTimeline t;
    t.ues_per_concept = j.at("ues_per_concept").get<int>();
    t.duration_ms = j.at("duration_ms").get<std::uint64_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& pj : j.at("profiles")) {
      ConceptProfile p;
      p.concept_id = pj.at("concept_id").get<int>();
      p.image_dims = pj.at("image_dims").get<std::vector<int>>();
      p.request_period_ms = pj.at("request_period_ms").get<std::uint64_t>();
      p.period_jitter_frac = pj.value("period_jitter_frac", 0.2);
      p.activation_time_ms = pj.at("activation_time_ms").get<std::uint64_t>();
      p.bytes_per_pixel = pj.value("bytes_per_pixel", 3);
      p.mtu_bytes = pj.value("mtu_bytes", 1400u);
      p.header_overhead_bytes = pj.value("header_overhead_bytes", 54u);
      t.profiles.push_back(std::move(p));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("bad timeline config: ") + e.what());
  }
}

// --- trace statistics --------------------------------------------------------

std::vector<ConceptStats> concept_stats(const Dataset& records) {
  struct Acc {
    std::size_t packets = 0;
    std::uint64_t bytes = 0;
    std::vector<double> gaps;
    std::size_t requests = 0;
  };
  std::map<int, Acc> by_concept;

  std::map<std::string, std::vector<const PacketRecord*>> by_ue;
  for (const auto& r : records) by_ue[r.ue_id].push_back(&r);

  for (auto& [ue, recs] : by_ue) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const PacketRecord* a, const PacketRecord* b) {
                       return a->timestamp_ms < b->timestamp_ms;
                     });
    std::uint64_t prev_start = 0;
    bool have_start = false;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      Acc& acc = by_concept[recs[i]->concept_id];
      acc.packets += 1;
      acc.bytes += recs[i]->length_bytes;
      const bool new_request =
          i == 0 || recs[i]->timestamp_ms - recs[i - 1]->timestamp_ms > 1;
      if (new_request) {
        acc.requests += 1;
        if (have_start) {
          acc.gaps.push_back(
              static_cast<double>(recs[i]->timestamp_ms - prev_start));
        }
        prev_start = recs[i]->timestamp_ms;
        have_start = true;
      }
    }
  }

  std::vector<ConceptStats> out;
  for (const auto& [cid, acc] : by_concept) {
    ConceptStats s;
    s.concept_id = cid;
    s.packet_count = acc.packets;
    s.request_count = acc.requests;
    s.total_bytes = acc.bytes;
    s.mean_packet_length =
        acc.packets ? static_cast<double>(acc.bytes) / acc.packets : 0.0;
    if (!acc.gaps.empty()) {
      double mean = 0.0;
      for (double g : acc.gaps) mean += g;
      mean /= static_cast<double>(acc.gaps.size());
      double var = 0.0;
      for (double g : acc.gaps) var += (g - mean) * (g - mean);
      var /= static_cast<double>(acc.gaps.size());
      s.mean_request_gap_ms = mean;
      s.stddev_request_gap_ms = std::sqrt(var);
    }
    out.push_back(s);
  }
  return out;
}

nlohmann::json stats_to_json(const std::vector<ConceptStats>& stats) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : stats) {
    arr.push_back({{"concept_id", s.concept_id},
                   {"packet_count", s.packet_count},
                   {"request_count", s.request_count},
                   {"mean_packet_length", s.mean_packet_length},
                   {"mean_request_gap_ms", s.mean_request_gap_ms},
                   {"stddev_request_gap_ms", s.stddev_request_gap_ms},
                   {"total_bytes", s.total_bytes}});
  }
  return {{"concepts", arr}};
}

}  // namespace driftkit::emu
