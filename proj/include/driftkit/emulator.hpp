#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftkit/rng.hpp"

namespace driftkit::emu {

enum class Direction { Uplink, Downlink };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

// One timestamped packet-length observation from a UE stream.
struct PacketRecord {
  std::uint64_t timestamp_ms = 0;
  std::string ue_id;
  int concept_id = 0;  // 0 = unknown (allowed on ingested data)
  std::uint32_t length_bytes = 0;
  Direction direction = Direction::Uplink;

  bool operator==(const PacketRecord&) const = default;
};

using Dataset = std::vector<PacketRecord>;

// A UE behaviour class: which image sizes it requests, how often, and when
// it first becomes active.
struct ConceptProfile {
  int concept_id = 0;
  std::vector<int> image_dims;  // square pixel dimensions
  std::uint64_t request_period_ms = 0;
  double period_jitter_frac = 0.0;  // in [0, 1)
  std::uint64_t activation_time_ms = 0;
  int bytes_per_pixel = 3;
  std::uint32_t mtu_bytes = 1400;
  std::uint32_t header_overhead_bytes = 54;
};

struct EmulationTimeline {
  std::vector<ConceptProfile> profiles;
  int ues_per_concept = 3;
  std::uint64_t duration_ms = 0;
  std::uint64_t seed = 0;
};

// The three behaviour classes with their default parameters. Class one
// requests small images most frequently; class three large images least
// frequently. Activations at 0, 1/3 and 2/3 of the duration.
EmulationTimeline default_timeline(std::uint64_t duration_ms = 960000,
                                   int ues_per_concept = 3,
                                   std::uint64_t seed = 42);

// Bytes on the wire for one image request: dim^2 * bytes_per_pixel plus the
// profile's fixed header overhead.
std::uint64_t payload_bytes(int dim, const ConceptProfile& profile);

// Split a payload into MTU-sized packets plus a final remainder in [1, mtu].
std::vector<std::uint32_t> segment_payload(std::uint64_t total_bytes,
                                           std::uint32_t mtu_bytes);

// Packet trace for one UE: requests start at activation_time_ms, separated
// by gaps uniform in period*(1 +/- jitter); each request's packets go out
// back-to-back 1 ms apart. Deterministic for a given rng stream.
Dataset emulate_ue(const ConceptProfile& profile, const std::string& ue_id,
                   std::uint64_t duration_ms, Rng rng);

// All UEs of all profiles, merged and stably sorted by (timestamp, ue_id).
Dataset emulate_experiment(const EmulationTimeline& timeline);

std::string ue_name(int concept_id, int index);

// --- dataset CSV ------------------------------------------------------

// Maps PacketRecord fields to CSV column names. concept_id and direction
// are optional (empty = not present in the file).
struct ColumnMap {
  std::string timestamp_ms = "timestamp_ms";
  std::string ue_id = "ue_id";
  std::string length_bytes = "length_bytes";
  std::string concept_id = "concept_id";
  std::string direction = "direction";
};

struct LoadReport {
  Dataset records;
  std::vector<std::string> warnings;  // row-numbered diagnostics
};

void write_dataset_csv(const Dataset& records,
                       const std::filesystem::path& path);

LoadReport load_dataset(const std::filesystem::path& path,
                        const ColumnMap& columns = {});

// --- timeline config JSON ---------------------------------------------

nlohmann::json timeline_to_json(const EmulationTimeline& timeline);
EmulationTimeline timeline_from_json(const nlohmann::json& j);

// --- trace statistics ---------------------------------------------------

// Per-concept behaviour summary. Request starts are reconstructed from the
// 1 ms intra-burst spacing: a gap > 1 ms within a UE begins a new request.
struct ConceptStats {
  int concept_id = 0;
  std::size_t packet_count = 0;
  std::size_t request_count = 0;
  double mean_packet_length = 0.0;
  double mean_request_gap_ms = 0.0;   // between request starts, pooled per UE
  double stddev_request_gap_ms = 0.0;
  std::uint64_t total_bytes = 0;
};

std::vector<ConceptStats> concept_stats(const Dataset& records);

nlohmann::json stats_to_json(const std::vector<ConceptStats>& stats);

}  // namespace driftkit::emu
