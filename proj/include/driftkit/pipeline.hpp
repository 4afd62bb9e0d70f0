#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftkit/adaptor.hpp"
#include "driftkit/emulator.hpp"
#include "driftkit/metrics.hpp"
#include "driftkit/predictor.hpp"

namespace driftkit::pipeline {

// Model sizing profiles. "paper" is the full configuration; "ci" is a
// scaled-down profile that keeps end-to-end suites in the minutes range.
struct Profile {
  std::string name;
  model::LstmSpec spec;
  int train_epochs = 0;
  int tau = 0;
};

Profile paper_profile();
Profile ci_profile();
Profile profile_by_name(const std::string& name);

struct DatasetSource {
  std::filesystem::path path;
  emu::ColumnMap columns;
};

struct ExperimentConfig {
  std::optional<emu::EmulationTimeline> timeline;
  std::optional<DatasetSource> dataset;  // exactly one of timeline/dataset
  std::string profile = "ci";
  model::TrainConfig train;  // epochs <= 0 means "use the profile's"
  double detector_n = 2.0;
  int beta = 10;
  int theta = 5;
  int tau = 0;  // <= 0 means "use the profile's"
  std::uint64_t adaptation_seed = 0;
  int target_concept = 2;
  int max_batches = 0;  // 0 = replay the whole stream
  std::string training_ue;  // empty = lowest-id concept-1 UE
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies --seed / --profile style overrides uniformly.
void override_seed(ExperimentConfig& config, std::uint64_t seed);

// Artifact names inside the output directory.
struct Paths {
  std::filesystem::path out;

  std::filesystem::path dataset() const { return out / "dataset.csv"; }
  std::filesystem::path dataset_stats() const { return out / "dataset_stats.json"; }
  std::filesystem::path model() const { return out / "model.json"; }
  std::filesystem::path detector() const { return out / "detector.json"; }
  std::filesystem::path run_report(const std::string& tag) const {
    return out / ("run_" + tag + ".json");
  }
  std::filesystem::path event_log(const std::string& tag) const {
    return out / ("events_" + tag + ".csv");
  }
  std::filesystem::path run_model(const std::string& tag) const {
    return out / ("run_" + tag + "_model.json");
  }
  std::filesystem::path summary() const { return out / "summary.json"; }
  std::filesystem::path timeline_csv(const std::string& tag) const {
    return out / ("timeline_" + tag + ".csv");
  }
  std::filesystem::path provenance(const std::string& stage) const {
    return out / (stage + ".prov.json");
  }
};

std::string mode_tag(adapt::Mode mode);  // baseline | np | p

// Per-UE streams of raw packet lengths for one concept (0 = all), keyed and
// ordered by UE id; records must already be time-sorted.
std::vector<std::pair<std::string, std::vector<double>>> ue_length_streams(
    const emu::Dataset& records, int concept_id);

// Windows are built per UE so they never span UE boundaries, then merged
// across UEs by the timestamp of each sample's target packet.
std::vector<model::WindowSample> merged_windows(const emu::Dataset& records,
                                                int concept_id, int window,
                                                const model::Normalizer& norm);

// --- stages -----------------------------------------------------------------

// Each stage reads its upstream artifacts from `out`, writes its own plus a
// provenance record, and fails with an actionable message when an upstream
// artifact is missing.
void cmd_emulate(const ExperimentConfig& config, const Paths& paths);
void cmd_train(const ExperimentConfig& config, const Paths& paths);
void cmd_calibrate(const ExperimentConfig& config, const Paths& paths);
adapt::RunReport cmd_run(const ExperimentConfig& config, const Paths& paths,
                         adapt::Mode mode, bool pool_seed_initial = false);
nlohmann::json cmd_compare(const ExperimentConfig& config, const Paths& paths);

}  // namespace driftkit::pipeline
