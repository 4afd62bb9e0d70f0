#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftkit/detector.hpp"
#include "driftkit/predictor.hpp"

namespace driftkit::adapt {

// Baseline detects and logs but never pools or retrains. NonPersistent pools
// only alarm batches. Persistent additionally pools the theta batches that
// follow an alarm.
enum class Mode { Baseline, NonPersistent, Persistent };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct AdaptationConfig {
  Mode mode = Mode::NonPersistent;
  int beta = 10;   // batch size
  int tau = 25;    // retraining epochs per alarm
  int theta = 5;   // post-alarm batches pooled in persistent mode
  double n_factor = 2.0;
  std::uint64_t seed = 0;
  model::TrainConfig retrain;     // epochs field is ignored; tau rules
  bool pool_seed_initial = false; // start the pool with the training data
};

// Throws unless beta/tau are positive and theta is 0 outside persistent mode.
void validate(const AdaptationConfig& config);

struct BatchEvent {
  int batch_index = 0;
  double statistic = 0.0;
  detect::Outcome outcome = detect::Outcome::InThreshold;
  bool pooled = false;
  bool retrained = false;
  std::size_t pool_size_after = 0;
};

struct AdaptorState {
  std::vector<model::WindowSample> pool;
  int post_alarm_countdown = 0;
  int batches_seen = 0;
  int alarms_raised = 0;
  std::vector<BatchEvent> event_log;
};

// Consecutive non-overlapping batches of exactly beta samples; a trailing
// remainder is dropped (and noted in warnings).
std::vector<std::span<const model::WindowSample>> batch_stream(
    std::span<const model::WindowSample> samples, int beta,
    std::vector<std::string>* warnings = nullptr);

// One turn of the loop: score the batch, decide, pool, retrain on alarm.
// On a retraining failure the event is still logged (retrained = false),
// the model is restored to its pre-batch weights, and the error is rethrown
// with the batch index attached.
BatchEvent process_batch(AdaptorState& state,
                         std::unique_ptr<model::Predictor>& current_model,
                         const detect::DetectorState& detector,
                         std::span<const model::WindowSample> batch,
                         const AdaptationConfig& config);

struct RunReport {
  std::string mode_label;
  int beta = 0;
  int tau = 0;
  int theta = 0;
  double n_factor = 0.0;
  std::uint64_t seed = 0;
  int total_batches = 0;
  int alarms = 0;
  std::uint64_t stream_hash = 0;
  std::string detector_ref;
  std::string model_ref;
  std::string event_log_ref;
  std::vector<BatchEvent> events;
};

// Folds process_batch over the batched stream. The model is updated in
// place (adapted modes) and the full event log is returned.
RunReport run_stream(std::unique_ptr<model::Predictor>& current_model,
                     const detect::DetectorState& detector,
                     const AdaptationConfig& config,
                     std::span<const model::WindowSample> stream,
                     std::span<const model::WindowSample> initial_pool = {},
                     std::vector<std::string>* warnings = nullptr);

std::uint64_t stream_fingerprint(std::span<const model::WindowSample> stream);

void write_event_log_csv(std::span<const BatchEvent> events,
                         const std::string& path);
std::vector<BatchEvent> load_event_log_csv(const std::string& path);

nlohmann::json run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);
void save_run_report(const RunReport& report, const std::string& path);
RunReport load_run_report(const std::string& path);

}  // namespace driftkit::adapt
