#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftkit/predictor.hpp"

namespace driftkit::detect {

enum class Outcome { InThreshold, DriftAlarm };

std::string to_string(Outcome o);

// Squared-error statistics of a model over pre-drift data, and the alarm
// threshold mu + n * sigma derived from them. Immutable once calibrated.
struct DetectorState {
  double mu = 0.0;
  double sigma = 0.0;
  double n_factor = 0.0;
  double threshold = 0.0;
  std::size_t calibration_sample_count = 0;
  std::string model_checkpoint_ref;
};

// Statistics from an already-collected set of per-sample squared errors.
// Population standard deviation; single pass (Welford). n_factor is a
// positive integer in the intended use; other positive values are accepted
// with a warning.
DetectorState calibrate_from_errors(std::span<const double> squared_errors,
                                    double n_factor,
                                    std::vector<std::string>* warnings = nullptr);

// Predicts every window of every stream (raw packet lengths, one list per
// UE interaction), pools the squared errors, and calibrates. Windows are
// formed per stream and never span stream boundaries.
DetectorState calibrate(const model::Predictor& model,
                        const std::vector<std::vector<double>>& concept_streams,
                        double n_factor, const model::Normalizer& norm,
                        std::vector<std::string>* warnings = nullptr);

// Mean squared prediction error over one batch, in the normalized domain.
double batch_statistic(const model::Predictor& model,
                       std::span<const model::WindowSample> batch);

// Right-sided test: alarm only when the statistic strictly exceeds the
// threshold (a statistic equal to the threshold is within it).
Outcome evaluate(const DetectorState& state, double statistic);

nlohmann::json detector_to_json(const DetectorState& state);
DetectorState detector_from_json(const nlohmann::json& j);
void save_detector(const DetectorState& state, const std::string& path);
DetectorState load_detector(const std::string& path);

}  // namespace driftkit::detect
