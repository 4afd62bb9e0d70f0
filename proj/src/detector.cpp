#include "driftkit/detector.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"

namespace driftkit::detect {

std::string to_string(Outcome o) {
  return o == Outcome::DriftAlarm ? "DriftAlarm" : "InThreshold";
}

DetectorState calibrate_from_errors(std::span<const double> squared_errors,
                                    double n_factor,
                                    std::vector<std::string>* warnings) {
  if (squared_errors.size() < 2) {
    fail(ErrorKind::Calibration,
         "calibration needs at least 2 squared-error samples, got " +
             std::to_string(squared_errors.size()));
  }
  if (n_factor <= 0.0 || !std::isfinite(n_factor)) {
    fail(ErrorKind::InvalidArgument, "n_factor must be positive");
  }
  if (n_factor != std::floor(n_factor) && warnings) {
    warnings->push_back("n_factor " + std::to_string(n_factor) +
                        " is not an integer; proceeding anyway");
  }

  // Welford's online mean/variance; population variance.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double e : squared_errors) {
    if (!std::isfinite(e)) {
      fail(ErrorKind::Numeric, "non-finite squared error in calibration data");
    }
    count += 1;
    const double delta = e - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (e - mean);
  }

  DetectorState state;
  state.mu = mean;
  state.sigma = std::sqrt(m2 / static_cast<double>(count));
  state.n_factor = n_factor;
  state.threshold = state.mu + state.n_factor * state.sigma;
  state.calibration_sample_count = count;
  return state;
}

DetectorState calibrate(const model::Predictor& model,
                        const std::vector<std::vector<double>>& concept_streams,
                        double n_factor, const model::Normalizer& norm,
                        std::vector<std::string>* warnings) {
  std::vector<double> errors;
  for (const auto& stream : concept_streams) {
    const auto samples = make_windows(stream, model.window(), norm, warnings);
    for (const auto& s : samples) {
      const double err = model.predict(s.x) - s.y;
      errors.push_back(err * err);
    }
  }
  return calibrate_from_errors(errors, n_factor, warnings);
}

double batch_statistic(const model::Predictor& model,
                       std::span<const model::WindowSample> batch) {
  if (batch.empty()) {
    fail(ErrorKind::InvalidArgument, "batch_statistic needs a non-empty batch");
  }
  std::vector<double> preds, targets;
  preds.reserve(batch.size());
  targets.reserve(batch.size());
  for (const auto& s : batch) {
    preds.push_back(model.predict(s.x));
    targets.push_back(s.y);
  }
  return model::mse_loss(preds, targets);
}

Outcome evaluate(const DetectorState& state, double statistic) {
  if (state.calibration_sample_count < 2) {
    fail(ErrorKind::Calibration, "detector has not been calibrated");
  }
  if (std::isnan(statistic)) {
    fail(ErrorKind::Numeric, "batch statistic is NaN");
  }
  return statistic > state.threshold ? Outcome::DriftAlarm
                                     : Outcome::InThreshold;
}

nlohmann::json detector_to_json(const DetectorState& state) {
  return {{"mu", state.mu},
          {"sigma", state.sigma},
          {"n", state.n_factor},
          {"threshold", state.threshold},
          {"calibration_sample_count", state.calibration_sample_count},
          {"model_checkpoint_ref", state.model_checkpoint_ref}};
}

DetectorState detector_from_json(const nlohmann::json& j) {
  try {
    DetectorState s;
    s.mu = j.at("mu").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.n_factor = j.at("n").get<double>();
    s.threshold = j.at("threshold").get<double>();
    s.calibration_sample_count = j.at("calibration_sample_count").get<std::size_t>();
    s.model_checkpoint_ref = j.value("model_checkpoint_ref", "");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("bad detector state: ") + e.what());
  }
}

void save_detector(const DetectorState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << detector_to_json(state).dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

DetectorState load_detector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read detector state " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
  return detector_from_json(j);
}

}  // namespace driftkit::detect
