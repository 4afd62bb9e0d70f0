#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftkit/adaptor.hpp"
#include "driftkit/error.hpp"
#include "driftkit/predictor.hpp"
#include "driftkit/rng.hpp"

namespace testkit {

using driftkit::Rng;
using driftkit::model::LstmPredictor;
using driftkit::model::WindowSample;

inline std::vector<WindowSample> random_samples(std::size_t n, int window,
                                                Rng& rng) {
  std::vector<WindowSample> samples(n);
  for (auto& s : samples) {
    s.x.resize(static_cast<std::size_t>(window));
    for (auto& v : s.x) v = rng.next_unit();
    s.y = rng.next_unit();
  }
  return samples;
}

inline double batch_loss(const LstmPredictor& net,
                         const std::vector<WindowSample>& batch) {
  std::vector<double> preds, targets;
  preds.reserve(batch.size());
  targets.reserve(batch.size());
  for (const auto& s : batch) {
    preds.push_back(net.predict(s.x));
    targets.push_back(s.y);
  }
  return driftkit::model::mse_loss(preds, targets);
}

// Central finite differences against the analytic gradient; returns the
// worst relative error over all parameters.
inline double max_rel_grad_err(LstmPredictor& net,
                               const std::vector<WindowSample>& batch,
                               double h = 1e-5) {
  const auto analytic = net.gradient(batch);
  auto& params = net.params();
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = params[i];
    params[i] = original + h;
    const double lp = batch_loss(net, batch);
    params[i] = original - h;
    const double lm = batch_loss(net, batch);
    params[i] = original;
    const double numeric = (lp - lm) / (2.0 * h);
    const double denom = std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

// Fixed-output model for scripting detector outcomes; train() only counts
// invocations (or throws, to exercise the rollback path).
class ScriptedPredictor final : public driftkit::model::Predictor {
 public:
  explicit ScriptedPredictor(int window, double output = 0.0, bool fail_training = false)
      : window_(window), output_(output), fail_training_(fail_training) {}

  int window() const override { return window_; }
  double predict(std::span<const double>) const override { return output_; }

  std::vector<double> train(std::span<const driftkit::model::WindowSample>,
                            const driftkit::model::TrainConfig&) override {
    if (fail_training_) {
      driftkit::fail(driftkit::ErrorKind::Numeric, "scripted training failure");
    }
    train_calls += 1;
    return {0.0};
  }

  std::unique_ptr<Predictor> clone() const override {
    return std::make_unique<ScriptedPredictor>(*this);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "scripted"}, {"window", window_}, {"output", output_}};
  }

  int train_calls = 0;

 private:
  int window_ = 1;
  double output_ = 0.0;
  bool fail_training_ = false;
};

// Independent replay of the pooling rules for a scripted outcome sequence.
// Returns per-batch pooled flags and the countdown trace; pool composition
// follows from the flags (every pooled batch contributes its whole batch).
struct PoolSimulation {
  std::vector<bool> pooled;
  std::vector<int> countdown_after;
  std::vector<int> pooled_batches;  // batch indices, in pooling order
};

inline PoolSimulation simulate_pool(const std::vector<bool>& alarms,
                                    bool persistent, int theta) {
  PoolSimulation sim;
  int countdown = 0;
  for (std::size_t k = 0; k < alarms.size(); ++k) {
    bool pooled = false;
    if (alarms[k]) {
      pooled = true;
      if (persistent) countdown = theta;
    } else if (persistent && countdown > 0) {
      pooled = true;
      countdown -= 1;
    }
    if (pooled) sim.pooled_batches.push_back(static_cast<int>(k));
    sim.pooled.push_back(pooled);
    sim.countdown_after.push_back(countdown);
  }
  return sim;
}

// Batches whose statistic is forced above/below a unit threshold when the
// model predicts 0: alarm batches carry y = 2 (statistic 4), quiet ones
// y = 0. x[0] encodes the batch index so pool provenance stays visible.
inline std::vector<WindowSample> scripted_stream(const std::vector<bool>& alarms,
                                                 int beta, int window) {
  std::vector<WindowSample> stream;
  for (std::size_t k = 0; k < alarms.size(); ++k) {
    for (int i = 0; i < beta; ++i) {
      WindowSample s;
      s.x.assign(static_cast<std::size_t>(window), 0.0);
      s.x[0] = static_cast<double>(k);
      s.y = alarms[k] ? 2.0 : 0.0;
      stream.push_back(std::move(s));
    }
  }
  return stream;
}

}  // namespace testkit
