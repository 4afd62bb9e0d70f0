#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driftkit::model {

// Packet lengths are scaled by a fixed constant (the MTU) rather than by the
// data maximum, so the scaling stays put when drifted traffic exceeds the
// training range.
struct Normalizer {
  double scale_bytes = 1400.0;

  double normalize(double bytes) const { return bytes / scale_bytes; }
  double denormalize(double value) const { return value * scale_bytes; }
};

// One supervised sample: a window of normalized packet lengths and the
// normalized length that followed it.
struct WindowSample {
  std::vector<double> x;
  double y = 0.0;
};

// Sliding windows over one stream of raw packet lengths. Streams shorter
// than window+1 yield an empty list (a warning, not an error).
std::vector<WindowSample> make_windows(std::span<const double> lengths,
                                       int window, const Normalizer& norm,
                                       std::vector<std::string>* warnings = nullptr);

double mse_loss(std::span<const double> predictions,
                std::span<const double> targets);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int minibatch_size = 32;
  std::uint64_t seed = 0;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0),
                                                  std::vector<double>(n, 0.0), 0}; }
};

// Bias-corrected Adam update over flat parameter/gradient vectors. Refuses
// non-finite gradients (throws, leaving params and state untouched) and
// verifies the updated parameters are finite.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const TrainConfig& config);

// Common surface for the sequence models the detection loop drives. predict
// is safe to call concurrently on a frozen model; train is not.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual int window() const = 0;
  virtual double predict(std::span<const double> x) const = 0;

  // Runs config.epochs passes of seeded-shuffle minibatch training and
  // returns the per-epoch mean training loss. Optimizer moments start fresh
  // on every call; weights warm-start from their current values.
  virtual std::vector<double> train(std::span<const WindowSample> samples,
                                    const TrainConfig& config) = 0;

  virtual std::unique_ptr<Predictor> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<Predictor> predictor_from_json(const nlohmann::json& j);
void save_predictor(const Predictor& p, const std::string& path);
std::unique_ptr<Predictor> load_predictor(const std::string& path);

// --- LSTM network -----------------------------------------------------------

struct LstmSpec {
  int window = 10;
  int lstm_cells = 100;
  std::array<int, 3> dense = {75, 50, 25};
};

// Recurrent next-length regressor: one scalar length per timestep through a
// single LSTM layer, then three ReLU layers and a linear head. Parameters
// live in one flat vector; gradients and optimizer state share its layout.
class LstmPredictor final : public Predictor {
 public:
  LstmPredictor(const LstmSpec& spec, std::uint64_t init_seed,
                const Normalizer& norm = {});

  int window() const override { return spec_.window; }
  const LstmSpec& spec() const { return spec_; }
  const Normalizer& normalizer() const { return norm_; }

  double predict(std::span<const double> x) const override;

  // Exact gradient of the minibatch MSE with respect to every parameter,
  // in flat layout. Also reports the minibatch loss.
  std::vector<double> gradient(std::span<const WindowSample> batch,
                               double* loss_out = nullptr) const;

  std::vector<double> train(std::span<const WindowSample> samples,
                            const TrainConfig& config) override;

  std::unique_ptr<Predictor> clone() const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<LstmPredictor> from_json(const nlohmann::json& j);

  // Flat layout, in order: for each gate (input, forget, candidate, output)
  // the weight matrix lstm_cells x (1 + lstm_cells) row-major over
  // [x_t ; h_{t-1}], then its bias; the three dense layers (weights row-major,
  // then bias); the head weights and bias.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const AdamState& optimizer_state() const { return adam_; }

 private:
  LstmPredictor() = default;

  void check_finite() const;

  LstmSpec spec_;
  Normalizer norm_;
  std::vector<double> params_;
  AdamState adam_;
};

std::size_t param_count(const LstmSpec& spec);

// --- linear autoregressor ----------------------------------------------------

// Least-squares linear model over the raw window, behind the same interface.
// Exists to keep heavy suites fast; replication runs use the LSTM.
class LinearArPredictor final : public Predictor {
 public:
  explicit LinearArPredictor(int window, const Normalizer& norm = {});

  int window() const override { return window_; }
  double predict(std::span<const double> x) const override;

  // Refits the closed-form least-squares solution; the epoch count only
  // gates whether fitting happens (0 = no-op) and sizes the returned trace.
  std::vector<double> train(std::span<const WindowSample> samples,
                            const TrainConfig& config) override;

  std::unique_ptr<Predictor> clone() const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<LinearArPredictor> from_json(const nlohmann::json& j);

 private:
  int window_ = 10;
  Normalizer norm_;
  std::vector<double> coef_;  // window weights then intercept
};

}  // namespace driftkit::model
