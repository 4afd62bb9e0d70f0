#include "driftkit/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"
#include "driftkit/rng.hpp"

namespace driftkit::model {

std::vector<WindowSample> make_windows(std::span<const double> lengths,
                                       int window, const Normalizer& norm,
                                       std::vector<std::string>* warnings) {
  if (window < 1) fail(ErrorKind::InvalidArgument, "window must be >= 1");
  std::vector<WindowSample> samples;
  const std::size_t w = static_cast<std::size_t>(window);
  if (lengths.size() < w + 1) {
    if (warnings) {
      warnings->push_back("stream of " + std::to_string(lengths.size()) +
                          " lengths is too short for window " +
                          std::to_string(window) + "; no samples produced");
    }
    return samples;
  }
  samples.reserve(lengths.size() - w);
  for (std::size_t i = 0; i + w < lengths.size(); ++i) {
    WindowSample s;
    s.x.resize(w);
    for (std::size_t k = 0; k < w; ++k) s.x[k] = norm.normalize(lengths[i + k]);
    s.y = norm.normalize(lengths[i + w]);
    samples.push_back(std::move(s));
  }
  return samples;
}

double mse_loss(std::span<const double> predictions,
                std::span<const double> targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    fail(ErrorKind::InvalidArgument,
         "mse_loss needs equal-length, non-empty inputs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const TrainConfig& config) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    fail(ErrorKind::InvalidArgument, "adam_step size mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      fail(ErrorKind::Numeric, "non-finite gradient; step refused");
    }
  }
  state.t += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = state.m[i] / corr1;
    const double vhat = state.v[i] / corr2;
    params[i] -= config.learning_rate * mhat /
                 (std::sqrt(vhat) + config.adam_epsilon);
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      fail(ErrorKind::Numeric, "parameters became non-finite after update");
    }
  }
}

// --- LSTM internals -----------------------------------------------------

namespace {

constexpr int kGates = 4;  // input, forget, candidate, output

struct Layout {
  int hidden = 0;
  int in_dim = 0;  // 1 + hidden
  std::array<int, 3> dense{};
  std::size_t w_gate[kGates];
  std::size_t b_gate[kGates];
  std::size_t w_dense[3];
  std::size_t b_dense[3];
  std::size_t w_head = 0;
  std::size_t b_head = 0;
  std::size_t total = 0;
};

Layout make_layout(const LstmSpec& spec) {
  Layout l;
  l.hidden = spec.lstm_cells;
  l.in_dim = 1 + spec.lstm_cells;
  l.dense = spec.dense;
  std::size_t off = 0;
  for (int g = 0; g < kGates; ++g) {
    l.w_gate[g] = off;
    off += static_cast<std::size_t>(l.hidden) * l.in_dim;
    l.b_gate[g] = off;
    off += l.hidden;
  }
  int in = l.hidden;
  for (int d = 0; d < 3; ++d) {
    l.w_dense[d] = off;
    off += static_cast<std::size_t>(l.dense[d]) * in;
    l.b_dense[d] = off;
    off += l.dense[d];
    in = l.dense[d];
  }
  l.w_head = off;
  off += in;
  l.b_head = off;
  off += 1;
  l.total = off;
  return l;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Per-sample activation record for backpropagation through time.
struct Cache {
  std::vector<double> z;      // T * in_dim, [x_t ; h_{t-1}]
  std::vector<double> gates;  // T * 4H, gate activations in i,f,g,o order
  std::vector<double> c;      // T * H
  std::vector<double> tc;     // T * H, tanh(c_t)
  std::vector<double> h_last;
  std::vector<double> dense_pre;  // concatenated dense pre-activations
  std::vector<double> dense_act;  // concatenated dense activations
};

double run_forward(const std::vector<double>& p, const Layout& L, int T,
                   std::span<const double> x, Cache* cache) {
  const int H = L.hidden;
  const int in_dim = L.in_dim;
  std::vector<double> h(H, 0.0), c(H, 0.0), z(in_dim, 0.0);
  std::vector<double> act(static_cast<std::size_t>(kGates) * H, 0.0);

  if (cache) {
    cache->z.resize(static_cast<std::size_t>(T) * in_dim);
    cache->gates.resize(static_cast<std::size_t>(T) * kGates * H);
    cache->c.resize(static_cast<std::size_t>(T) * H);
    cache->tc.resize(static_cast<std::size_t>(T) * H);
  }

  for (int t = 0; t < T; ++t) {
    z[0] = x[t];
    std::copy(h.begin(), h.end(), z.begin() + 1);
    for (int g = 0; g < kGates; ++g) {
      const double* W = p.data() + L.w_gate[g];
      const double* b = p.data() + L.b_gate[g];
      for (int r = 0; r < H; ++r) {
        const double* row = W + static_cast<std::size_t>(r) * in_dim;
        double acc = b[r];
        for (int j = 0; j < in_dim; ++j) acc += row[j] * z[j];
        act[static_cast<std::size_t>(g) * H + r] =
            (g == 2) ? std::tanh(acc) : sigmoid(acc);
      }
    }
    for (int r = 0; r < H; ++r) {
      const double iv = act[0 * H + r];
      const double fv = act[1 * H + r];
      const double gv = act[2 * H + r];
      const double ov = act[3 * H + r];
      c[r] = fv * c[r] + iv * gv;
      const double tc = std::tanh(c[r]);
      h[r] = ov * tc;
      if (cache) {
        cache->c[static_cast<std::size_t>(t) * H + r] = c[r];
        cache->tc[static_cast<std::size_t>(t) * H + r] = tc;
      }
    }
    if (cache) {
      std::copy(z.begin(), z.end(),
                cache->z.begin() + static_cast<std::size_t>(t) * in_dim);
      std::copy(act.begin(), act.end(),
                cache->gates.begin() + static_cast<std::size_t>(t) * kGates * H);
    }
  }

  if (cache) cache->h_last = h;

  std::size_t pre_total = 0;
  for (int d = 0; d < 3; ++d) pre_total += L.dense[d];
  if (cache) {
    cache->dense_pre.resize(pre_total);
    cache->dense_act.resize(pre_total);
  }

  std::vector<double> a = h;
  std::size_t pre_off = 0;
  int in = H;
  for (int d = 0; d < 3; ++d) {
    const int out = L.dense[d];
    std::vector<double> next(out, 0.0);
    const double* W = p.data() + L.w_dense[d];
    const double* b = p.data() + L.b_dense[d];
    for (int r = 0; r < out; ++r) {
      const double* row = W + static_cast<std::size_t>(r) * in;
      double acc = b[r];
      for (int j = 0; j < in; ++j) acc += row[j] * a[j];
      if (cache) cache->dense_pre[pre_off + r] = acc;
      next[r] = acc > 0.0 ? acc : 0.0;
      if (cache) cache->dense_act[pre_off + r] = next[r];
    }
    a = std::move(next);
    pre_off += out;
    in = out;
  }

  const double* Wh = p.data() + L.w_head;
  double y = p[L.b_head];
  for (int j = 0; j < in; ++j) y += Wh[j] * a[j];
  return y;
}

// Accumulates dLoss/dparams for one sample into grad, given dLoss/dy.
void run_backward(const std::vector<double>& p, const Layout& L, int T,
                  const Cache& cache, double dy, std::vector<double>& grad) {
  const int H = L.hidden;
  const int in_dim = L.in_dim;

  // head
  const int head_in = L.dense[2];
  grad[L.b_head] += dy;
  std::size_t pre_total = cache.dense_pre.size();
  const std::size_t a3_off = pre_total - head_in;
  std::vector<double> da(head_in, 0.0);
  for (int j = 0; j < head_in; ++j) {
    grad[L.w_head + j] += dy * cache.dense_act[a3_off + j];
    da[j] = p[L.w_head + j] * dy;
  }

  // dense layers, last to first
  std::size_t pre_off = a3_off;
  for (int d = 2; d >= 0; --d) {
    const int out = L.dense[d];
    const int in = d == 0 ? H : L.dense[d - 1];
    const std::size_t in_off = d == 0 ? 0 : pre_off - in;
    std::vector<double> da_prev(in, 0.0);
    const double* W = p.data() + L.w_dense[d];
    for (int r = 0; r < out; ++r) {
      const double dpre =
          cache.dense_pre[pre_off + r] > 0.0 ? da[r] : 0.0;  // relu'(0) = 0
      if (dpre == 0.0) continue;
      grad[L.b_dense[d] + r] += dpre;
      const double* row = W + static_cast<std::size_t>(r) * in;
      double* grow = grad.data() + L.w_dense[d] + static_cast<std::size_t>(r) * in;
      if (d == 0) {
        for (int j = 0; j < in; ++j) {
          grow[j] += dpre * cache.h_last[j];
          da_prev[j] += row[j] * dpre;
        }
      } else {
        for (int j = 0; j < in; ++j) {
          grow[j] += dpre * cache.dense_act[in_off + j];
          da_prev[j] += row[j] * dpre;
        }
      }
    }
    da = std::move(da_prev);
    pre_off = in_off;
  }

  // backpropagation through time
  std::vector<double> dh = da;  // gradient into h_T
  std::vector<double> dc(H, 0.0);
  std::vector<double> dpre(static_cast<std::size_t>(kGates) * H, 0.0);
  for (int t = T - 1; t >= 0; --t) {
    const double* gates = cache.gates.data() + static_cast<std::size_t>(t) * kGates * H;
    const double* tc = cache.tc.data() + static_cast<std::size_t>(t) * H;
    const double* cprev =
        t > 0 ? cache.c.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
    const double* z = cache.z.data() + static_cast<std::size_t>(t) * in_dim;

    for (int r = 0; r < H; ++r) {
      const double iv = gates[0 * H + r];
      const double fv = gates[1 * H + r];
      const double gv = gates[2 * H + r];
      const double ov = gates[3 * H + r];
      const double dov = dh[r] * tc[r];
      dc[r] += dh[r] * ov * (1.0 - tc[r] * tc[r]);
      const double div = dc[r] * gv;
      const double dfv = dc[r] * (cprev ? cprev[r] : 0.0);
      const double dgv = dc[r] * iv;
      dpre[0 * H + r] = div * iv * (1.0 - iv);
      dpre[1 * H + r] = dfv * fv * (1.0 - fv);
      dpre[2 * H + r] = dgv * (1.0 - gv * gv);
      dpre[3 * H + r] = dov * ov * (1.0 - ov);
    }

    std::vector<double> dz(in_dim, 0.0);
    for (int g = 0; g < kGates; ++g) {
      const double* W = p.data() + L.w_gate[g];
      for (int r = 0; r < H; ++r) {
        const double d = dpre[static_cast<std::size_t>(g) * H + r];
        if (d == 0.0) continue;
        grad[L.b_gate[g] + r] += d;
        const double* row = W + static_cast<std::size_t>(r) * in_dim;
        double* grow = grad.data() + L.w_gate[g] + static_cast<std::size_t>(r) * in_dim;
        for (int j = 0; j < in_dim; ++j) {
          grow[j] += d * z[j];
          dz[j] += row[j] * d;
        }
      }
    }
    for (int r = 0; r < H; ++r) {
      dh[r] = dz[1 + r];
      dc[r] *= gates[1 * H + r];  // carry through the forget gate
    }
  }
}

}  // namespace

std::size_t param_count(const LstmSpec& spec) { return make_layout(spec).total; }

LstmPredictor::LstmPredictor(const LstmSpec& spec, std::uint64_t init_seed,
                             const Normalizer& norm)
    : spec_(spec), norm_(norm) {
  if (spec.window < 1 || spec.lstm_cells < 1 || spec.dense[0] < 1 ||
      spec.dense[1] < 1 || spec.dense[2] < 1) {
    fail(ErrorKind::InvalidArgument, "all model dimensions must be >= 1");
  }
  const Layout L = make_layout(spec);
  params_.assign(L.total, 0.0);
  adam_ = AdamState::zeros(L.total);

  // Weights and biases uniform in +/- 1/sqrt(fan_in). Exact-zero biases are
  // avoided so no ReLU pre-activation starts pinned to the kink.
  Rng rng = Rng::derive(init_seed, "lstm-init");
  auto uniform_block = [&](std::size_t off, std::size_t n, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t k = 0; k < n; ++k) {
      params_[off + k] = rng.next_range(-bound, bound);
    }
  };
  for (int g = 0; g < kGates; ++g) {
    uniform_block(L.w_gate[g],
                  static_cast<std::size_t>(L.hidden) * L.in_dim + L.hidden,
                  L.in_dim);
  }
  // forget-gate bias starts at 1 so early training does not flush cell state
  std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(L.b_gate[1]),
              L.hidden, 1.0);
  int in = L.hidden;
  for (int d = 0; d < 3; ++d) {
    uniform_block(L.w_dense[d],
                  static_cast<std::size_t>(L.dense[d]) * in + L.dense[d], in);
    in = L.dense[d];
  }
  uniform_block(L.w_head, static_cast<std::size_t>(in) + 1, in);
}

void LstmPredictor::check_finite() const {
  for (double v : params_) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::Numeric, "model parameters contain non-finite values");
    }
  }
}

double LstmPredictor::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != spec_.window) {
    fail(ErrorKind::InvalidArgument,
         "input window has size " + std::to_string(x.size()) + ", expected " +
             std::to_string(spec_.window));
  }
  check_finite();
  return run_forward(params_, make_layout(spec_), spec_.window, x, nullptr);
}

std::vector<double> LstmPredictor::gradient(std::span<const WindowSample> batch,
                                            double* loss_out) const {
  if (batch.empty()) fail(ErrorKind::InvalidArgument, "minibatch is empty");
  const Layout L = make_layout(spec_);
  std::vector<double> grad(L.total, 0.0);
  Cache cache;
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const WindowSample& s : batch) {
    if (static_cast<int>(s.x.size()) != spec_.window) {
      fail(ErrorKind::InvalidArgument, "sample window size mismatch");
    }
    const double y = run_forward(params_, L, spec_.window, s.x, &cache);
    const double err = y - s.y;
    loss += err * err * inv_n;
    run_backward(params_, L, spec_.window, cache, 2.0 * err * inv_n, grad);
  }
  if (!std::isfinite(loss)) {
    fail(ErrorKind::Numeric, "non-finite loss during gradient computation");
  }
  if (loss_out) *loss_out = loss;
  return grad;
}

std::vector<double> LstmPredictor::train(std::span<const WindowSample> samples,
                                         const TrainConfig& config) {
  if (samples.empty()) {
    fail(ErrorKind::InvalidArgument, "training needs at least one sample");
  }
  if (config.minibatch_size < 1 || config.learning_rate <= 0.0 ||
      config.adam_beta1 >= 1.0 || config.adam_beta2 >= 1.0) {
    fail(ErrorKind::InvalidArgument, "invalid training configuration");
  }
  std::vector<double> history;
  if (config.epochs <= 0) return history;
  history.reserve(static_cast<std::size_t>(config.epochs));

  adam_ = AdamState::zeros(params_.size());  // fresh moments per training run
  Rng rng = Rng::derive(config.seed, "train-shuffle");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<WindowSample> batch;
  const std::size_t n = samples.size();
  const std::size_t mb = static_cast<std::size_t>(config.minibatch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng.next_below(i + 1);
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < n; start += mb, ++step) {
      const std::size_t end = std::min(start + mb, n);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(samples[order[k]]);
      double loss = 0.0;
      try {
        const auto grad = gradient(batch, &loss);
        adam_step(params_, grad, adam_, config);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Numeric) {
          fail(ErrorKind::Numeric, "epoch " + std::to_string(epoch + 1) +
                                       ", step " + std::to_string(step + 1) +
                                       ": " + e.what());
        }
        throw;
      }
      epoch_loss += loss * static_cast<double>(end - start);
    }
    history.push_back(epoch_loss / static_cast<double>(n));
  }
  return history;
}

std::unique_ptr<Predictor> LstmPredictor::clone() const {
  return std::unique_ptr<Predictor>(new LstmPredictor(*this));
}

nlohmann::json LstmPredictor::to_json() const {
  return {{"format", "driftkit-model"},
          {"version", 1},
          {"kind", "lstm"},
          {"spec",
           {{"window", spec_.window},
            {"lstm_cells", spec_.lstm_cells},
            {"dense", spec_.dense}}},
          {"normalizer", {{"scale_bytes", norm_.scale_bytes}}},
          {"params", params_},
          {"adam", {{"m", adam_.m}, {"v", adam_.v}, {"t", adam_.t}}}};
}

std::unique_ptr<LstmPredictor> LstmPredictor::from_json(const nlohmann::json& j) {
  try {
    auto net = std::unique_ptr<LstmPredictor>(new LstmPredictor());
    const auto& sj = j.at("spec");
    net->spec_.window = sj.at("window").get<int>();
    net->spec_.lstm_cells = sj.at("lstm_cells").get<int>();
    net->spec_.dense = sj.at("dense").get<std::array<int, 3>>();
    net->norm_.scale_bytes = j.at("normalizer").at("scale_bytes").get<double>();
    net->params_ = j.at("params").get<std::vector<double>>();
    const auto& aj = j.at("adam");
    net->adam_.m = aj.at("m").get<std::vector<double>>();
    net->adam_.v = aj.at("v").get<std::vector<double>>();
    net->adam_.t = aj.at("t").get<std::uint64_t>();
    const std::size_t expect = param_count(net->spec_);
    if (net->params_.size() != expect || net->adam_.m.size() != expect ||
        net->adam_.v.size() != expect) {
      fail(ErrorKind::Schema, "model checkpoint has wrong parameter count");
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("bad model checkpoint: ") + e.what());
  }
}

// --- linear autoregressor ---------------------------------------------------

LinearArPredictor::LinearArPredictor(int window, const Normalizer& norm)
    : window_(window), norm_(norm), coef_(static_cast<std::size_t>(window) + 1, 0.0) {
  if (window < 1) fail(ErrorKind::InvalidArgument, "window must be >= 1");
}

double LinearArPredictor::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != window_) {
    fail(ErrorKind::InvalidArgument, "input window size mismatch");
  }
  double y = coef_.back();
  for (int j = 0; j < window_; ++j) y += coef_[j] * x[j];
  return y;
}

namespace {

// Gaussian elimination with partial pivoting; a is n x n row-major.
bool solve_linear(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (int j = col; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
      b[r] -= factor * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int j = r + 1; j < n; ++j) acc -= a[r * n + j] * b[j];
    b[r] = acc / a[r * n + r];
  }
  return true;
}

}  // namespace

std::vector<double> LinearArPredictor::train(std::span<const WindowSample> samples,
                                             const TrainConfig& config) {
  if (samples.empty()) {
    fail(ErrorKind::InvalidArgument, "training needs at least one sample");
  }
  if (config.epochs <= 0) return {};

  const int n = window_ + 1;
  std::vector<double> ata(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> aty(static_cast<std::size_t>(n), 0.0);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  for (const WindowSample& s : samples) {
    if (static_cast<int>(s.x.size()) != window_) {
      fail(ErrorKind::InvalidArgument, "sample window size mismatch");
    }
    std::copy(s.x.begin(), s.x.end(), row.begin());
    row.back() = 1.0;
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) ata[r * n + j] += row[r] * row[j];
      aty[r] += row[r] * s.y;
    }
  }

  std::vector<double> a = ata;
  std::vector<double> sol = aty;
  if (!solve_linear(a, sol, n)) {
    a = ata;
    sol = aty;
    for (int r = 0; r < n; ++r) a[r * n + r] += 1e-9;  // ridge fallback
    if (!solve_linear(a, sol, n)) {
      fail(ErrorKind::Numeric, "normal equations are singular");
    }
  }
  coef_ = sol;

  std::vector<double> preds, ys;
  preds.reserve(samples.size());
  ys.reserve(samples.size());
  for (const WindowSample& s : samples) {
    preds.push_back(predict(s.x));
    ys.push_back(s.y);
  }
  return {mse_loss(preds, ys)};
}

std::unique_ptr<Predictor> LinearArPredictor::clone() const {
  return std::make_unique<LinearArPredictor>(*this);
}

nlohmann::json LinearArPredictor::to_json() const {
  return {{"format", "driftkit-model"},
          {"version", 1},
          {"kind", "linear_ar"},
          {"window", window_},
          {"normalizer", {{"scale_bytes", norm_.scale_bytes}}},
          {"coef", coef_}};
}

std::unique_ptr<LinearArPredictor> LinearArPredictor::from_json(
    const nlohmann::json& j) {
  try {
    auto p = std::make_unique<LinearArPredictor>(j.at("window").get<int>());
    p->norm_.scale_bytes = j.at("normalizer").at("scale_bytes").get<double>();
    p->coef_ = j.at("coef").get<std::vector<double>>();
    if (p->coef_.size() != static_cast<std::size_t>(p->window_) + 1) {
      fail(ErrorKind::Schema, "coefficient count does not match window");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("bad model checkpoint: ") + e.what());
  }
}

// --- checkpoint files ---------------------------------------------------------

std::unique_ptr<Predictor> predictor_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "lstm") return LstmPredictor::from_json(j);
  if (kind == "linear_ar") return LinearArPredictor::from_json(j);
  fail(ErrorKind::Schema, "unknown model kind '" + kind + "'");
}

void save_predictor(const Predictor& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << p.to_json().dump() << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

std::unique_ptr<Predictor> load_predictor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read model checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
  return predictor_from_json(j);
}

}  // namespace driftkit::model
