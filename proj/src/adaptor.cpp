#include "driftkit/adaptor.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"
#include "driftkit/hash.hpp"
#include "driftkit/rng.hpp"

namespace driftkit::adapt {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Baseline: return "baseline";
    case Mode::NonPersistent: return "non_persistent";
    case Mode::Persistent: return "persistent";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "non_persistent" || s == "np") return Mode::NonPersistent;
  if (s == "persistent" || s == "p") return Mode::Persistent;
  fail(ErrorKind::Config, "unknown mode '" + s + "'");
}

void validate(const AdaptationConfig& config) {
  if (config.beta < 1) fail(ErrorKind::Config, "beta must be >= 1");
  if (config.tau < 1) fail(ErrorKind::Config, "tau must be >= 1");
  if (config.theta < 0) fail(ErrorKind::Config, "theta must be >= 0");
  if (config.mode != Mode::Persistent && config.theta != 0) {
    fail(ErrorKind::Config,
         "theta is only meaningful in persistent mode; set it to 0");
  }
  if (config.n_factor <= 0.0) fail(ErrorKind::Config, "n_factor must be positive");
}

std::vector<std::span<const model::WindowSample>> batch_stream(
    std::span<const model::WindowSample> samples, int beta,
    std::vector<std::string>* warnings) {
  if (beta < 1) fail(ErrorKind::InvalidArgument, "beta must be >= 1");
  std::vector<std::span<const model::WindowSample>> batches;
  const std::size_t b = static_cast<std::size_t>(beta);
  batches.reserve(samples.size() / b);
  std::size_t start = 0;
  for (; start + b <= samples.size(); start += b) {
    batches.push_back(samples.subspan(start, b));
  }
  const std::size_t dropped = samples.size() - start;
  if (dropped > 0 && warnings) {
    warnings->push_back("dropped trailing partial batch of " +
                        std::to_string(dropped) + " samples");
  }
  return batches;
}

BatchEvent process_batch(AdaptorState& state,
                         std::unique_ptr<model::Predictor>& current_model,
                         const detect::DetectorState& detector,
                         std::span<const model::WindowSample> batch,
                         const AdaptationConfig& config) {
  const int index = state.batches_seen;
  BatchEvent event;
  event.batch_index = index;
  event.statistic = detect::batch_statistic(*current_model, batch);
  event.outcome = detect::evaluate(detector, event.statistic);

  const bool alarm = event.outcome == detect::Outcome::DriftAlarm;
  state.batches_seen += 1;
  if (alarm) state.alarms_raised += 1;

  if (config.mode == Mode::Baseline) {
    event.pool_size_after = state.pool.size();
    state.event_log.push_back(event);
    return event;
  }

  if (alarm) {
    state.pool.insert(state.pool.end(), batch.begin(), batch.end());
    event.pooled = true;
    if (config.mode == Mode::Persistent) {
      state.post_alarm_countdown = config.theta;  // a new alarm restarts it
    }
    model::TrainConfig retrain = config.retrain;
    retrain.epochs = config.tau;
    retrain.seed = Rng::derive(config.seed, static_cast<std::uint64_t>(index)).next_u64();
    auto snapshot = current_model->clone();
    try {
      current_model->train(state.pool, retrain);
      event.retrained = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      current_model = std::move(snapshot);
      event.retrained = false;
      event.pool_size_after = state.pool.size();
      state.event_log.push_back(event);
      fail(ErrorKind::Numeric,
           "retraining failed at batch " + std::to_string(index) + ": " + e.what());
    }
  } else if (config.mode == Mode::Persistent && state.post_alarm_countdown > 0) {
    state.pool.insert(state.pool.end(), batch.begin(), batch.end());
    event.pooled = true;
    state.post_alarm_countdown -= 1;
  }

  event.pool_size_after = state.pool.size();
  state.event_log.push_back(event);
  return event;
}

std::uint64_t stream_fingerprint(std::span<const model::WindowSample> stream) {
  std::uint64_t h = kFnvOffset;
  for (const auto& s : stream) {
    for (double v : s.x) h = fnv1a64(v, h);
    h = fnv1a64(s.y, h);
  }
  return h;
}

RunReport run_stream(std::unique_ptr<model::Predictor>& current_model,
                     const detect::DetectorState& detector,
                     const AdaptationConfig& config,
                     std::span<const model::WindowSample> stream,
                     std::span<const model::WindowSample> initial_pool,
                     std::vector<std::string>* warnings) {
  validate(config);
  const auto batches = batch_stream(stream, config.beta, warnings);
  if (batches.empty()) {
    fail(ErrorKind::InvalidArgument,
         "stream yields no full batch (needs at least beta samples)");
  }

  AdaptorState state;
  if (config.pool_seed_initial && config.mode != Mode::Baseline) {
    state.pool.assign(initial_pool.begin(), initial_pool.end());
  }
  for (const auto& batch : batches) {
    process_batch(state, current_model, detector, batch, config);
  }

  RunReport report;
  report.mode_label = to_string(config.mode);
  report.beta = config.beta;
  report.tau = config.tau;
  report.theta = config.theta;
  report.n_factor = config.n_factor;
  report.seed = config.seed;
  report.total_batches = state.batches_seen;
  report.alarms = state.alarms_raised;
  report.stream_hash = stream_fingerprint(stream);
  report.events = std::move(state.event_log);
  return report;
}

void write_event_log_csv(std::span<const BatchEvent> events,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << "batch_index,statistic,outcome,pooled,retrained,pool_size_after\n";
  char stat[64];
  for (const auto& e : events) {
    std::snprintf(stat, sizeof(stat), "%.17g", e.statistic);
    out << e.batch_index << ',' << stat << ',' << detect::to_string(e.outcome)
        << ',' << (e.pooled ? 1 : 0) << ',' << (e.retrained ? 1 : 0) << ','
        << e.pool_size_after << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

std::vector<BatchEvent> load_event_log_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read event log " + path);
  std::vector<BatchEvent> events;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Schema, path + ": empty file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    BatchEvent e;
    char outcome[32] = {0};
    int pooled = 0, retrained = 0;
    unsigned long long pool_size = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%31[^,],%d,%d,%llu", &e.batch_index,
                    &e.statistic, outcome, &pooled, &retrained, &pool_size) != 6) {
      fail(ErrorKind::Schema, path + ": malformed event row '" + line + "'");
    }
    e.outcome = std::string(outcome) == "DriftAlarm" ? detect::Outcome::DriftAlarm
                                                     : detect::Outcome::InThreshold;
    e.pooled = pooled != 0;
    e.retrained = retrained != 0;
    e.pool_size_after = pool_size;
    events.push_back(e);
  }
  return events;
}

nlohmann::json run_report_to_json(const RunReport& report) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : report.events) {
    events.push_back({{"batch_index", e.batch_index},
                      {"statistic", e.statistic},
                      {"outcome", detect::to_string(e.outcome)},
                      {"pooled", e.pooled},
                      {"retrained", e.retrained},
                      {"pool_size_after", e.pool_size_after}});
  }
  return {{"mode", report.mode_label},
          {"config",
           {{"beta", report.beta},
            {"tau", report.tau},
            {"theta", report.theta},
            {"n_factor", report.n_factor},
            {"seed", report.seed}}},
          {"total_batches", report.total_batches},
          {"alarms", report.alarms},
          {"stream_hash", hex64(report.stream_hash)},
          {"detector_state_ref", report.detector_ref},
          {"final_model_ref", report.model_ref},
          {"event_log_ref", report.event_log_ref},
          {"events", events}};
}

RunReport run_report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.mode_label = j.at("mode").get<std::string>();
    const auto& c = j.at("config");
    r.beta = c.at("beta").get<int>();
    r.tau = c.at("tau").get<int>();
    r.theta = c.at("theta").get<int>();
    r.n_factor = c.at("n_factor").get<double>();
    r.seed = c.at("seed").get<std::uint64_t>();
    r.total_batches = j.at("total_batches").get<int>();
    r.alarms = j.at("alarms").get<int>();
    r.stream_hash = std::stoull(j.at("stream_hash").get<std::string>(), nullptr, 16);
    r.detector_ref = j.value("detector_state_ref", "");
    r.model_ref = j.value("final_model_ref", "");
    r.event_log_ref = j.value("event_log_ref", "");
    for (const auto& ej : j.at("events")) {
      BatchEvent e;
      e.batch_index = ej.at("batch_index").get<int>();
      e.statistic = ej.at("statistic").get<double>();
      e.outcome = ej.at("outcome").get<std::string>() == "DriftAlarm"
                      ? detect::Outcome::DriftAlarm
                      : detect::Outcome::InThreshold;
      e.pooled = ej.at("pooled").get<bool>();
      e.retrained = ej.at("retrained").get<bool>();
      e.pool_size_after = ej.at("pool_size_after").get<std::size_t>();
      r.events.push_back(e);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("bad run report: ") + e.what());
  }
}

void save_run_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << run_report_to_json(report).dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

RunReport load_run_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read run report " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
  return run_report_from_json(j);
}

}  // namespace driftkit::adapt
