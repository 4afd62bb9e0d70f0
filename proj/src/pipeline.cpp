#include "driftkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"
#include "driftkit/hash.hpp"

namespace driftkit::pipeline {

namespace fs = std::filesystem;

Profile paper_profile() { return {"paper", {10, 100, {75, 50, 25}}, 200, 25}; }
Profile ci_profile() { return {"ci", {10, 16, {12, 8, 4}}, 50, 10}; }

Profile profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "ci") return ci_profile();
  fail(ErrorKind::Config, "unknown profile '" + name + "' (expected paper or ci)");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    if (j.contains("timeline")) {
      c.timeline = emu::timeline_from_json(j.at("timeline"));
    }
    if (j.contains("dataset")) {
      DatasetSource src;
      src.path = j.at("dataset").at("path").get<std::string>();
      if (j.at("dataset").contains("column_map")) {
        const auto& m = j.at("dataset").at("column_map");
        src.columns.timestamp_ms = m.value("timestamp_ms", "");
        src.columns.ue_id = m.value("ue_id", "");
        src.columns.length_bytes = m.value("length_bytes", "");
        src.columns.concept_id = m.value("concept_id", "");
        src.columns.direction = m.value("direction", "");
      }
      c.dataset = std::move(src);
    }
    if (!c.timeline.has_value() && !c.dataset.has_value()) {
      fail(ErrorKind::Config, "config needs either a timeline or a dataset source");
    }
    if (c.timeline.has_value() && c.dataset.has_value()) {
      fail(ErrorKind::Config, "config must not have both a timeline and a dataset");
    }
    c.profile = j.value("profile", std::string("ci"));
    profile_by_name(c.profile);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      c.train.epochs = t.value("epochs", 0);
      c.train.learning_rate = t.value("learning_rate", 1e-3);
      c.train.adam_beta1 = t.value("adam_beta1", 0.9);
      c.train.adam_beta2 = t.value("adam_beta2", 0.999);
      c.train.adam_epsilon = t.value("adam_epsilon", 1e-8);
      c.train.minibatch_size = t.value("minibatch_size", 32);
      c.train.seed = t.value("seed", std::uint64_t{0});
    } else {
      c.train.epochs = 0;
    }
    if (j.contains("detector")) {
      c.detector_n = j.at("detector").value("n_factor", 2.0);
    }
    if (j.contains("adaptation")) {
      const auto& a = j.at("adaptation");
      c.beta = a.value("beta", 10);
      c.theta = a.value("theta", 5);
      c.tau = a.value("tau", 0);
      c.adaptation_seed = a.value("seed", std::uint64_t{0});
    }
    if (j.contains("run")) {
      const auto& r = j.at("run");
      c.target_concept = r.value("target_concept", 2);
      c.max_batches = r.value("max_batches", 0);
    }
    c.training_ue = j.value("training_ue", std::string());
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("bad experiment config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.timeline) j["timeline"] = emu::timeline_to_json(*c.timeline);
  if (c.dataset) {
    j["dataset"] = {{"path", c.dataset->path.string()},
                    {"column_map",
                     {{"timestamp_ms", c.dataset->columns.timestamp_ms},
                      {"ue_id", c.dataset->columns.ue_id},
                      {"length_bytes", c.dataset->columns.length_bytes},
                      {"concept_id", c.dataset->columns.concept_id},
                      {"direction", c.dataset->columns.direction}}}};
  }
  j["profile"] = c.profile;
  j["train"] = {{"epochs", c.train.epochs},
                {"learning_rate", c.train.learning_rate},
                {"adam_beta1", c.train.adam_beta1},
                {"adam_beta2", c.train.adam_beta2},
                {"adam_epsilon", c.train.adam_epsilon},
                {"minibatch_size", c.train.minibatch_size},
                {"seed", c.train.seed}};
  j["detector"] = {{"n_factor", c.detector_n}};
  j["adaptation"] = {{"beta", c.beta},
                     {"theta", c.theta},
                     {"tau", c.tau},
                     {"seed", c.adaptation_seed}};
  j["run"] = {{"target_concept", c.target_concept}, {"max_batches", c.max_batches}};
  j["training_ue"] = c.training_ue;
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
  if (config.timeline) config.timeline->seed = seed;
  config.train.seed = Rng::derive(seed, "train").next_u64();
  config.adaptation_seed = Rng::derive(seed, "adapt").next_u64();
}

std::string mode_tag(adapt::Mode mode) {
  switch (mode) {
    case adapt::Mode::Baseline: return "baseline";
    case adapt::Mode::NonPersistent: return "np";
    case adapt::Mode::Persistent: return "p";
  }
  return "?";
}

std::vector<std::pair<std::string, std::vector<double>>> ue_length_streams(
    const emu::Dataset& records, int concept_id) {
  std::map<std::string, std::vector<double>> streams;
  for (const auto& r : records) {
    if (concept_id != 0 && r.concept_id != concept_id) continue;
    streams[r.ue_id].push_back(static_cast<double>(r.length_bytes));
  }
  return {streams.begin(), streams.end()};
}

std::vector<model::WindowSample> merged_windows(const emu::Dataset& records,
                                                int concept_id, int window,
                                                const model::Normalizer& norm) {
  struct Timed {
    std::uint64_t ts;
    std::string ue;
    model::WindowSample sample;
  };
  std::map<std::string, std::pair<std::vector<double>, std::vector<std::uint64_t>>> per_ue;
  for (const auto& r : records) {
    if (concept_id != 0 && r.concept_id != concept_id) continue;
    auto& [lengths, stamps] = per_ue[r.ue_id];
    lengths.push_back(static_cast<double>(r.length_bytes));
    stamps.push_back(r.timestamp_ms);
  }
  std::vector<Timed> timed;
  for (auto& [ue, data] : per_ue) {
    auto samples = make_windows(data.first, window, norm);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      // sample k predicts the packet at position k + window
      timed.push_back({data.second[k + static_cast<std::size_t>(window)], ue,
                       std::move(samples[k])});
    }
  }
  std::stable_sort(timed.begin(), timed.end(), [](const Timed& a, const Timed& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.ue < b.ue;
  });
  std::vector<model::WindowSample> out;
  out.reserve(timed.size());
  for (auto& t : timed) out.push_back(std::move(t.sample));
  return out;
}

// --- stage plumbing -----------------------------------------------------------

namespace {

void require_artifact(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    fail(ErrorKind::Config, "missing artifact " + path.string() +
                                "; run `driftkit " + producer + "` first");
  }
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(config_to_json(config).dump());
}

void write_provenance(const Paths& paths, const std::string& stage,
                      const ExperimentConfig& config,
                      const std::vector<fs::path>& inputs,
                      const std::vector<fs::path>& outputs,
                      nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json in_hashes = nlohmann::json::object();
  for (const auto& p : inputs) in_hashes[p.filename().string()] = hex64(hash_file(p.string()));
  nlohmann::json out_hashes = nlohmann::json::object();
  for (const auto& p : outputs) out_hashes[p.filename().string()] = hex64(hash_file(p.string()));
  nlohmann::json j = {{"stage", stage},
                      {"profile", config.profile},
                      {"config_hash", hex64(config_hash(config))},
                      {"inputs", in_hashes},
                      {"outputs", out_hashes}};
  if (!extra.empty()) j["info"] = std::move(extra);
  std::ofstream out(paths.provenance(stage));
  if (!out) fail(ErrorKind::Io, "cannot write provenance for stage " + stage);
  out << j.dump(2) << '\n';
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

model::TrainConfig effective_train(const ExperimentConfig& config,
                                   const Profile& profile) {
  model::TrainConfig t = config.train;
  if (t.epochs <= 0) t.epochs = profile.train_epochs;
  return t;
}

// Training interaction: the configured UE, or the lowest-id concept-1 UE.
std::vector<double> training_stream(const ExperimentConfig& config,
                                    const emu::Dataset& records,
                                    std::string* ue_out) {
  const auto streams = ue_length_streams(records, 1);
  if (streams.empty()) {
    fail(ErrorKind::Config, "dataset has no concept-1 records to train on");
  }
  if (!config.training_ue.empty()) {
    for (const auto& [ue, lengths] : streams) {
      if (ue == config.training_ue) {
        if (ue_out) *ue_out = ue;
        return lengths;
      }
    }
    fail(ErrorKind::Config, "training UE '" + config.training_ue +
                                "' has no concept-1 records");
  }
  if (ue_out) *ue_out = streams.front().first;
  return streams.front().second;
}

}  // namespace

void cmd_emulate(const ExperimentConfig& config, const Paths& paths) {
  fs::create_directories(paths.out);
  emu::Dataset records;
  std::vector<std::string> warnings;
  if (config.timeline) {
    records = emu::emulate_experiment(*config.timeline);
  } else {
    auto report = emu::load_dataset(config.dataset->path, config.dataset->columns);
    warnings = std::move(report.warnings);
    records = std::move(report.records);
  }
  print_warnings(warnings);
  emu::write_dataset_csv(records, paths.dataset());

  const auto stats = emu::concept_stats(records);
  std::ofstream stats_out(paths.dataset_stats());
  if (!stats_out) fail(ErrorKind::Io, "cannot write dataset stats");
  stats_out << emu::stats_to_json(stats).dump(2) << '\n';
  stats_out.close();

  nlohmann::json extra = {{"records", records.size()},
                          {"rejected_rows", warnings.size()}};
  if (config.timeline) extra["seed"] = config.timeline->seed;
  std::vector<fs::path> inputs;
  if (config.dataset) inputs.push_back(config.dataset->path);
  write_provenance(paths, "emulate", config, inputs,
                   {paths.dataset(), paths.dataset_stats()}, extra);
}

void cmd_train(const ExperimentConfig& config, const Paths& paths) {
  require_artifact(paths.dataset(), "emulate");
  const Profile profile = profile_by_name(config.profile);
  const auto loaded = emu::load_dataset(paths.dataset());

  std::string ue;
  const auto lengths = training_stream(config, loaded.records, &ue);
  const model::Normalizer norm;
  std::vector<std::string> warnings;
  const auto samples = make_windows(lengths, profile.spec.window, norm, &warnings);
  print_warnings(warnings);
  if (samples.empty()) {
    fail(ErrorKind::Config, "training interaction '" + ue +
                                "' is too short to form windows");
  }

  const model::TrainConfig train_cfg = effective_train(config, profile);
  model::LstmPredictor net(profile.spec, train_cfg.seed, norm);
  const auto history = net.train(samples, train_cfg);
  model::save_predictor(net, paths.model().string());

  write_provenance(paths, "train", config, {paths.dataset()}, {paths.model()},
                   {{"training_ue", ue},
                    {"window_samples", samples.size()},
                    {"epochs", train_cfg.epochs},
                    {"seed", train_cfg.seed},
                    {"first_epoch_loss", history.empty() ? 0.0 : history.front()},
                    {"final_epoch_loss", history.empty() ? 0.0 : history.back()}});
}

void cmd_calibrate(const ExperimentConfig& config, const Paths& paths) {
  require_artifact(paths.dataset(), "emulate");
  require_artifact(paths.model(), "train");
  const auto loaded = emu::load_dataset(paths.dataset());
  const auto net = model::load_predictor(paths.model().string());

  std::vector<std::vector<double>> streams;
  for (auto& [ue, lengths] : ue_length_streams(loaded.records, 1)) {
    streams.push_back(std::move(lengths));
  }
  if (streams.empty()) {
    fail(ErrorKind::Config, "dataset has no concept-1 streams to calibrate on");
  }
  std::vector<std::string> warnings;
  auto state = detect::calibrate(*net, streams, config.detector_n,
                                 model::Normalizer{}, &warnings);
  print_warnings(warnings);
  state.model_checkpoint_ref = paths.model().filename().string();
  detect::save_detector(state, paths.detector().string());

  write_provenance(paths, "calibrate", config,
                   {paths.dataset(), paths.model()}, {paths.detector()},
                   {{"streams", streams.size()},
                    {"samples", state.calibration_sample_count},
                    {"mu", state.mu},
                    {"sigma", state.sigma},
                    {"threshold", state.threshold}});
}

adapt::RunReport cmd_run(const ExperimentConfig& config, const Paths& paths,
                         adapt::Mode mode, bool pool_seed_initial) {
  require_artifact(paths.dataset(), "emulate");
  require_artifact(paths.model(), "train");
  require_artifact(paths.detector(), "calibrate");
  const Profile profile = profile_by_name(config.profile);
  const auto loaded = emu::load_dataset(paths.dataset());
  auto net = model::load_predictor(paths.model().string());
  const auto detector = detect::load_detector(paths.detector().string());

  const model::Normalizer norm;
  auto stream = merged_windows(loaded.records, config.target_concept,
                               net->window(), norm);
  if (config.max_batches > 0) {
    const std::size_t cap = static_cast<std::size_t>(config.max_batches) *
                            static_cast<std::size_t>(config.beta);
    if (stream.size() > cap) stream.resize(cap);
  }

  adapt::AdaptationConfig run_cfg;
  run_cfg.mode = mode;
  run_cfg.beta = config.beta;
  run_cfg.tau = config.tau > 0 ? config.tau : profile.tau;
  run_cfg.theta = mode == adapt::Mode::Persistent ? config.theta : 0;
  run_cfg.n_factor = config.detector_n;
  run_cfg.seed = config.adaptation_seed;
  run_cfg.retrain = effective_train(config, profile);
  run_cfg.pool_seed_initial = pool_seed_initial;

  std::vector<model::WindowSample> initial_pool;
  if (pool_seed_initial) {
    const auto lengths = training_stream(config, loaded.records, nullptr);
    initial_pool = make_windows(lengths, net->window(), norm);
  }

  std::vector<std::string> warnings;
  auto report = adapt::run_stream(net, detector, run_cfg, stream, initial_pool,
                                  &warnings);
  print_warnings(warnings);

  const std::string tag = mode_tag(mode);
  report.detector_ref = hex64(hash_file(paths.detector().string()));
  report.model_ref = paths.run_model(tag).filename().string();
  report.event_log_ref = paths.event_log(tag).filename().string();
  adapt::write_event_log_csv(report.events, paths.event_log(tag).string());
  model::save_predictor(*net, paths.run_model(tag).string());
  adapt::save_run_report(report, paths.run_report(tag).string());

  write_provenance(paths, "run_" + tag, config,
                   {paths.dataset(), paths.model(), paths.detector()},
                   {paths.run_report(tag), paths.event_log(tag), paths.run_model(tag)},
                   {{"mode", adapt::to_string(mode)},
                    {"batches", report.total_batches},
                    {"alarms", report.alarms},
                    {"stream_hash", hex64(report.stream_hash)},
                    {"seed", run_cfg.seed}});
  return report;
}

nlohmann::json cmd_compare(const ExperimentConfig& config, const Paths& paths) {
  std::vector<metrics::LabelledRun> runs;
  std::vector<fs::path> inputs;
  const std::pair<const char*, const char*> tags[] = {
      {"baseline", "baseline"}, {"np", "non_persistent"}, {"p", "persistent"}};
  for (const auto& [tag, label] : tags) {
    const fs::path path = paths.run_report(tag);
    if (!fs::exists(path)) continue;
    runs.push_back({label, adapt::load_run_report(path.string())});
    inputs.push_back(path);
  }
  if (runs.empty()) {
    fail(ErrorKind::Config,
         "no run reports found; run `driftkit run --mode ...` first");
  }

  const auto summary = metrics::summarize(runs);
  std::ofstream out(paths.summary());
  if (!out) fail(ErrorKind::Io, "cannot write " + paths.summary().string());
  out << summary.dump(2) << '\n';
  out.close();

  std::vector<fs::path> outputs = {paths.summary()};
  for (const auto& run : runs) {
    const std::string tag = run.label == "non_persistent" ? "np"
                            : run.label == "persistent"   ? "p"
                                                          : run.label;
    metrics::write_timeline_csv(run.report, paths.timeline_csv(tag).string());
    outputs.push_back(paths.timeline_csv(tag));
  }
  write_provenance(paths, "compare", config, inputs, outputs);
  return summary;
}

}  // namespace driftkit::pipeline
