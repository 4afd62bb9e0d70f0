#include <cstdint>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include <CLI11.hpp>

#include "driftkit/error.hpp"
#include "driftkit/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string profile;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory for artifacts")
      ->required();
  cmd->add_option("--profile", opts.profile, "Model profile: paper or ci");
  cmd->add_option("--seed", opts.seed, "Master seed override")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

driftkit::pipeline::ExperimentConfig make_config(const CommonOpts& opts) {
  auto config = driftkit::pipeline::load_config(opts.config_path);
  if (!opts.profile.empty()) config.profile = opts.profile;
  driftkit::pipeline::profile_by_name(config.profile);
  if (opts.seed_set) driftkit::pipeline::override_seed(config, opts.seed);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-length drift detection and adaptation pipeline"};
  app.require_subcommand(1);

  CommonOpts emulate_opts, train_opts, calibrate_opts, run_opts, compare_opts;
  std::string run_mode = "baseline";
  bool pool_seed_initial = false;

  add_common(app.add_subcommand("emulate", "Generate or ingest the packet dataset"),
             emulate_opts);
  add_common(app.add_subcommand("train", "Train the next-length model"), train_opts);
  add_common(app.add_subcommand("calibrate", "Build the drift threshold"),
             calibrate_opts);
  auto* run_cmd =
      app.add_subcommand("run", "Replay the drifted stream in one mode");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--mode", run_mode, "baseline, np, or p")
      ->check(CLI::IsMember({"baseline", "np", "p"}));
  run_cmd->add_flag("--pool-seed-initial", pool_seed_initial,
                    "Start the data pool with the training windows");
  add_common(app.add_subcommand("compare", "Summarize runs against the baseline"),
             compare_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    using driftkit::pipeline::Paths;
    if (app.got_subcommand("emulate")) {
      cmd_emulate(make_config(emulate_opts), Paths{emulate_opts.out_dir});
    } else if (app.got_subcommand("train")) {
      cmd_train(make_config(train_opts), Paths{train_opts.out_dir});
    } else if (app.got_subcommand("calibrate")) {
      cmd_calibrate(make_config(calibrate_opts), Paths{calibrate_opts.out_dir});
    } else if (app.got_subcommand("run")) {
      driftkit::adapt::Mode mode = driftkit::adapt::Mode::Baseline;
      if (run_mode == "np") mode = driftkit::adapt::Mode::NonPersistent;
      if (run_mode == "p") mode = driftkit::adapt::Mode::Persistent;
      const auto report = cmd_run(make_config(run_opts), Paths{run_opts.out_dir},
                                  mode, pool_seed_initial);
      std::cout << report.mode_label << ": " << report.alarms << " alarms over "
                << report.total_batches << " batches\n";
    } else if (app.got_subcommand("compare")) {
      const auto summary =
          cmd_compare(make_config(compare_opts), Paths{compare_opts.out_dir});
      std::cout << summary.dump(2) << '\n';
    }
  } catch (const driftkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return driftkit::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
