#include "driftkit/metrics.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"
#include "driftkit/hash.hpp"

namespace driftkit::metrics {

double alarm_reduction(int baseline_alarms, int adapted_alarms) {
  if (baseline_alarms < 1) {
    fail(ErrorKind::InvalidArgument,
         "alarm reduction is undefined for a baseline with no alarms");
  }
  if (adapted_alarms < 0) {
    fail(ErrorKind::InvalidArgument, "alarm counts must be non-negative");
  }
  return static_cast<double>(baseline_alarms - adapted_alarms) /
         static_cast<double>(baseline_alarms) * 100.0;
}

double mode_improvement(int non_persistent_alarms, int persistent_alarms) {
  if (non_persistent_alarms < 1) {
    fail(ErrorKind::InvalidArgument,
         "mode improvement is undefined when non-persistent raised no alarms");
  }
  if (persistent_alarms < 0) {
    fail(ErrorKind::InvalidArgument, "alarm counts must be non-negative");
  }
  return static_cast<double>(non_persistent_alarms - persistent_alarms) /
         static_cast<double>(non_persistent_alarms) * 100.0;
}

namespace {

int recount_alarms(const adapt::RunReport& r) {
  int n = 0;
  for (const auto& e : r.events) {
    if (e.outcome == detect::Outcome::DriftAlarm) n += 1;
  }
  return n;
}

}  // namespace

nlohmann::json summarize(const std::vector<LabelledRun>& runs) {
  if (runs.empty()) fail(ErrorKind::InvalidArgument, "no runs to summarize");

  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].report.stream_hash != runs[0].report.stream_hash) {
      fail(ErrorKind::Comparability,
           "run '" + runs[i].label + "' was produced from a different stream "
           "than '" + runs[0].label + "' (hash mismatch)");
    }
    if (runs[i].report.detector_ref != runs[0].report.detector_ref) {
      fail(ErrorKind::Comparability,
           "run '" + runs[i].label + "' used a different detector than '" +
               runs[0].label + "'");
    }
  }

  nlohmann::json run_entries = nlohmann::json::object();
  nlohmann::json timelines = nlohmann::json::object();
  const adapt::RunReport* baseline = nullptr;
  const adapt::RunReport* non_persistent = nullptr;
  const adapt::RunReport* persistent = nullptr;

  for (const auto& run : runs) {
    const int alarms = recount_alarms(run.report);
    run_entries[run.label] = {{"alarms", alarms},
                              {"total_batches", run.report.total_batches},
                              {"event_log_ref", run.report.event_log_ref}};
    nlohmann::json timeline = nlohmann::json::array();
    for (const auto& e : run.report.events) {
      timeline.push_back(e.outcome == detect::Outcome::DriftAlarm ? 1 : 0);
    }
    timelines[run.label] = std::move(timeline);
    if (run.label == "baseline") baseline = &run.report;
    if (run.label == "non_persistent") non_persistent = &run.report;
    if (run.label == "persistent") persistent = &run.report;
  }

  nlohmann::json summary = {{"runs", run_entries},
                            {"timelines", timelines},
                            {"stream_hash", hex64(runs[0].report.stream_hash)},
                            {"detector_state_ref", runs[0].report.detector_ref}};

  if (baseline && recount_alarms(*baseline) >= 1) {
    nlohmann::json reductions = nlohmann::json::object();
    for (const auto& run : runs) {
      if (run.label == "baseline") continue;
      reductions[run.label] =
          alarm_reduction(recount_alarms(*baseline), recount_alarms(run.report));
    }
    if (!reductions.empty()) summary["alarm_reduction_pct"] = reductions;
  } else if (baseline) {
    summary["note"] = "baseline raised no alarms; reductions are undefined";
  }
  if (non_persistent && persistent && recount_alarms(*non_persistent) >= 1) {
    summary["mode_improvement_pct"] = mode_improvement(
        recount_alarms(*non_persistent), recount_alarms(*persistent));
  }
  return summary;
}

void write_timeline_csv(const adapt::RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << "batch_index,alarm\n";
  for (const auto& e : report.events) {
    out << e.batch_index << ','
        << (e.outcome == detect::Outcome::DriftAlarm ? 1 : 0) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

}  // namespace driftkit::metrics
