#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftkit/adaptor.hpp"

namespace driftkit::metrics {

// Percentage of alarms removed relative to the baseline count:
// (n_b - n_a) / n_b * 100. Negative when adaptation made things worse.
double alarm_reduction(int baseline_alarms, int adapted_alarms);

// Percentage improvement of persistent over non-persistent memory:
// (n_n - n_p) / n_n * 100.
double mode_improvement(int non_persistent_alarms, int persistent_alarms);

struct LabelledRun {
  std::string label;  // "baseline", "non_persistent", "persistent", ...
  adapt::RunReport report;
};

// Cross-run summary: alarm counts, reduction of every adapted run against
// the baseline, the persistent/non-persistent improvement when both are
// present, and per-run alarm timelines. All runs must share the same
// stream hash and detector reference.
nlohmann::json summarize(const std::vector<LabelledRun>& runs);

// One row per batch: batch_index,alarm with alarm in {0,1}.
void write_timeline_csv(const adapt::RunReport& report, const std::string& path);

}  // namespace driftkit::metrics
