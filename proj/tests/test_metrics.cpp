#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "driftkit/error.hpp"
#include "driftkit/metrics.hpp"
#include "driftkit/rng.hpp"

using namespace driftkit;
using namespace driftkit::metrics;

namespace {

adapt::RunReport report_with_alarms(int alarms, int total,
                                    std::uint64_t stream_hash = 1,
                                    const std::string& detector = "d") {
  adapt::RunReport r;
  r.total_batches = total;
  r.stream_hash = stream_hash;
  r.detector_ref = detector;
  for (int k = 0; k < total; ++k) {
    adapt::BatchEvent e;
    e.batch_index = k;
    e.outcome = k < alarms ? detect::Outcome::DriftAlarm
                           : detect::Outcome::InThreshold;
    r.events.push_back(e);
  }
  r.alarms = alarms;
  return r;
}

}  // namespace

TEST_CASE("alarm reduction arithmetic") {
  CHECK(alarm_reduction(100, 19) == 81.0);
  CHECK(alarm_reduction(42, 42) == 0.0);
  CHECK(alarm_reduction(100, 0) == 100.0);
  CHECK(alarm_reduction(10, 20) == -100.0);  // adaptation made it worse
  CHECK_THROWS_AS(alarm_reduction(0, 5), Error);
}

TEST_CASE("mode improvement arithmetic") {
  const double imp = mode_improvement(18, 15);
  CHECK(std::round(imp * 100.0) / 100.0 == 16.67);
  CHECK(mode_improvement(7, 7) == 0.0);
  CHECK_THROWS_AS(mode_improvement(0, 3), Error);
}

TEST_CASE("identities hold for all counts") {
  for (int n = 1; n < 200; n += 7) {
    CHECK(alarm_reduction(n, 0) == 100.0);
    CHECK(alarm_reduction(n, n) == 0.0);
  }
}

TEST_CASE("reductions computed from one baseline compose into the improvement") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_b = 1 + static_cast<int>(rng.next_below(500));
    const int n_n = 1 + static_cast<int>(rng.next_below(500));
    const int n_p = static_cast<int>(rng.next_below(500));
    const double r_n = alarm_reduction(n_b, n_n);
    const double r_p = alarm_reduction(n_b, n_p);
    const double direct = mode_improvement(n_n, n_p);
    const double composed = (r_p - r_n) / (100.0 - r_n) * 100.0;
    CHECK(std::abs(direct - composed) < 1e-9);
  }
}

TEST_CASE("summarize reports counts, reductions, and the mode improvement") {
  const std::vector<LabelledRun> runs = {
      {"baseline", report_with_alarms(32, 38)},
      {"non_persistent", report_with_alarms(6, 38)},
      {"persistent", report_with_alarms(5, 38)},
  };
  const auto summary = summarize(runs);
  CHECK(summary.at("runs").size() == 3);
  CHECK(summary.at("runs").at("baseline").at("alarms") == 32);
  CHECK(summary.at("alarm_reduction_pct").size() == 2);
  CHECK(summary.at("alarm_reduction_pct").at("non_persistent").get<double>() ==
        doctest::Approx(81.25));
  CHECK(summary.at("alarm_reduction_pct").at("persistent").get<double>() ==
        doctest::Approx(84.375));
  CHECK(summary.at("mode_improvement_pct").get<double>() ==
        doctest::Approx(100.0 / 6.0));
  CHECK(summary.at("timelines").at("baseline").size() == 38);

  // recount oracle: summary counts equal DriftAlarm rows in the event logs
  for (const auto& run : runs) {
    int recount = 0;
    for (const auto& e : run.report.events) {
      if (e.outcome == detect::Outcome::DriftAlarm) recount += 1;
    }
    CHECK(summary.at("runs").at(run.label).at("alarms").get<int>() == recount);
  }
}

TEST_CASE("a baseline-only summary has counts but no reduction entries") {
  const std::vector<LabelledRun> runs = {{"baseline", report_with_alarms(10, 20)}};
  const auto summary = summarize(runs);
  CHECK(summary.at("runs").size() == 1);
  CHECK(!summary.contains("alarm_reduction_pct"));
  CHECK(!summary.contains("mode_improvement_pct"));
}

TEST_CASE("summarize refuses runs from different streams or detectors") {
  const std::vector<LabelledRun> mismatched_stream = {
      {"baseline", report_with_alarms(5, 10, 1)},
      {"non_persistent", report_with_alarms(2, 10, 2)},
  };
  try {
    summarize(mismatched_stream);
    FAIL("expected comparability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Comparability);
  }

  const std::vector<LabelledRun> mismatched_detector = {
      {"baseline", report_with_alarms(5, 10, 1, "a")},
      {"non_persistent", report_with_alarms(2, 10, 1, "b")},
  };
  CHECK_THROWS_AS(summarize(mismatched_detector), Error);
}
