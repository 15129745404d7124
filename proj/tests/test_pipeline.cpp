#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "prohoi/pipeline.hpp"

using namespace prohoi;
using nlohmann::json;

namespace {

Scenario nominal_scenario() {
    Scenario s;
    s.object_pose = Pose{Vec3(1.0, 0.0, 0.0), Rotation::identity()};
    s.target_position = Vec3(4.0, 0.0, 0.0);
    return s;
}

}  // namespace

TEST_CASE("no-disturbance run: zero alerts and one contact run") {
    json report = run_pipeline(nominal_scenario(), Config{}, 7);
    const json& stages = report["stages"];
    CHECK(stages["monitor"]["alerts"] == 0);
    CHECK(stages["recovery"]["status"] == "skipped");
    CHECK(stages["twin"]["status"] == "skipped");
    REQUIRE(stages["metrics"]["status"] == "ok");
    CHECK(stages["metrics"]["contact_runs"] == 1);
    CHECK(stages["metrics"]["grasp_success"] == true);
    CHECK(stages["metrics"]["task_success"] == true);
    CHECK(stages["metrics"]["placement_precision_m"].get<double>() < 0.1);
}

TEST_CASE("every stage entry is always present") {
    json report = run_pipeline(nominal_scenario(), Config{}, 1);
    for (const char* name :
         {"retrieval", "plan", "execute", "monitor", "twin", "recovery", "metrics"}) {
        REQUIRE(report["stages"].contains(name));
        CHECK(report["stages"][name].contains("status"));
    }
}

TEST_CASE("mid-carry disturbance: one alert, recovery, two contact runs") {
    Config cfg;
    cfg.disturbance_frame = 300;
    json report = run_pipeline(nominal_scenario(), cfg, 7);
    const json& stages = report["stages"];
    CHECK(stages["monitor"]["alerts"] == 1);
    CHECK(stages["monitor"]["alert_frame"].get<long>() > 300);
    REQUIRE(stages["twin"]["status"] == "ok");
    CHECK(stages["twin"]["settle_time_s"].get<double>() > 0.0);
    REQUIRE(stages["recovery"]["status"] == "ok");
    // gaze replan faces the predicted object dead on
    CHECK(std::abs(stages["recovery"]["gaze_bearing_rad"].get<double>()) < 1e-9);
    CHECK(stages["recovery"]["prediction_error_m"].get<double>() < 0.3);
    REQUIRE(stages["metrics"]["status"] == "ok");
    CHECK(stages["metrics"]["contact_runs"] == 2);
    CHECK(stages["metrics"]["grasp_success"] == true);
    CHECK(stages["metrics"]["task_success"] == true);
}

TEST_CASE("same seed and inputs give byte-identical reports") {
    Config cfg;
    cfg.disturbance_frame = 300;
    std::string a = run_pipeline(nominal_scenario(), cfg, 42).dump();
    std::string b = run_pipeline(nominal_scenario(), cfg, 42).dump();
    CHECK(a == b);
    std::string c = run_pipeline(nominal_scenario(), cfg, 43).dump();
    CHECK(a != c);  // the seed actually feeds the follower noise
}

TEST_CASE("batch aggregates over scenarios") {
    std::vector<Scenario> scenarios;
    Scenario s = nominal_scenario();
    scenarios.push_back(s);
    s.object_pose.position = Vec3(0.8, 0.3, 0.0);
    s.target_position = Vec3(3.0, 1.0, 0.0);
    scenarios.push_back(s);

    json report = run_pipeline_batch(scenarios, Config{}, 5);
    CHECK(report["count"] == 2);
    REQUIRE(report["runs"].size() == 2);
    CHECK(report["aggregate"]["grasp_success_rate"].get<double>() ==
          doctest::Approx(1.0));
    CHECK(report["aggregate"]["task_success_rate"].get<double>() == doctest::Approx(1.0));
    CHECK(report["aggregate"]["mean_placement_precision_m"].get<double>() < 0.1);
}

TEST_CASE("follower noise scales with configuration but tracking still succeeds") {
    Config cfg;
    cfg.follower_noise = 0.02;
    json report = run_pipeline(nominal_scenario(), cfg, 9);
    REQUIRE(report["stages"]["metrics"]["status"] == "ok");
    CHECK(report["stages"]["metrics"]["rpe_m"].get<double>() < 0.05);
}
