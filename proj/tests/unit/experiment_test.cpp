#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <stdexcept>

#include "swarmtopo/experiment.hpp"
#include "swarmtopo/report.hpp"
#include "swarmtopo/scoring.hpp"

using namespace swarmtopo;
using namespace swarmtopo::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("swarmtopo-unit-" + name);
  fs::remove_all(p);
  return p;
}

// Ring 3..7 at about 120 neighbours per node.
RunConfig ring_config() {
  static const std::string file = [] {
    const auto p = scratch("ring.json");
    report::write_file(p.string(), geometry::region_to_json(annulus_region(3.0, 7.0)));
    return p.string();
  }();
  RunConfig c;
  c.region = file;
  c.n = 4800;
  c.seed = 3;
  c.alpha = 0.7;
  return c;
}

const RunOutput& ring_run() {
  static const RunOutput run = run_pipeline(ring_config());
  return run;
}

}  // namespace

TEST_CASE("config checks") {
  RunConfig c;
  CHECK_NOTHROW(check_config(c));
  c.n = 1;
  CHECK_THROWS_AS(check_config(c), ConfigError);
  c = {};
  c.alpha = 0.0;
  CHECK_THROWS_AS(check_config(c), ConfigError);
  c = {};
  c.bin_count = 4;
  CHECK_THROWS_AS(check_config(c), ConfigError);
  c = {};
  c.region.clear();
  CHECK_THROWS_AS(check_config(c), ConfigError);
}

TEST_CASE("builtin regions") {
  const auto std_region = standard_region();
  CHECK(geometry::region_area(std_region) == doctest::Approx(kStandardArea));
  CHECK(std_region.boundary_count() == 4);
  CHECK_NOTHROW(geometry::validate_region(std_region));
  const auto ring = annulus_region(4, 10);
  CHECK(geometry::region_area(ring) == doctest::Approx(84 * 3.141592653589793));
  CHECK(load_region("standard").boundary_count() == 4);
  CHECK_THROWS_AS(load_region("/nonexistent.json"), IoError);
}

TEST_CASE("thread settings") {
  setenv("SWARMTOPO_THREADS", "3", 1);
  CHECK(max_threads() == 3);
  setenv("SWARMTOPO_THREADS", "x", 1);
  CHECK_THROWS_AS(max_threads(), ConfigError);
  unsetenv("SWARMTOPO_THREADS");
  CHECK(max_threads() >= 1);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(50, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("pipeline on a ring") {
  const auto& run = ring_run();
  CHECK(run.graph.size() == 4800);
  CHECK(run.thresh == boundary::threshold(0.7, run.density.mu_est));
  REQUIRE(run.major.size() == 2);
  // lower near/boundary ratio on the outer circle
  const auto root = *run.graph.index_of(run.outer_id);
  const auto p = run.graph.position(root);
  CHECK(std::hypot(p.x - 7, p.y - 7) > 5.0);
  for (const auto& loop : run.loops.loops) {
    if (!loop.skipped) CHECK(loop.closed);
  }
  CHECK(run.count(boundary::NodeClass::BOUNDARY) == run.classes.boundary_count);
  CHECK(run.count(boundary::NodeClass::BOUNDARY) + run.count(boundary::NodeClass::NEAR_BOUNDARY) +
            run.count(boundary::NodeClass::INTERIOR) ==
        run.graph.size());
  const auto sc = scoring::score(run.region, run.graph, scoring::node_reports(run), scoring::digest(run), {});
  CHECK(sc.outer_correct);
  CHECK(sc.thickness.inradius == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(sc.thickness.ratio > 0.8);
  CHECK(sc.thickness.ratio < 1.6);
  // Phase costs sum to the ledger totals of the phases.
  std::uint64_t broadcasts = 0;
  for (const auto& c : run.costs) broadcasts += c.broadcasts;
  CHECK(broadcasts > run.graph.size());
}

TEST_CASE("run directory round trip") {
  const auto& run = ring_run();
  const auto dir = scratch("ring-out");
  report::write_run(run, dir.string());
  for (const char* f : {"classification.csv", "distance.csv", "cost.csv", "loops.csv", "histogram.csv",
                        "components.csv", "summary.json"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK_FALSE(fs::exists(dir / "sweep.csv"));
  const auto d = report::read_digest(dir.string());
  CHECK(d.config == run.config);
  CHECK(d.alpha == run.alpha);
  CHECK(d.outer_id == run.outer_id);
  CHECK(d.thickness.best_node == run.thickness.report.best_node);
  CHECK(d.components.size() == run.major.size());
  const auto nodes = report::read_node_reports(dir.string());
  const auto direct = scoring::node_reports(run);
  REQUIRE(nodes.size() == direct.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    REQUIRE(nodes[i].id == direct[i].id);
    CHECK(nodes[i].cls == direct[i].cls);
    CHECK(nodes[i].boundary_id == direct[i].boundary_id);
    CHECK(nodes[i].hop_dist == direct[i].hop_dist);
    CHECK(nodes[i].voronoi == direct[i].voronoi);
    if (std::isinf(direct[i].frac_dist)) {
      CHECK(std::isinf(nodes[i].frac_dist));
    } else {
      CHECK(nodes[i].frac_dist == doctest::Approx(direct[i].frac_dist).epsilon(1e-9));
    }
  }
  const auto summary = nlohmann::json::parse(report::read_file((dir / "summary.json").string()));
  CHECK(summary["schema"] == report::kSchema);
  CHECK(summary["components"].size() == run.major.size());
  CHECK(summary["outer_id"] == run.outer_id.value);

  auto other = run.config;
  other.seed += 1;
  CHECK_THROWS_AS(scoring::check_match(other, d.config), scoring::MismatchedRun);
  CHECK_NOTHROW(scoring::check_match(run.config, d.config));
  fs::remove_all(dir);
}

TEST_CASE("identical configs give identical runs") {
  const auto again = run_pipeline(ring_config());
  const auto& run = ring_run();
  CHECK(report::summary_json(again) == report::summary_json(run));
  CHECK(again.classes.classes == run.classes.classes);
  CHECK(again.frac_dist == run.frac_dist);
}

TEST_CASE("sweep on the ring finds two boundaries") {
  auto c = ring_config();
  c.alpha.reset();
  const auto run = run_sweep(c);
  REQUIRE(run.sweep);
  REQUIRE(run.sweep->plateau);
  CHECK(run.sweep->plateau->count == 2);
  CHECK(run.alpha == run.sweep->alpha_star);
}

TEST_CASE("missing run directory") {
  CHECK_THROWS_AS(report::read_digest("/nonexistent-run"), IoError);
}
