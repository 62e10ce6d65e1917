#pragma once

// End-to-end runs: configuration, the builtin test region and the pipeline
// that chains every protocol phase on one deployment.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "swarmtopo/boundary.hpp"
#include "swarmtopo/convergetree.hpp"
#include "swarmtopo/geometry.hpp"
#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/topo.hpp"

namespace swarmtopo::experiment {

inline constexpr const char* kStandardRegionName = "standard";
inline constexpr double kStandardArea = 786.9;
/// Below this many neighbours per node the density assumption is off.
inline constexpr double kMinExpectedDegree = 100.0;

struct RunConfig {
  std::string region = kStandardRegionName;  // builtin name or JSON path
  std::size_t n = 45'000;
  std::uint64_t seed = 1;
  std::optional<double> alpha;  // empty: sweep
  std::size_t bin_count = netgraph::kDefaultBinCount;
  std::uint32_t tolerance_hops = boundary::kDefaultVoronoiTolerance;
  std::uint32_t min_component_size = boundary::kDefaultMinComponentSize;
  std::uint32_t loop_size_divisor = boundary::TokenLoopOptions{}.size_divisor;
  bool inclusive_near = true;
  std::string out_dir;
  bool trace = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError for values no run can use.
void check_config(const RunConfig& config);

/// 30 x 30 box with chamfered corners, two octagonal eyes and a wide
/// octagonal mouth; area 786.9.
geometry::Region standard_region();

/// Concentric circles; the ring is 2 * half_width wide.
geometry::Region annulus_region(double inner_radius, double outer_radius);

/// "standard" or a region file.
geometry::Region load_region(const std::string& name_or_path);

struct PhaseCost {
  std::string phase;
  std::uint32_t rounds = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t id_units = 0;
};

struct RunOutput {
  RunOutput(RunConfig c, geometry::Region r) : config(std::move(c)), region(std::move(r)) {}

  RunConfig config;
  geometry::Region region;
  geometry::FeatureReport features;
  netgraph::UnitDiskGraph graph;
  std::vector<tree::TreeState> tree;
  netgraph::DegreeHistogram histogram;
  boundary::DensityEstimate density;
  std::optional<boundary::AlphaSweep> sweep;
  double alpha = boundary::kDefaultAlpha;
  std::uint32_t thresh = 0;
  boundary::ClassifyRun classes;
  boundary::TwoHopView view;
  boundary::ComponentRun components;
  boundary::FloodResult flood;
  std::vector<char> voronoi;
  boundary::TokenLoopRun loops;
  topo::StatsRun stats;
  /// Components with at least min_component_size members, ascending by id.
  std::vector<topo::ComponentStats> major;
  NodeId outer_id;
  std::vector<double> frac_dist;
  topo::ThicknessRun thickness;
  std::vector<PhaseCost> costs;
  std::vector<std::string> warnings;

  std::size_t count(boundary::NodeClass c) const;
};

/// validate -> sample -> graph -> tree -> density -> (sweep) -> classify ->
/// components -> flood -> voronoi -> loops -> topo. Trace lines go to
/// `trace` with a leading phase column when it is set.
RunOutput run_pipeline(const RunConfig& config, std::ostream* trace = nullptr);

/// Stages of run_pipeline: everything up to the density estimate, the alpha
/// sweep (sets alpha to its result) and the rest at the chosen alpha.
RunOutput prepare(const RunConfig& config, std::ostream* trace = nullptr);
void sweep_stage(RunOutput& out, std::ostream* trace = nullptr);
void finish(RunOutput& out, std::ostream* trace = nullptr);

/// prepare + sweep_stage.
RunOutput run_sweep(const RunConfig& config, std::ostream* trace = nullptr);

/// SWARMTOPO_THREADS if set, else the hardware thread count.
std::size_t max_threads();

/// Calls fn(i) for i in [0, count) on up to `threads` threads. Results must
/// be written to per-index slots; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn);

/// Sample and build the graph only (same points as run_pipeline).
netgraph::UnitDiskGraph build_graph(const geometry::Region& region, std::size_t n, std::uint64_t seed);

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace swarmtopo::experiment
