#pragma once

// Scoring of run results against geometric ground truth.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmtopo/boundary.hpp"
#include "swarmtopo/error.hpp"
#include "swarmtopo/experiment.hpp"
#include "swarmtopo/geometry.hpp"
#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/topo.hpp"

namespace swarmtopo::scoring {

class MismatchedRun : public OracleError {
 public:
  using OracleError::OracleError;
};

/// Final per-node state of a run, as written to classification.csv and
/// distance.csv. Rows are in graph index order.
struct NodeReport {
  NodeId id;
  boundary::NodeClass cls = boundary::NodeClass::INTERIOR;
  NodeId boundary_id;
  std::uint32_t hop_dist = netgraph::kUnreachable;
  double frac_dist = 0.0;
  bool voronoi = false;
};

/// The run-level numbers the scorer needs besides the node table.
struct RunDigest {
  experiment::RunConfig config;
  double alpha = 0.0;
  NodeId outer_id;
  topo::ThicknessReport thickness;
  std::vector<topo::ComponentStats> components;
};

std::vector<NodeReport> node_reports(const experiment::RunOutput& run);
RunDigest digest(const experiment::RunOutput& run);

/// Throws MismatchedRun unless the two configs describe the same deployment
/// and parameters (output directory and tracing are ignored).
void check_match(const experiment::RunConfig& expected, const experiment::RunConfig& found);

/// Distance below which the straight-boundary model puts a node under the
/// threshold alpha * mu.
double ideal_cutoff(double alpha);

std::vector<geometry::BoundaryDistance> node_truth(const geometry::Region& region, const netgraph::UnitDiskGraph& g);

/// Majority nearest curve of each component's members.
std::map<NodeId, std::size_t> component_curves(const std::vector<NodeReport>& nodes,
                                               const std::vector<geometry::BoundaryDistance>& truth);

struct BandRow {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t nodes = 0;
  std::size_t boundary = 0;
};

struct ClassificationScore {
  double cutoff = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t far_nodes = 0;  // true distance >= far_distance
  std::size_t far_boundary = 0;
  double false_boundary_rate = 0.0;
  std::vector<BandRow> bands;
};

inline constexpr double kFarDistance = 1.5;

/// Truth: distance < cutoff. Labels: is_boundary.
ClassificationScore score_classification(const std::vector<char>& is_boundary, const std::vector<double>& distance,
                                         double cutoff, double far_distance = kFarDistance);

/// Points on polygon edges at least `clearance` from either end, `spacing`
/// apart.
std::vector<geometry::Point> straight_samples(const geometry::Region& region, double spacing, double clearance);

struct DetectionScore {
  std::size_t samples = 0;
  std::size_t hits = 0;
  double rate = 0.0;
};

/// A sample is hit when some boundary node lies within eps of it.
DetectionScore score_detection(const netgraph::UnitDiskGraph& g, const std::vector<char>& is_boundary,
                               const std::vector<geometry::Point>& samples, double eps);

/// Nearest boundary point lies on a polygon edge at least `clearance` from
/// both of its corners.
bool on_straight_stretch(const geometry::Region& region, geometry::Point p, double clearance);

struct FracScore {
  std::size_t nodes = 0;
  double mean_abs_error = 0.0;
};

/// Nodes within `reach` of a straight stretch.
FracScore score_fractional(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                           const std::vector<NodeReport>& nodes, const std::vector<geometry::BoundaryDistance>& truth,
                           double reach = 1.0);

struct VoronoiScore {
  std::size_t flagged = 0;
  std::size_t hits = 0;
  double rate = 0.0;
};

/// Hit: the node is within `reach` of the bisector of its two nearest curves,
/// measured as |d1 - d2| / 2.
VoronoiScore score_voronoi(const std::vector<NodeReport>& nodes, const std::vector<geometry::BoundaryDistance>& truth,
                           double reach = 2.0);

struct ThicknessScore {
  double inradius = 0.0;
  double estimate = 0.0;
  double ratio = 0.0;
  double best_true_distance = 0.0;
};

ThicknessScore score_thickness(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                               const topo::ThicknessReport& report, double grid_step = 0.1);

struct BandAreaRow {
  std::size_t curve = 0;
  geometry::BandAreas closed_form;
  geometry::BandAreaEstimate oracle;
  double outer_rel_error = 0.0;
  double inner_rel_error = 0.0;
};

/// Polygon curves only.
std::vector<BandAreaRow> band_area_table(const geometry::Region& region, std::size_t samples, std::uint64_t seed);

/// Every member within two hops of some loop node.
bool loop_covers(const netgraph::UnitDiskGraph& g, const std::vector<NodeIndex>& members,
                 const std::vector<NodeId>& loop);

struct ScoreReport {
  ClassificationScore classification;
  DetectionScore detection;
  FracScore fractional;
  VoronoiScore voronoi;
  ThicknessScore thickness;
  std::optional<std::size_t> outer_curve;
  bool outer_correct = false;
  std::vector<BandAreaRow> band_areas;
};

struct ScoreOptions {
  double detection_eps = 0.25;
  double sample_spacing = 1.0;
  double corner_clearance = 1.0;
  std::size_t band_samples = 200'000;
};

ScoreReport score(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                  const std::vector<NodeReport>& nodes, const RunDigest& run, const ScoreOptions& options = {});

}  // namespace swarmtopo::scoring
