#include "swarmtopo/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

namespace swarmtopo::scoring {

std::vector<NodeReport> node_reports(const experiment::RunOutput& run) {
  std::vector<NodeReport> out(run.graph.size());
  for (NodeIndex v = 0; v < run.graph.size(); ++v) {
    out[v] = NodeReport{run.graph.id(v), run.classes.classes[v], run.flood.boundary_id(v), run.flood.hop_dist(v),
                        run.frac_dist[v], run.voronoi[v] != 0};
  }
  return out;
}

RunDigest digest(const experiment::RunOutput& run) {
  return RunDigest{run.config, run.alpha, run.outer_id, run.thickness.report, run.major};
}

void check_match(const experiment::RunConfig& expected, const experiment::RunConfig& found) {
  auto fail = [](const std::string& field) { throw MismatchedRun("run output was produced with a different " + field); };
  if (expected.region != found.region) fail("region");
  if (expected.n != found.n) fail("node count");
  if (expected.seed != found.seed) fail("seed");
  if (expected.alpha != found.alpha) fail("alpha");
  if (expected.bin_count != found.bin_count) fail("bin count");
  if (expected.tolerance_hops != found.tolerance_hops) fail("Voronoi tolerance");
  if (expected.min_component_size != found.min_component_size) fail("minimum component size");
  if (expected.loop_size_divisor != found.loop_size_divisor) fail("token loop divisor");
  if (expected.inclusive_near != found.inclusive_near) fail("near-count mode");
}

double ideal_cutoff(double alpha) { return geometry::invert_visibility(std::clamp(alpha, 0.5, 1.0)); }

std::vector<geometry::BoundaryDistance> node_truth(const geometry::Region& region, const netgraph::UnitDiskGraph& g) {
  std::vector<geometry::BoundaryDistance> out;
  out.reserve(g.size());
  for (NodeIndex v = 0; v < g.size(); ++v) out.push_back(geometry::boundary_distance(region, g.position(v)));
  return out;
}

std::map<NodeId, std::size_t> component_curves(const std::vector<NodeReport>& nodes,
                                               const std::vector<geometry::BoundaryDistance>& truth) {
  std::map<NodeId, std::map<std::size_t, std::size_t>> votes;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].cls == boundary::NodeClass::BOUNDARY && nodes[v].hop_dist == 0) {
      ++votes[nodes[v].boundary_id][truth[v].curve_index];
    }
  }
  std::map<NodeId, std::size_t> out;
  for (const auto& [comp, tally] : votes) {
    std::size_t best = 0, best_n = 0;
    for (const auto& [curve, k] : tally) {
      if (k > best_n) {
        best = curve;
        best_n = k;
      }
    }
    out[comp] = best;
  }
  return out;
}

ClassificationScore score_classification(const std::vector<char>& is_boundary, const std::vector<double>& distance,
                                         double cutoff, double far_distance) {
  if (is_boundary.size() != distance.size()) throw std::invalid_argument("score_classification: length mismatch");
  ClassificationScore s;
  s.cutoff = cutoff;
  const double edges[] = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < std::size(edges); ++i) s.bands.push_back({edges[i], edges[i + 1], 0, 0});
  std::size_t tp = 0, labelled = 0, truth = 0;
  for (std::size_t v = 0; v < distance.size(); ++v) {
    const bool b = is_boundary[v] != 0;
    const bool t = distance[v] < cutoff;
    labelled += b;
    truth += t;
    tp += b && t;
    if (distance[v] >= far_distance) {
      ++s.far_nodes;
      s.far_boundary += b;
    }
    for (auto& band : s.bands) {
      if (distance[v] >= band.lo && distance[v] < band.hi) {
        ++band.nodes;
        band.boundary += b;
        break;
      }
    }
  }
  s.precision = labelled ? static_cast<double>(tp) / labelled : 0.0;
  s.recall = truth ? static_cast<double>(tp) / truth : 0.0;
  s.false_boundary_rate = s.far_nodes ? static_cast<double>(s.far_boundary) / s.far_nodes : 0.0;
  return s;
}

std::vector<geometry::Point> straight_samples(const geometry::Region& region, double spacing, double clearance) {
  if (!(spacing > 0.0)) throw std::invalid_argument("straight_samples: spacing must be positive");
  std::vector<geometry::Point> out;
  for (const auto& curve : region.curves()) {
    const auto* poly = std::get_if<geometry::Polygon>(&curve);
    if (!poly) continue;
    const auto& vs = poly->vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const geometry::Point a = vs[i], b = vs[(i + 1) % vs.size()];
      const double len = geometry::distance(a, b);
      for (double t = clearance; t <= len - clearance + 1e-12; t += spacing) {
        out.push_back(a + (t / len) * (b - a));
      }
    }
  }
  return out;
}

DetectionScore score_detection(const netgraph::UnitDiskGraph& g, const std::vector<char>& is_boundary,
                               const std::vector<geometry::Point>& samples, double eps) {
  std::vector<geometry::Point> marked;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (is_boundary[v]) marked.push_back(g.position(v));
  }
  DetectionScore s;
  s.samples = samples.size();
  for (const auto& x : samples) {
    s.hits += std::any_of(marked.begin(), marked.end(), [&](geometry::Point p) { return geometry::distance(p, x) <= eps; });
  }
  s.rate = s.samples ? static_cast<double>(s.hits) / s.samples : 0.0;
  return s;
}

bool on_straight_stretch(const geometry::Region& region, geometry::Point p, double clearance) {
  double best = std::numeric_limits<double>::infinity();
  bool straight = false;
  for (const auto& curve : region.curves()) {
    if (const auto* poly = std::get_if<geometry::Polygon>(&curve)) {
      const auto& vs = poly->vertices;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const geometry::Point a = vs[i], b = vs[(i + 1) % vs.size()];
        const double d = geometry::segment_distance(p, a, b);
        if (d < best) {
          best = d;
          const double len = geometry::distance(a, b);
          const double s = geometry::dot(p - a, b - a) / len;
          straight = s >= clearance && len - s >= clearance;
        }
      }
    } else {
      const double d = geometry::curve_distance(curve, p);
      if (d < best) {
        best = d;
        straight = false;
      }
    }
  }
  return straight;
}

FracScore score_fractional(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                           const std::vector<NodeReport>& nodes, const std::vector<geometry::BoundaryDistance>& truth,
                           double reach) {
  FracScore s;
  double sum = 0.0;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (truth[v].distance > reach || !std::isfinite(nodes[v].frac_dist)) continue;
    if (!on_straight_stretch(region, g.position(v), 1.0)) continue;
    ++s.nodes;
    sum += std::fabs(nodes[v].frac_dist - truth[v].distance);
  }
  s.mean_abs_error = s.nodes ? sum / s.nodes : 0.0;
  return s;
}

VoronoiScore score_voronoi(const std::vector<NodeReport>& nodes, const std::vector<geometry::BoundaryDistance>& truth,
                           double reach) {
  VoronoiScore s;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (!nodes[v].voronoi) continue;
    ++s.flagged;
    if (truth[v].second_curve_index && std::fabs(truth[v].second_distance - truth[v].distance) / 2.0 <= reach) ++s.hits;
  }
  s.rate = s.flagged ? static_cast<double>(s.hits) / s.flagged : 0.0;
  return s;
}

ThicknessScore score_thickness(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                               const topo::ThicknessReport& report, double grid_step) {
  ThicknessScore s;
  s.inradius = geometry::inradius_oracle(region, grid_step).thickness;
  s.estimate = report.thickness_estimate;
  s.ratio = s.inradius > 0.0 ? s.estimate / s.inradius : 0.0;
  if (const auto v = g.index_of(report.best_node)) {
    s.best_true_distance = geometry::boundary_distance(region, g.position(*v)).distance;
  }
  return s;
}

std::vector<BandAreaRow> band_area_table(const geometry::Region& region, std::size_t samples, std::uint64_t seed) {
  std::vector<BandAreaRow> out;
  for (std::size_t i = 0; i < region.curves().size(); ++i) {
    const auto* poly = std::get_if<geometry::Polygon>(&region.curve(i));
    if (!poly) continue;
    BandAreaRow row;
    row.curve = i;
    row.closed_form = geometry::band_areas_closed_form(*poly, 1.0);
    row.oracle = geometry::band_areas_oracle(*poly, 1.0, samples, seed + i);
    row.outer_rel_error = std::fabs(row.closed_form.outer_band - row.oracle.areas.outer_band) / row.oracle.areas.outer_band;
    row.inner_rel_error = std::fabs(row.closed_form.inner_band - row.oracle.areas.inner_band) / row.oracle.areas.inner_band;
    out.push_back(row);
  }
  return out;
}

bool loop_covers(const netgraph::UnitDiskGraph& g, const std::vector<NodeIndex>& members,
                 const std::vector<NodeId>& loop) {
  std::vector<NodeIndex> sources;
  for (const NodeId id : loop) {
    if (const auto v = g.index_of(id)) sources.push_back(*v);
  }
  const auto hops = netgraph::hop_bfs(g, sources);
  return std::all_of(members.begin(), members.end(), [&](NodeIndex m) { return hops[m] <= 2; });
}

ScoreReport score(const geometry::Region& region, const netgraph::UnitDiskGraph& g,
                  const std::vector<NodeReport>& nodes, const RunDigest& run, const ScoreOptions& options) {
  if (nodes.size() != g.size()) throw MismatchedRun("node table has " + std::to_string(nodes.size()) +
                                                    " rows, the deployment has " + std::to_string(g.size()) + " nodes");
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (nodes[v].id != g.id(v)) throw MismatchedRun("node table does not match the deployment at row " + std::to_string(v));
  }
  const auto truth = node_truth(region, g);
  std::vector<char> is_boundary(g.size());
  std::vector<double> dist(g.size());
  for (NodeIndex v = 0; v < g.size(); ++v) {
    is_boundary[v] = nodes[v].cls == boundary::NodeClass::BOUNDARY;
    dist[v] = truth[v].distance;
  }
  ScoreReport r;
  r.classification = score_classification(is_boundary, dist, ideal_cutoff(run.alpha));
  r.detection = score_detection(g, is_boundary, straight_samples(region, options.sample_spacing, options.corner_clearance),
                                options.detection_eps);
  r.fractional = score_fractional(region, g, nodes, truth);
  r.voronoi = score_voronoi(nodes, truth);
  r.thickness = score_thickness(region, g, run.thickness);
  const auto curves = component_curves(nodes, truth);
  if (const auto it = curves.find(run.outer_id); it != curves.end()) r.outer_curve = it->second;
  r.outer_correct = r.outer_curve == std::size_t{0};
  if (options.band_samples > 0) r.band_areas = band_area_table(region, options.band_samples, run.config.seed);
  return r;
}

}  // namespace swarmtopo::scoring
