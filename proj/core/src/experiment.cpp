#include "swarmtopo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace swarmtopo::experiment {

namespace {

// Axis-aligned box centred at c with the four corners cut at 45 degrees.
geometry::Polygon octagon(geometry::Point c, double hw, double hh, double cut) {
  return geometry::Polygon{{{c.x + hw, c.y - hh + cut},
                            {c.x + hw, c.y + hh - cut},
                            {c.x + hw - cut, c.y + hh},
                            {c.x - hw + cut, c.y + hh},
                            {c.x - hw, c.y + hh - cut},
                            {c.x - hw, c.y - hh + cut},
                            {c.x - hw + cut, c.y - hh},
                            {c.x + hw - cut, c.y - hh}}};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

class Phases {
 public:
  Phases(RunOutput& out, std::ostream* trace) : out_(out), trace_(trace) {}

  sim::RunOptions options(const char* phase) const {
    sim::RunOptions o;
    o.trace = trace_;
    o.trace_phase = trace_ ? phase : nullptr;
    return o;
  }

  void record(const char* phase, const sim::CostLedger& ledger, std::uint32_t rounds) {
    out_.costs.push_back({phase, rounds, ledger.total_broadcasts, ledger.total_id_units});
  }

 private:
  RunOutput& out_;
  std::ostream* trace_;
};

}  // namespace

void check_config(const RunConfig& c) {
  if (c.n < 2) throw ConfigError("need at least two nodes");
  if (c.n > 2'000'000) throw ConfigError("more than 2,000,000 nodes is not supported");
  if (c.bin_count < netgraph::kMinBinCount) {
    throw ConfigError("bin count must be at least " + std::to_string(netgraph::kMinBinCount));
  }
  if (c.alpha && !(*c.alpha > 0.0 && *c.alpha <= 2.0)) throw ConfigError("alpha must lie in (0, 2]");
  if (c.min_component_size == 0) throw ConfigError("minimum component size must be positive");
  if (c.loop_size_divisor == 0) throw ConfigError("token loop size divisor must be positive");
  if (c.region.empty()) throw ConfigError("no region given");
}

geometry::Region standard_region() {
  const double eye = 2.45;
  const auto eye_at = [&](geometry::Point c) { return octagon(c, eye, eye, eye * (2.0 - std::sqrt(2.0))); };
  std::vector<geometry::BoundaryCurve> holes{eye_at({10, 20}), eye_at({20, 20}), octagon({15, 9}, 5, 2.5, 1.5)};
  double hole_area = 0.0;
  for (const auto& h : holes) hole_area += std::fabs(geometry::signed_area(std::get<geometry::Polygon>(h)));
  // four chamfers of c^2 / 2 each take the rest off the 30 x 30 box
  const double cut = std::sqrt((900.0 - kStandardArea - hole_area) / 2.0);
  std::vector<geometry::BoundaryCurve> curves{octagon({15, 15}, 15, 15, cut)};
  curves.insert(curves.end(), holes.begin(), holes.end());
  return geometry::Region(std::move(curves));
}

geometry::Region annulus_region(double inner_radius, double outer_radius) {
  if (!(inner_radius > 0.0 && outer_radius > inner_radius)) throw ConfigError("annulus radii out of order");
  const geometry::Point c{outer_radius, outer_radius};
  return geometry::Region({geometry::Circle{c, outer_radius}, geometry::Circle{c, inner_radius}});
}

geometry::Region load_region(const std::string& name_or_path) {
  if (name_or_path == kStandardRegionName) return standard_region();
  return geometry::load_region_file(name_or_path);
}

std::size_t RunOutput::count(boundary::NodeClass c) const {
  std::size_t k = 0;
  for (const auto x : classes.classes) k += x == c ? 1 : 0;
  return k;
}

netgraph::UnitDiskGraph build_graph(const geometry::Region& region, std::size_t n, std::uint64_t seed) {
  const auto points = geometry::sample_uniform(region, n, seed);
  return netgraph::build_udg(netgraph::assign_random_ids(points, seed));
}

RunOutput prepare(const RunConfig& config, std::ostream* trace) {
  check_config(config);
  RunOutput out(config, load_region(config.region));
  out.features = geometry::validate_region(out.region);
  out.graph = build_graph(out.region, config.n, config.seed);
  const auto& g = out.graph;
  Phases ph(out, trace);

  const double mu_analytic = boundary::analytic_mu(config.n, out.features.area);
  if (config.n < 100) out.warnings.push_back("only " + std::to_string(config.n) + " nodes");
  if (mu_analytic < kMinExpectedDegree) {
    out.warnings.push_back("expected degree " + fmt(mu_analytic) + " is below " + fmt(kMinExpectedDegree));
  }

  auto tr = tree::build_tree(g, ph.options("tree"));
  ph.record("tree", tr.ledger, tr.rounds_used);
  out.tree = std::move(tr.states);

  const auto mx = tree::aggregate(g, out.tree, tree::AggregateOp::MAX, tree::degree_values(g), ph.options("max_degree"));
  ph.record("max_degree", mx.ledger, mx.rounds_used);
  const auto delta = static_cast<std::uint32_t>(mx.value()[0]);
  const auto hist = tree::aggregate(g, out.tree, tree::AggregateOp::HISTOGRAM_MERGE,
                                    tree::histogram_values(g, delta, config.bin_count), ph.options("histogram"));
  ph.record("histogram", hist.ledger, hist.rounds_used);
  out.histogram = tree::histogram_from_payload(hist.value(), delta, config.bin_count);
  out.density = boundary::estimate_mu(out.histogram, mu_analytic);
  return out;
}

void sweep_stage(RunOutput& out, std::ostream* trace) {
  Phases ph(out, trace);
  boundary::SweepOptions so;
  so.min_component_size = out.config.min_component_size;
  out.sweep = boundary::alpha_sweep(out.graph, out.tree, out.density.mu_est, so, ph.options("sweep"));
  ph.record("sweep", out.sweep->ledger, out.sweep->rounds_used);
  out.alpha = out.sweep->alpha_star;
  if (out.sweep->fallback) out.warnings.push_back("alpha sweep found no plateau; using alpha " + fmt(out.alpha));
}

void finish(RunOutput& out, std::ostream* trace) {
  const auto& config = out.config;
  const auto& g = out.graph;
  const std::uint32_t mu_est = out.density.mu_est;
  Phases ph(out, trace);
  if (config.alpha) out.alpha = *config.alpha;

  const auto down = tree::broadcast_down(g, out.tree, {boundary::threshold(out.alpha, mu_est)}, ph.options("threshold"));
  ph.record("threshold", down.ledger, down.rounds_used);
  out.thresh = static_cast<std::uint32_t>(down.states.front().value.front());

  out.classes = boundary::classify(g, out.thresh, ph.options("classify"));
  ph.record("classify", out.classes.ledger, out.classes.rounds_used);
  out.view = boundary::discover(g, out.classes, /*with_common=*/true, ph.options("discover"));
  ph.record("discover", out.view.ledger, out.view.rounds_used);
  out.components = boundary::form_components(g, out.view, ph.options("components"));
  ph.record("components", out.components.ledger, out.components.rounds_used);

  out.flood = boundary::distance_flood(g, out.components.component_of, mu_est, ph.options("flood"));
  ph.record("flood", out.flood.ledger, out.flood.rounds_used);
  out.voronoi = boundary::detect_voronoi(out.flood, config.tolerance_hops);

  boundary::TokenLoopOptions lo;
  lo.size_divisor = config.loop_size_divisor;
  lo.min_component_size = config.min_component_size;
  out.loops = boundary::token_loops(g, out.view, out.components, lo, ph.options("loops"));
  ph.record("loops", out.loops.ledger, out.loops.rounds_used);
  for (const auto& loop : out.loops.loops) {
    if (!loop.closed && !loop.skipped) {
      out.warnings.push_back("token loop of component " + std::to_string(loop.component.value) +
                             " did not close: " + loop.failure);
    }
  }

  out.stats = topo::component_stats(g, out.view, out.components, config.inclusive_near, ph.options("near_count"));
  ph.record("near_count", out.stats.ledger, out.stats.rounds_used);
  for (const auto& s : out.stats.stats) {
    if (s.boundary_count >= config.min_component_size) out.major.push_back(s);
  }
  out.outer_id = topo::classify_outer(out.major.empty() ? out.stats.stats : out.major);

  out.frac_dist = topo::fractional_distances(g, out.flood, mu_est);
  out.thickness = topo::thickness(g, out.tree, out.flood, mu_est, ph.options("thickness"));
  ph.record("thickness", out.thickness.ledger, out.thickness.rounds_used);
}

RunOutput run_pipeline(const RunConfig& config, std::ostream* trace) {
  auto out = prepare(config, trace);
  if (!config.alpha) sweep_stage(out, trace);
  finish(out, trace);
  return out;
}

RunOutput run_sweep(const RunConfig& config, std::ostream* trace) {
  auto out = prepare(config, trace);
  sweep_stage(out, trace);
  return out;
}

std::size_t max_threads() {
  if (const char* env = std::getenv("SWARMTOPO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("SWARMTOPO_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace swarmtopo::experiment
