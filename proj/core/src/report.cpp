#include "swarmtopo/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swarmtopo::report {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Grid alphas are k/20; print them the way they were meant.
double tidy(double x) { return std::round(x * 1e9) / 1e9; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError(path + ": expected header \"" + header + "\"");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split(line));
  }
  return rows;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad " + what + " value \"" + s + "\"");
  }
}

json config_json(const experiment::RunConfig& c) {
  json j;
  j["region"] = c.region;
  j["n"] = c.n;
  j["seed"] = c.seed;
  if (c.alpha) {
    j["alpha"] = *c.alpha;
  } else {
    j["alpha"] = "sweep";
  }
  j["bin_count"] = c.bin_count;
  j["tolerance_hops"] = c.tolerance_hops;
  j["min_component_size"] = c.min_component_size;
  j["loop_size_divisor"] = c.loop_size_divisor;
  j["inclusive_near"] = c.inclusive_near;
  return j;
}

experiment::RunConfig config_from_json(const json& j) {
  experiment::RunConfig c;
  c.region = j.at("region").get<std::string>();
  c.n = j.at("n").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.at("alpha").is_number()) c.alpha = j.at("alpha").get<double>();
  c.bin_count = j.at("bin_count").get<std::size_t>();
  c.tolerance_hops = j.at("tolerance_hops").get<std::uint32_t>();
  c.min_component_size = j.at("min_component_size").get<std::uint32_t>();
  c.loop_size_divisor = j.at("loop_size_divisor").get<std::uint32_t>();
  c.inclusive_near = j.at("inclusive_near").get<bool>();
  return c;
}

json components_json(const std::vector<topo::ComponentStats>& stats) {
  json arr = json::array();
  for (const auto& s : stats) {
    arr.push_back({{"id", s.component_id.value}, {"size", s.boundary_count}, {"near_size", s.near_count},
                   {"ratio", s.ratio}});
  }
  return arr;
}

}  // namespace

void write_classification_csv(std::ostream& out, const std::vector<scoring::NodeReport>& nodes) {
  out << "id,class,boundary_id,hop_dist,voronoi\n";
  for (const auto& r : nodes) {
    out << r.id.value << ',' << boundary::to_string(r.cls) << ',';
    if (r.boundary_id) out << r.boundary_id.value;
    out << ',';
    if (r.hop_dist != netgraph::kUnreachable) out << r.hop_dist;
    out << ',' << (r.voronoi ? 1 : 0) << '\n';
  }
}

void write_distance_csv(std::ostream& out, const experiment::RunOutput& run) {
  out << "id,degree,frac_dist\n";
  for (NodeIndex v = 0; v < run.graph.size(); ++v) {
    out << run.graph.id(v).value << ',' << run.graph.degree(v) << ',';
    if (std::isfinite(run.frac_dist[v])) out << num(run.frac_dist[v]);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const boundary::AlphaSweep& sweep) {
  out << "alpha,component_count,boundary_node_count\n";
  for (const auto& p : sweep.points) {
    out << num(tidy(p.alpha)) << ',';
    if (!p.saturated) out << p.component_count;
    out << ',' << p.boundary_node_count << '\n';
  }
}

void write_cost_csv(std::ostream& out, const std::vector<experiment::PhaseCost>& costs) {
  out << "phase,rounds,broadcasts,id_units\n";
  experiment::PhaseCost total{"total"};
  for (const auto& c : costs) {
    out << c.phase << ',' << c.rounds << ',' << c.broadcasts << ',' << c.id_units << '\n';
    total.rounds += c.rounds;
    total.broadcasts += c.broadcasts;
    total.id_units += c.id_units;
  }
  out << total.phase << ',' << total.rounds << ',' << total.broadcasts << ',' << total.id_units << '\n';
}

void write_loops_csv(std::ostream& out, const boundary::TokenLoopRun& loops) {
  out << "component,status,length,backtracks,nodes\n";
  for (const auto& l : loops.loops) {
    out << l.component.value << ',' << (l.skipped ? "skipped" : l.closed ? "closed" : "failed") << ','
        << (l.nodes.empty() ? 0 : l.nodes.size() - 1) << ',' << l.backtracks << ',';
    for (std::size_t i = 0; i < l.nodes.size(); ++i) out << (i ? " " : "") << l.nodes[i].value;
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const netgraph::DegreeHistogram& h) {
  out << "bin,lo,hi,count,degree_sum\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << b << ',' << num(h.bin_lo(b)) << ',' << num(h.bin_lo(b) + h.bin_width) << ',' << h.counts[b] << ','
        << h.degree_sums[b] << '\n';
  }
}

void write_components_csv(std::ostream& out, const std::vector<topo::ComponentStats>& stats, NodeId outer_id) {
  out << "id,boundary_count,near_count,ratio,outer\n";
  for (const auto& s : stats) {
    out << s.component_id.value << ',' << s.boundary_count << ',' << s.near_count << ',' << num(s.ratio) << ','
        << (s.component_id == outer_id ? 1 : 0) << '\n';
  }
}

std::string summary_json(const experiment::RunOutput& run) {
  using boundary::NodeClass;
  json j;
  j["schema"] = kSchema;
  j["config"] = config_json(run.config);
  j["region"] = {{"area", run.features.area}, {"d_min", run.features.d_min}, {"k", run.features.k}};
  j["mu_analytic"] = run.density.mu_analytic;
  j["mu_est"] = run.density.mu_est;
  j["delta"] = run.density.delta;
  j["alpha_star"] = tidy(run.alpha);
  j["threshold"] = run.thresh;
  if (run.sweep && run.sweep->plateau) {
    const auto& p = *run.sweep->plateau;
    j["plateau"] = {{"alpha_lo", tidy(p.alpha_lo)}, {"alpha_hi", tidy(p.alpha_hi)}, {"count", p.count},
                    {"length", p.length}};
  } else {
    j["plateau"] = nullptr;
  }
  j["components"] = components_json(run.major);
  j["small_components"] = run.stats.stats.size() - run.major.size();
  j["outer_id"] = run.outer_id.value;
  j["thickness_estimate"] = run.thickness.report.thickness_estimate;
  j["thickness"] = {{"best_node", run.thickness.report.best_node.value},
                    {"hop_dist", run.thickness.report.hop_dist},
                    {"frac_dist", run.thickness.report.frac_dist}};
  std::size_t voronoi = 0;
  for (const char f : run.voronoi) voronoi += f ? 1 : 0;
  j["voronoi_count"] = voronoi;
  j["counts"] = {{"boundary", run.count(NodeClass::BOUNDARY)},
                 {"near", run.count(NodeClass::NEAR_BOUNDARY)},
                 {"interior", run.count(NodeClass::INTERIOR)}};
  std::size_t closed = 0, failed = 0, skipped = 0;
  for (const auto& l : run.loops.loops) {
    if (l.skipped) {
      ++skipped;
    } else if (l.closed) {
      ++closed;
    } else {
      ++failed;
    }
  }
  j["loops"] = {{"closed", closed}, {"failed", failed}, {"skipped", skipped}};
  experiment::PhaseCost total;
  for (const auto& c : run.costs) {
    total.rounds += c.rounds;
    total.broadcasts += c.broadcasts;
    total.id_units += c.id_units;
  }
  j["cost"] = {{"rounds", total.rounds}, {"broadcasts", total.broadcasts}, {"id_units", total.id_units}};
  j["warnings"] = run.warnings;
  return j.dump(2) + "\n";
}

std::string score_json(const scoring::ScoreReport& s, const scoring::RunDigest& run) {
  json j;
  j["schema"] = kSchema;
  j["config"] = config_json(run.config);
  const auto& c = s.classification;
  json bands = json::array();
  for (const auto& b : c.bands) {
    bands.push_back({{"lo", b.lo}, {"hi", std::isinf(b.hi) ? json(nullptr) : json(b.hi)}, {"nodes", b.nodes},
                     {"boundary", b.boundary}});
  }
  j["classification"] = {{"cutoff", c.cutoff},       {"precision", c.precision},
                         {"recall", c.recall},       {"far_nodes", c.far_nodes},
                         {"far_boundary", c.far_boundary}, {"false_boundary_rate", c.false_boundary_rate},
                         {"bands", bands}};
  j["detection"] = {{"samples", s.detection.samples}, {"hits", s.detection.hits}, {"rate", s.detection.rate}};
  j["fractional"] = {{"nodes", s.fractional.nodes}, {"mean_abs_error", s.fractional.mean_abs_error}};
  j["voronoi"] = {{"flagged", s.voronoi.flagged}, {"hits", s.voronoi.hits}, {"rate", s.voronoi.rate}};
  j["thickness"] = {{"inradius", s.thickness.inradius},
                    {"estimate", s.thickness.estimate},
                    {"ratio", s.thickness.ratio},
                    {"best_true_distance", s.thickness.best_true_distance}};
  j["outer"] = {{"id", run.outer_id.value},
                {"curve", s.outer_curve ? json(*s.outer_curve) : json(nullptr)},
                {"correct", s.outer_correct}};
  json areas = json::array();
  for (const auto& r : s.band_areas) {
    areas.push_back({{"curve", r.curve},
                     {"outer_closed_form", r.closed_form.outer_band},
                     {"outer_oracle", r.oracle.areas.outer_band},
                     {"inner_closed_form", r.closed_form.inner_band},
                     {"inner_oracle", r.oracle.areas.inner_band},
                     {"outer_rel_error", r.outer_rel_error},
                     {"inner_rel_error", r.inner_rel_error}});
  }
  j["band_areas"] = areas;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

void write_run(const experiment::RunOutput& run, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  auto emit = [&](const char* name, auto&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_file(path(name), ss.str());
  };
  emit("classification.csv", [&](std::ostream& o) { write_classification_csv(o, scoring::node_reports(run)); });
  emit("distance.csv", [&](std::ostream& o) { write_distance_csv(o, run); });
  if (run.sweep) emit("sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, *run.sweep); });
  emit("cost.csv", [&](std::ostream& o) { write_cost_csv(o, run.costs); });
  emit("loops.csv", [&](std::ostream& o) { write_loops_csv(o, run.loops); });
  emit("histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, run.histogram); });
  emit("components.csv", [&](std::ostream& o) { write_components_csv(o, run.major, run.outer_id); });
  write_file(path("summary.json"), summary_json(run));
}

scoring::RunDigest read_digest(const std::string& dir) {
  const auto path = (std::filesystem::path(dir) / "summary.json").string();
  try {
    const json j = json::parse(read_file(path));
    if (j.at("schema").get<int>() != kSchema) throw IoError(path + ": unsupported schema");
    scoring::RunDigest d;
    d.config = config_from_json(j.at("config"));
    d.alpha = j.at("alpha_star").get<double>();
    d.outer_id = NodeId{j.at("outer_id").get<std::uint32_t>()};
    const auto& t = j.at("thickness");
    d.thickness.best_node = NodeId{t.at("best_node").get<std::uint32_t>()};
    d.thickness.hop_dist = t.at("hop_dist").get<std::uint32_t>();
    d.thickness.frac_dist = t.at("frac_dist").get<double>();
    d.thickness.thickness_estimate = j.at("thickness_estimate").get<double>();
    for (const auto& c : j.at("components")) {
      d.components.push_back(topo::make_stats(NodeId{c.at("id").get<std::uint32_t>()}, c.at("size").get<std::uint64_t>(),
                                              c.at("near_size").get<std::uint64_t>()));
    }
    return d;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::vector<scoring::NodeReport> read_node_reports(const std::string& dir) {
  const auto cls_path = (std::filesystem::path(dir) / "classification.csv").string();
  const auto dist_path = (std::filesystem::path(dir) / "distance.csv").string();
  const auto cls = read_csv(cls_path, "id,class,boundary_id,hop_dist,voronoi");
  const auto dist = read_csv(dist_path, "id,degree,frac_dist");
  if (cls.size() != dist.size()) throw IoError(cls_path + " and " + dist_path + " differ in length");
  std::vector<scoring::NodeReport> out(cls.size());
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto& r = cls[i];
    if (r.size() != 5 || dist[i].size() != 3) throw IoError(cls_path + ": malformed row " + std::to_string(i + 2));
    auto& n = out[i];
    n.id = NodeId{static_cast<std::uint32_t>(to_u64(r[0], "id"))};
    if (r[1] == "boundary") {
      n.cls = boundary::NodeClass::BOUNDARY;
    } else if (r[1] == "near") {
      n.cls = boundary::NodeClass::NEAR_BOUNDARY;
    } else if (r[1] == "interior") {
      n.cls = boundary::NodeClass::INTERIOR;
    } else {
      throw IoError(cls_path + ": unknown class \"" + r[1] + "\"");
    }
    if (!r[2].empty()) n.boundary_id = NodeId{static_cast<std::uint32_t>(to_u64(r[2], "boundary_id"))};
    if (!r[3].empty()) n.hop_dist = static_cast<std::uint32_t>(to_u64(r[3], "hop_dist"));
    n.voronoi = r[4] == "1";
    if (to_u64(dist[i][0], "id") != n.id.value) throw IoError(dist_path + ": row order differs from classification");
    n.frac_dist = dist[i][2].empty() ? std::numeric_limits<double>::infinity() : std::stod(dist[i][2]);
  }
  return out;
}

}  // namespace swarmtopo::report
