// swarmtopo command line: validate, run, sweep, oracle, paper-repro.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "swarmtopo/experiment.hpp"
#include "swarmtopo/report.hpp"
#include "swarmtopo/scoring.hpp"

namespace {

using namespace swarmtopo;
namespace fs = std::filesystem;

constexpr int kUsageExit = 1;

// Reference figures for the 45,000-node deployment (four boundaries).
constexpr double kReferenceMu = 179.65;
constexpr std::size_t kReferenceBoundaryAndNear = 11'358;
constexpr std::size_t kReferenceInterior = 33'642;

struct Flags {
  experiment::RunConfig config;
  std::string alpha = "sweep";
  std::size_t band_samples = 200'000;
  std::size_t seeds = 3;
};

void add_run_flags(CLI::App& cmd, Flags& f, bool with_alpha = true) {
  cmd.add_option("--region", f.config.region, "Region file (JSON) or 'standard'")->capture_default_str();
  cmd.add_option("--nodes", f.config.n, "Number of nodes")->capture_default_str();
  cmd.add_option("--seed", f.config.seed, "Deployment seed")->capture_default_str();
  if (with_alpha) cmd.add_option("--alpha", f.alpha, "Threshold factor or 'sweep'")->capture_default_str();
  cmd.add_option("--bins", f.config.bin_count, "Degree histogram bins")->capture_default_str();
  cmd.add_option("--voronoi-tol", f.config.tolerance_hops, "Voronoi hop tolerance")->capture_default_str();
  cmd.add_option("--min-comp", f.config.min_component_size, "Smallest component that counts")->capture_default_str();
  cmd.add_option("--loop-divisor", f.config.loop_size_divisor, "Token loop re-entry divisor")->capture_default_str();
  cmd.add_flag("!--exclusive-near", f.config.inclusive_near, "Leave members out of the near count");
  cmd.add_option("--out", f.config.out_dir, "Output directory")->capture_default_str();
  cmd.add_flag("--trace", f.config.trace, "Write trace.csv with every broadcast");
}

void resolve_alpha(Flags& f) {
  if (f.alpha == "sweep") {
    f.config.alpha.reset();
    return;
  }
  try {
    std::size_t used = 0;
    f.config.alpha = std::stod(f.alpha, &used);
    if (used != f.alpha.size()) throw std::invalid_argument(f.alpha);
  } catch (const std::exception&) {
    throw ConfigError("--alpha takes a number or 'sweep', got '" + f.alpha + "'");
  }
}

std::string out_dir(const experiment::RunConfig& c) { return c.out_dir.empty() ? "swarmtopo-out" : c.out_dir; }

void print_warnings(const experiment::RunOutput& run) {
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
}

void print_run(const experiment::RunOutput& run) {
  std::printf("nodes %zu  mu %.2f  mu_est %u  delta %u  alpha %.3f  threshold %u\n", run.graph.size(),
              run.density.mu_analytic, run.density.mu_est, run.density.delta, run.alpha, run.thresh);
  std::printf("boundary %zu  near %zu  interior %zu  components %zu (+%zu small)  outer %u\n",
              run.count(boundary::NodeClass::BOUNDARY), run.count(boundary::NodeClass::NEAR_BOUNDARY),
              run.count(boundary::NodeClass::INTERIOR), run.major.size(), run.stats.stats.size() - run.major.size(),
              run.outer_id.value);
  std::printf("thickness %.3f at node %u\n", run.thickness.report.thickness_estimate,
              run.thickness.report.best_node.value);
}

int cmd_validate(const Flags& f) {
  const auto region = experiment::load_region(f.config.region);
  const auto rep = geometry::validate_region(region);
  std::printf("k %zu  area %.4f  d_min %.4f  min_angle %.4f  max_angle %.4f\n", rep.k, rep.area, rep.d_min,
              rep.min_angle, rep.max_angle);
  return 0;
}

experiment::RunOutput traced(const experiment::RunConfig& c, bool sweep_only) {
  const auto dir = out_dir(c);
  if (!c.trace) return sweep_only ? experiment::run_sweep(c) : experiment::run_pipeline(c);
  fs::create_directories(dir);
  std::ofstream trace(fs::path(dir) / "trace.csv", std::ios::binary);
  if (!trace) throw IoError("cannot write " + (fs::path(dir) / "trace.csv").string());
  trace << "phase,round,node,kind,size_units\n";
  return sweep_only ? experiment::run_sweep(c, &trace) : experiment::run_pipeline(c, &trace);
}

int cmd_run(Flags& f) {
  resolve_alpha(f);
  const auto run = traced(f.config, false);
  report::write_run(run, out_dir(f.config));
  print_warnings(run);
  print_run(run);
  std::printf("wrote %s\n", out_dir(f.config).c_str());
  return 0;
}

int cmd_sweep(Flags& f) {
  f.config.alpha.reset();
  const auto run = traced(f.config, true);
  const auto dir = out_dir(f.config);
  fs::create_directories(dir);
  std::ostringstream sweep, hist;
  report::write_sweep_csv(sweep, *run.sweep);
  report::write_histogram_csv(hist, run.histogram);
  report::write_file((fs::path(dir) / "sweep.csv").string(), sweep.str());
  report::write_file((fs::path(dir) / "histogram.csv").string(), hist.str());
  print_warnings(run);
  for (const auto& p : run.sweep->points) {
    if (p.saturated) {
      std::printf("%.2f  -  %llu\n", p.alpha, static_cast<unsigned long long>(p.boundary_node_count));
    } else {
      std::printf("%.2f  %u  %llu\n", p.alpha, p.component_count, static_cast<unsigned long long>(p.boundary_node_count));
    }
  }
  if (run.sweep->plateau) {
    const auto& p = *run.sweep->plateau;
    std::printf("plateau %u components on [%.2f, %.2f], alpha* %.3f\n", p.count, p.alpha_lo, p.alpha_hi,
                run.sweep->alpha_star);
  } else {
    std::printf("no plateau, alpha* %.3f\n", run.sweep->alpha_star);
  }
  return 0;
}

int cmd_oracle(Flags& f) {
  resolve_alpha(f);
  const auto dir = out_dir(f.config);
  const auto digest = report::read_digest(dir);
  scoring::check_match(f.config, digest.config);
  const auto nodes = report::read_node_reports(dir);
  const auto region = experiment::load_region(f.config.region);
  const auto g = experiment::build_graph(region, f.config.n, f.config.seed);
  scoring::ScoreOptions opts;
  opts.band_samples = f.band_samples;
  const auto s = scoring::score(region, g, nodes, digest, opts);
  report::write_file((fs::path(dir) / "score.json").string(), report::score_json(s, digest));
  const auto& c = s.classification;
  std::printf("classification  cutoff %.3f  precision %.4f  recall %.4f  false boundary (>= %.1f) %.4f\n", c.cutoff,
              c.precision, c.recall, scoring::kFarDistance, c.false_boundary_rate);
  std::printf("detection       %zu/%zu = %.4f\n", s.detection.hits, s.detection.samples, s.detection.rate);
  std::printf("fractional      mean |error| %.4f over %zu nodes\n", s.fractional.mean_abs_error, s.fractional.nodes);
  std::printf("voronoi         %zu/%zu = %.4f\n", s.voronoi.hits, s.voronoi.flagged, s.voronoi.rate);
  std::printf("thickness       estimate %.3f  inradius %.3f  ratio %.3f\n", s.thickness.estimate,
              s.thickness.inradius, s.thickness.ratio);
  std::printf("outer           %s\n", s.outer_correct ? "correct" : "wrong");
  for (const auto& r : s.band_areas) {
    std::printf("band areas      curve %zu  outer %.4f vs %.4f  inner %.4f vs %.4f\n", r.curve, r.closed_form.outer_band,
                r.oracle.areas.outer_band, r.closed_form.inner_band, r.oracle.areas.inner_band);
  }
  return 0;
}

int cmd_paper_repro(Flags& f) {
  f.config.n = 45'000;
  f.config.region = experiment::kStandardRegionName;
  f.config.alpha.reset();
  const auto base = out_dir(f.config);
  std::vector<std::optional<experiment::RunOutput>> runs(f.seeds);
  experiment::parallel_for(f.seeds, experiment::max_threads(), [&](std::size_t i) {
    auto c = f.config;
    c.seed = f.config.seed + i;
    c.out_dir = (fs::path(base) / ("seed_" + std::to_string(c.seed))).string();
    runs[i] = experiment::run_pipeline(c);
    report::write_run(*runs[i], c.out_dir);
  });
  std::printf("reference: mu %.2f, boundary+near %zu, interior %zu, 4 components\n", kReferenceMu,
              kReferenceBoundaryAndNear, kReferenceInterior);
  for (const auto& r : runs) {
    const auto& run = *r;
    print_warnings(run);
    const auto bn = run.count(boundary::NodeClass::BOUNDARY) + run.count(boundary::NodeClass::NEAR_BOUNDARY);
    std::printf("\nseed %llu\n", static_cast<unsigned long long>(run.config.seed));
    std::printf("  mu %.2f  mu_est %u (%+.2f%%)  delta/mu %.3f  alpha* %.3f\n", run.density.mu_analytic,
                run.density.mu_est, 100.0 * (run.density.mu_est - run.density.mu_analytic) / run.density.mu_analytic,
                run.density.delta / run.density.mu_analytic, run.alpha);
    std::printf("  components %zu  boundary+near %zu (%.1f%%)  interior %zu\n", run.major.size(), bn,
                100.0 * bn / run.graph.size(), run.count(boundary::NodeClass::INTERIOR));
    std::printf("  %-10s %10s %10s %8s\n", "component", "|D|", "|N(D)|", "ratio");
    for (const auto& s : run.major) {
      std::printf("  %-10u %10llu %10llu %8.3f%s\n", s.component_id.value,
                  static_cast<unsigned long long>(s.boundary_count), static_cast<unsigned long long>(s.near_count),
                  s.ratio, s.component_id == run.outer_id ? "  outer" : "");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary and topology recognition in dense sensor networks"};
  app.require_subcommand(1);
  Flags f;
  auto* validate = app.add_subcommand("validate", "Check a region and print its feature report");
  validate->add_option("--region", f.config.region, "Region file (JSON) or 'standard'")->capture_default_str();
  auto* run = app.add_subcommand("run", "Full pipeline on one deployment");
  add_run_flags(*run, f);
  auto* sweep = app.add_subcommand("sweep", "Alpha sweep only");
  add_run_flags(*sweep, f, false);
  auto* oracle = app.add_subcommand("oracle", "Score a run directory against ground truth");
  add_run_flags(*oracle, f);
  oracle->add_option("--band-samples", f.band_samples, "Monte Carlo samples per band-area check")->capture_default_str();
  auto* repro = app.add_subcommand("paper-repro", "45,000 nodes on the standard region, several seeds");
  repro->add_option("--seed", f.config.seed, "First seed")->capture_default_str();
  repro->add_option("--seeds", f.seeds, "Number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
  repro->add_option("--out", f.config.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (*validate) return cmd_validate(f);
    if (*run) return cmd_run(f);
    if (*sweep) return cmd_sweep(f);
    if (*oracle) return cmd_oracle(f);
    if (*repro) return cmd_paper_repro(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.family());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::protocol);
  }
  return kUsageExit;
}
