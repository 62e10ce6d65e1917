#pragma once

// Output files of a run and of the scorer. Layouts are listed in
// docs/formats.md.

#include <iosfwd>
#include <string>
#include <vector>

#include "swarmtopo/experiment.hpp"
#include "swarmtopo/scoring.hpp"

namespace swarmtopo::report {

inline constexpr int kSchema = 1;

void write_classification_csv(std::ostream& out, const std::vector<scoring::NodeReport>& nodes);
void write_distance_csv(std::ostream& out, const experiment::RunOutput& run);
void write_sweep_csv(std::ostream& out, const boundary::AlphaSweep& sweep);
void write_cost_csv(std::ostream& out, const std::vector<experiment::PhaseCost>& costs);
void write_loops_csv(std::ostream& out, const boundary::TokenLoopRun& loops);
void write_histogram_csv(std::ostream& out, const netgraph::DegreeHistogram& h);
void write_components_csv(std::ostream& out, const std::vector<topo::ComponentStats>& stats, NodeId outer_id);

std::string summary_json(const experiment::RunOutput& run);
std::string score_json(const scoring::ScoreReport& score, const scoring::RunDigest& run);

/// Creates `dir` and writes every file of the run into it. Throws IoError.
void write_run(const experiment::RunOutput& run, const std::string& dir);

/// Reads summary.json, classification.csv and distance.csv back from a run
/// directory. Throws IoError.
scoring::RunDigest read_digest(const std::string& dir);
std::vector<scoring::NodeReport> read_node_reports(const std::string& dir);

/// Whole file as a string; throws IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace swarmtopo::report
