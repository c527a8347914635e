#pragma once

// Text formats read and written by the CLI. Every writer's output is accepted
// by the matching reader, and numbers are written with enough digits to
// round-trip exactly.

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ages/aggregate.hpp"
#include "ages/faithfulness.hpp"
#include "ages/ges.hpp"
#include "ages/graph.hpp"
#include "ages/sem.hpp"
#include "json.hpp"

namespace ages::io {

using Labels = std::vector<std::string>;

std::string format_double(double x);
double parse_double(const std::string& s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// One name per line.
Labels read_labels(std::istream& in);
void write_labels(std::ostream& out, const Labels& labels);
// X1, ..., Xp.
Labels default_labels(int p);

// "p N" followed by one edge per line, "a -> b" or "a -- b". Vertices are
// indices, or names when labels are given. '#' starts a comment.
MixedGraph read_edge_list(std::istream& in, const Labels* labels = nullptr);
void write_edge_list(std::ostream& out, const MixedGraph& g, const Labels* labels = nullptr);

// Edge list followed by "# source a -> b: k" comment lines (k is the position
// in the aggregated list, or "meek").
void write_apdag(std::ostream& out, const Apdag& a, const Labels* labels = nullptr);

// "p N", a line "B", N rows of N weights, then "D" and N noise variances.
WeightedSem read_sem(std::istream& in);
void write_sem(std::ostream& out, const WeightedSem& m);

// Comma-separated numbers with a header line of column names.
struct Table {
  Labels names;
  Eigen::MatrixXd values;
};
Table read_table(std::istream& in);
void write_table(std::ostream& out, const Table& t);

// A square table; names label the variables.
Table read_covariance(std::istream& in);

// Blocks "lambda: x" + edge list, separated by blank lines.
struct PathBlock {
  double lambda;
  MixedGraph graph;
};
std::vector<PathBlock> read_path(std::istream& in, const Labels* labels = nullptr);
void write_path(std::ostream& out, const SolutionPath& path, const Labels* labels = nullptr);

// b13,b23,region,a0_edges,a_edges with edges in edge_string notation.
void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells);

nlohmann::json graph_json(const MixedGraph& g, const Labels* labels = nullptr);
MixedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json apdag_json(const Apdag& a, const Labels* labels = nullptr);
nlohmann::json path_json(const SolutionPath& path, const Labels* labels = nullptr);
nlohmann::json report_json(const FaithfulnessReport& r);

}  // namespace ages::io
