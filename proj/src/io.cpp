#include "ages/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ages/errors.hpp"

namespace ages::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) { return trim(s.substr(0, s.find('#'))); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

int parse_int(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0 || v < 0 || v > 1'000'000) throw ParseError("not a count: '" + s + "'");
  return static_cast<int>(v);
}

int parse_header(const std::string& line) {
  const auto w = words(line);
  if (w.size() != 2 || w[0] != "p") throw ParseError("expected 'p N', got '" + line + "'");
  return parse_int(w[1]);
}

std::string name_of(VertexId v, const Labels* labels) {
  return labels ? (*labels)[v] : std::to_string(v);
}

VertexId vertex_of(const std::string& s, int p, const Labels* labels) {
  if (labels) {
    for (int i = 0; i < static_cast<int>(labels->size()); ++i)
      if ((*labels)[i] == s) return i;
    throw ParseError("unknown vertex name '" + s + "'");
  }
  const int v = parse_int(s);
  if (v >= p) throw ParseError("vertex " + s + " out of range");
  return v;
}

void check_labels(const Labels* labels, int p) {
  if (labels && static_cast<int>(labels->size()) != p) throw ParseError("label count does not match p");
}

// Reads edges from the lines until a blank line or end of input.
void read_edges(std::istream& in, MixedGraph& g, const Labels* labels) {
  std::string line;
  while (in.peek() != EOF && std::getline(in, line)) {
    if (trim(line).empty()) break;
    const std::string body = strip_comment(line);
    if (body.empty()) continue;
    const auto w = words(body);
    if (w.size() != 3 || (w[1] != "->" && w[1] != "--")) throw ParseError("bad edge line '" + line + "'");
    const VertexId a = vertex_of(w[0], g.size(), labels);
    const VertexId b = vertex_of(w[2], g.size(), labels);
    if (a == b) throw ParseError("self loop in '" + line + "'");
    if (g.adjacent(a, b)) throw ParseError("duplicate edge in '" + line + "'");
    if (w[1] == "->") {
      g.add_directed(a, b);
    } else {
      g.add_undirected(a, b);
    }
  }
}

// Next line that is not blank and not a pure comment; false at end of input.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!strip_comment(line).empty()) return true;
  }
  return false;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE) throw ParseError("not a number: '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  f.flush();
  if (!f) throw IoError("cannot write " + path.string());
}

Labels read_labels(std::istream& in) {
  Labels out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    for (const auto& l : out)
      if (l == t) throw ParseError("duplicate label '" + t + "'");
    out.push_back(t);
  }
  return out;
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (const auto& l : labels) out << l << '\n';
}

Labels default_labels(int p) {
  Labels out;
  for (int i = 0; i < p; ++i) out.push_back("X" + std::to_string(i + 1));
  return out;
}

MixedGraph read_edge_list(std::istream& in, const Labels* labels) {
  std::string line;
  if (!next_content_line(in, line)) throw ParseError("empty edge list");
  const int p = parse_header(strip_comment(line));
  check_labels(labels, p);
  MixedGraph g(p);
  read_edges(in, g, labels);
  return g;
}

void write_edge_list(std::ostream& out, const MixedGraph& g, const Labels* labels) {
  check_labels(labels, g.size());
  out << "p " << g.size() << '\n';
  for (const auto& [a, b] : g.directed_edges()) out << name_of(a, labels) << " -> " << name_of(b, labels) << '\n';
  for (const auto& [a, b] : g.undirected_edges()) out << name_of(a, labels) << " -- " << name_of(b, labels) << '\n';
}

void write_apdag(std::ostream& out, const Apdag& a, const Labels* labels) {
  write_edge_list(out, a.graph(), labels);
  for (const auto& pv : a.provenance) {
    out << "# source " << name_of(pv.edge.first, labels) << " -> " << name_of(pv.edge.second, labels) << ": "
        << (pv.source == kMeekSource ? std::string("meek") : std::to_string(pv.source)) << '\n';
  }
}

WeightedSem read_sem(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw ParseError("empty SEM file");
  const int p = parse_header(strip_comment(line));
  if (!next_content_line(in, line) || strip_comment(line) != "B") throw ParseError("expected 'B'");
  Eigen::MatrixXd b(p, p);
  for (int i = 0; i < p; ++i) {
    if (!next_content_line(in, line)) throw ParseError("missing row " + std::to_string(i) + " of B");
    const auto w = words(strip_comment(line));
    if (static_cast<int>(w.size()) != p) throw ParseError("row " + std::to_string(i) + " of B needs " + std::to_string(p) + " entries");
    for (int j = 0; j < p; ++j) b(i, j) = parse_double(w[j]);
  }
  if (!next_content_line(in, line)) throw ParseError("missing D line");
  const auto w = words(strip_comment(line));
  if (w.empty() || w[0] != "D" || static_cast<int>(w.size()) != p + 1) throw ParseError("expected 'D' and " + std::to_string(p) + " variances");
  Eigen::VectorXd d(p);
  for (int i = 0; i < p; ++i) d(i) = parse_double(w[i + 1]);
  if (next_content_line(in, line)) throw ParseError("trailing content in SEM file");
  return WeightedSem(b, d);
}

void write_sem(std::ostream& out, const WeightedSem& m) {
  const int p = m.size();
  out << "p " << p << "\nB\n";
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) out << (j ? " " : "") << format_double(m.weight(i, j));
    out << '\n';
  }
  out << 'D';
  for (int i = 0; i < p; ++i) out << ' ' << format_double(m.noise_variances()(i));
  out << '\n';
}

Table read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  Table t;
  t.names = split(trim(line), ',');
  if (t.names.empty() || (t.names.size() == 1 && t.names[0].empty())) throw ParseError("CSV header is empty");
  for (std::size_t a = 0; a < t.names.size(); ++a) {
    if (t.names[a].empty()) throw ParseError("empty column name");
    for (std::size_t b = 0; b < a; ++b)
      if (t.names[a] == t.names[b]) throw ParseError("duplicate column '" + t.names[a] + "'");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != t.names.size()) throw ParseError("row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      row.push_back(parse_double(c));
      if (!std::isfinite(row.back())) throw ParseError("non-finite value in CSV");
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.values(r, c) = rows[r][c];
  return t;
}

void write_table(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.names.size(); ++c) out << (c ? "," : "") << t.names[c];
  out << '\n';
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) out << (c ? "," : "") << format_double(t.values(r, c));
    out << '\n';
  }
}

Table read_covariance(std::istream& in) {
  Table t = read_table(in);
  if (t.values.rows() != t.values.cols()) throw ParseError("covariance CSV must be square");
  return t;
}

std::vector<PathBlock> read_path(std::istream& in, const Labels* labels) {
  std::vector<PathBlock> out;
  std::string line;
  while (next_content_line(in, line)) {
    const std::string body = strip_comment(line);
    if (body.rfind("lambda:", 0) != 0) throw ParseError("expected 'lambda:', got '" + line + "'");
    const double lambda = parse_double(body.substr(7));
    if (!next_content_line(in, line)) throw ParseError("missing graph after '" + body + "'");
    const int p = parse_header(strip_comment(line));
    check_labels(labels, p);
    MixedGraph g(p);
    read_edges(in, g, labels);
    out.push_back({lambda, std::move(g)});
  }
  return out;
}

void write_path(std::ostream& out, const SolutionPath& path, const Labels* labels) {
  for (std::size_t k = 0; k < path.entries.size(); ++k) {
    if (k) out << '\n';
    out << "lambda: " << format_double(path.entries[k].lambda) << '\n';
    write_edge_list(out, path.entries[k].cpdag.graph(), labels);
  }
}

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells) {
  out << "b13,b23,region,a0_edges,a_edges\n";
  for (const auto& c : cells) {
    out << format_double(c.b13) << ',' << format_double(c.b23) << ',' << region_name(c.region) << ','
        << edge_string(c.a0.graph()) << ',' << edge_string(c.a_oracle.graph()) << '\n';
  }
}

nlohmann::json graph_json(const MixedGraph& g, const Labels* labels) {
  check_labels(labels, g.size());
  nlohmann::json j;
  j["p"] = g.size();
  j["directed"] = nlohmann::json::array();
  j["undirected"] = nlohmann::json::array();
  for (const auto& [a, b] : g.directed_edges()) j["directed"].push_back({a, b});
  for (const auto& [a, b] : g.undirected_edges()) j["undirected"].push_back({a, b});
  if (labels) j["labels"] = *labels;
  return j;
}

MixedGraph graph_from_json(const nlohmann::json& j) {
  try {
    MixedGraph g(j.at("p").get<int>());
    for (const auto& e : j.at("directed")) g.add_directed(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& e : j.at("undirected")) g.add_undirected(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad graph JSON: ") + e.what());
  }
}

nlohmann::json apdag_json(const Apdag& a, const Labels* labels) {
  nlohmann::json j = graph_json(a.graph(), labels);
  j["provenance"] = nlohmann::json::array();
  for (const auto& pv : a.provenance) {
    j["provenance"].push_back({{"edge", {pv.edge.first, pv.edge.second}},
                               {"source", pv.source == kMeekSource ? nlohmann::json("meek") : nlohmann::json(pv.source)}});
  }
  j["conflicts_skipped"] = a.diagnostics.conflicts_skipped;
  j["rejected"] = a.diagnostics.rejected;
  return j;
}

nlohmann::json path_json(const SolutionPath& path, const Labels* labels) {
  nlohmann::json j;
  j["lambda_min"] = path.lambda_min;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : path.entries) j["entries"].push_back({{"lambda", e.lambda}, {"cpdag", graph_json(e.cpdag.graph(), labels)}});
  return j;
}

nlohmann::json report_json(const FaithfulnessReport& r) {
  nlohmann::json j;
  j["holds"] = r.holds;
  j["triples_checked"] = r.triples_checked;
  j["min_margin"] = std::isfinite(r.min_margin) ? nlohmann::json(r.min_margin) : nlohmann::json(nullptr);
  j["violations"] = nlohmann::json::array();
  for (const auto& v : r.violations) {
    j["violations"].push_back(
        {{"i", v.i}, {"j", v.j}, {"s", v.s}, {"abs_rho", v.abs_rho}, {"delta", v.delta}, {"stage", v.stage}});
  }
  return j;
}

}  // namespace ages::io
