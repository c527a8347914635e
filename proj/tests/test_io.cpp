#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "ages/aggregate.hpp"
#include "ages/errors.hpp"
#include "ages/io.hpp"
#include "ages/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ages;

namespace {

MixedGraph edge_round_trip(const MixedGraph& g, const io::Labels* labels = nullptr) {
  std::ostringstream os;
  io::write_edge_list(os, g, labels);
  std::istringstream is(os.str());
  return io::read_edge_list(is, labels);
}

MixedGraph parse_graph(const std::string& text) {
  std::istringstream is(text);
  return io::read_edge_list(is);
}

}  // namespace

TEST_CASE("edge lists") {
  const MixedGraph g = fixture::four_apdag();
  CHECK(edge_round_trip(g) == g);
  const io::Labels names = io::default_labels(4);
  CHECK(edge_round_trip(g, &names) == g);

  const io::Labels three = io::default_labels(3);
  std::ostringstream os;
  io::write_edge_list(os, fixture::triangle_apdag(), &three);
  CHECK(os.str() == "p 3\nX1 -> X3\nX2 -> X3\nX1 -- X2\n");

  CHECK(parse_graph("# comment\np 3\n0 -> 1  # trailing\n\n") == fixture::graph(3, "0->1"));
  CHECK(parse_graph("p 2\n") == MixedGraph(2));
  CHECK_THROWS_AS(parse_graph(""), ParseError);
  CHECK_THROWS_AS(parse_graph("q 3\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("p 3\n0 => 1\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("p 3\n0 -> 3\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("p 3\n0 -> 0\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("p 3\n0 -> 1\n1 -- 0\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("p -1\n"), ParseError);

  CHECK_THROWS_AS(edge_round_trip(g, &three), ParseError);
}

TEST_CASE("random graphs round-trip") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const int p = 1 + static_cast<int>(rng.index(9));
    const Dag d = oracle::random_dag(rng, p, rng.uniform());
    MixedGraph g = d.graph();
    for (const auto& [a, b] : d.graph().directed_edges())
      if (rng.uniform() < 0.5) g.add_undirected(a, b);
    CHECK(edge_round_trip(g) == g);
    CHECK(io::graph_from_json(nlohmann::json::parse(io::graph_json(g).dump())) == g);
  }
}

TEST_CASE("SEM files are exact") {
  Rng rng(5);
  SemGenConfig cfg;
  cfg.p = 7;
  for (int t = 0; t < 20; ++t) {
    const WeightedSem m = random_sem(cfg, rng);
    std::ostringstream os;
    io::write_sem(os, m);
    std::istringstream is(os.str());
    const WeightedSem back = io::read_sem(is);
    CHECK(back.weights() == m.weights());
    CHECK(back.noise_variances() == m.noise_variances());
  }
  std::istringstream bad("p 2\nB\n0 1\n0\nD 1 1\n");
  CHECK_THROWS_AS(io::read_sem(bad), ParseError);
  std::istringstream extra("p 1\nB\n0\nD 1\n0\n");
  CHECK_THROWS_AS(io::read_sem(extra), ParseError);
  std::istringstream text("p 1\nB\nx\nD 1\n");
  CHECK_THROWS_AS(io::read_sem(text), ParseError);
}

TEST_CASE("CSV tables") {
  io::Table t;
  t.names = {"a", "b"};
  t.values.resize(2, 2);
  t.values << 0.1, 1e-300, -3.0, 1.0 / 3.0;
  std::ostringstream os;
  io::write_table(os, t);
  std::istringstream is(os.str());
  const io::Table back = io::read_table(is);
  CHECK(back.names == t.names);
  CHECK(back.values == t.values);

  std::istringstream square(os.str());
  CHECK(io::read_covariance(square).values == t.values);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(io::read_table(ragged), ParseError);
  std::istringstream dup("a,a\n1,2\n");
  CHECK_THROWS_AS(io::read_table(dup), ParseError);
  std::istringstream nan("a\nnan\n");
  CHECK_THROWS_AS(io::read_table(nan), ParseError);
  std::istringstream rect("a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_covariance(rect), ParseError);
}

TEST_CASE("labels") {
  std::istringstream is("X1\n\nX2\n");
  CHECK(io::read_labels(is) == io::Labels{"X1", "X2"});
  std::istringstream dup("a\na\n");
  CHECK_THROWS_AS(io::read_labels(dup), ParseError);
}

TEST_CASE("solution paths round-trip") {
  const SolutionPath path = solution_path(true_covariance(fixture::four_node()), 0.0);
  std::ostringstream os;
  io::write_path(os, path);
  std::istringstream is(os.str());
  const auto blocks = io::read_path(is);
  REQUIRE(blocks.size() == path.entries.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    CHECK(blocks[k].lambda == path.entries[k].lambda);
    CHECK(blocks[k].graph == path.entries[k].cpdag.graph());
  }
  const auto j = io::path_json(path);
  CHECK(j["entries"].size() == path.entries.size());

  std::istringstream bad("p 2\n");
  CHECK_THROWS_AS(io::read_path(bad), ParseError);
}

TEST_CASE("APDAG output carries provenance") {
  const AgesResult r = ages_run(true_covariance(fixture::weak_link()));
  std::ostringstream os;
  io::write_apdag(os, r.apdag);
  std::istringstream is(os.str());
  CHECK(io::read_edge_list(is) == r.apdag.graph());
  CHECK(os.str().find("# source ") != std::string::npos);
  const auto j = io::apdag_json(r.apdag);
  CHECK(j["provenance"].size() == r.apdag.provenance.size());
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "ages_test_io";
  std::filesystem::create_directories(dir);
  io::write_file(dir / "x.txt", "abc\n");
  CHECK(io::read_file(dir / "x.txt") == "abc\n");
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), IoError);
  CHECK_THROWS_AS(io::write_file(dir / "no" / "such" / "x.txt", ""), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("region CSV") {
  RegionGrid grid;
  grid.resolution = 2;
  const auto cells = region_map(grid, 1);
  std::ostringstream os;
  io::write_region_csv(os, cells);
  const std::string s = os.str();
  CHECK(s.rfind("b13,b23,region,a0_edges,a_edges\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
