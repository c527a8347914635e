#pragma once

// Worked examples shared by the unit and acceptance tests. Vertices are
// 0-based, so X1 is vertex 0.

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "ages/graph.hpp"
#include "ages/sem.hpp"

namespace fixture {

// "0->1;1--2" style edge strings, the same notation edge_string prints.
inline ages::MixedGraph graph(int p, const std::string& edges) {
  ages::MixedGraph g(p);
  std::stringstream ss(edges);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto dir = item.find("->");
    const auto und = item.find("--");
    if (dir != std::string::npos) {
      g.add_directed(std::stoi(item.substr(0, dir)), std::stoi(item.substr(dir + 2)));
    } else {
      g.add_undirected(std::stoi(item.substr(0, und)), std::stoi(item.substr(und + 2)));
    }
  }
  return g;
}

inline ages::WeightedSem sem(int p, std::initializer_list<std::tuple<int, int, double>> edges,
                             Eigen::VectorXd noise) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [i, j, w] : edges) b(i, j) = w;
  return ages::WeightedSem(b, noise);
}

// X2 = 0.1 X1 + e2, X3 = X1 + X2 + e3.
inline ages::WeightedSem weak_link() { return sem(3, {{0, 1, 0.1}, {0, 2, 1.0}, {1, 2, 1.0}}, Eigen::VectorXd::Ones(3)); }

// Weak-link family with free weights on X1 -> X3 and X2 -> X3.
inline ages::WeightedSem weak_link_family(double b13, double b23) {
  return sem(3, {{0, 1, 0.1}, {0, 2, b13}, {1, 2, b23}}, Eigen::VectorXd::Ones(3));
}

// Weak edge X4 -> X2 that orients the rest.
inline ages::WeightedSem weak_parent() {
  return sem(4, {{0, 1, 1.0}, {0, 2, 0.5}, {1, 2, 1.0}, {3, 1, 0.1}}, Eigen::VectorXd::Ones(4));
}

inline ages::WeightedSem four_node() {
  Eigen::VectorXd d(4);
  d << 0.3, 0.4, 0.3, 0.4;
  return sem(4, {{0, 1, 0.15}, {0, 2, 0.8}, {1, 2, 1.0}, {2, 3, 0.1}, {0, 3, 0.3}}, d);
}

// Four-vertex model where path strong faithfulness is stricter than needed.
inline ages::WeightedSem faithfulness_gap() {
  return sem(4, {{0, 1, 0.1}, {0, 2, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}}, Eigen::VectorXd::Ones(4));
}

// Graphs of the worked examples.
inline ages::MixedGraph triangle_dag() { return graph(3, "0->1;0->2;1->2"); }
inline ages::MixedGraph triangle_cpdag() { return graph(3, "0--1;0--2;1--2"); }
inline ages::MixedGraph collider_3() { return graph(3, "0->2;1->2"); }
inline ages::MixedGraph triangle_apdag() { return graph(3, "0--1;0->2;1->2"); }

inline ages::MixedGraph weak_parent_dag() { return graph(4, "0->1;0->2;1->2;3->1"); }
inline ages::MixedGraph weak_parent_triangle() { return graph(4, "0--1;0--2;1--2"); }

inline ages::MixedGraph four_dag() { return graph(4, "0->1;0->2;1->2;2->3;0->3"); }
inline ages::MixedGraph four_cpdag() { return graph(4, "0--1;0--2;1--2;2--3;0--3"); }
// Drawn variant of the second four-vertex path CPDAG; GES does not produce it.
inline ages::MixedGraph four_drawn_c1() { return graph(4, "1--3;0->2;1->2;3->2;0--3"); }
inline ages::MixedGraph four_c2() { return graph(4, "1--3;0->2;1->2;0--3"); }
inline ages::MixedGraph four_c3() { return graph(4, "0->2;1->2;0--3"); }
inline ages::MixedGraph four_c4() { return graph(4, "0->2;1->2"); }
inline ages::MixedGraph four_c5() { return graph(4, "1--2"); }
inline ages::MixedGraph four_partial() { return graph(4, "0--1;0->2;1->2;2--3;0--3"); }
inline ages::MixedGraph four_apdag() { return graph(4, "0--1;0->2;1->2;2->3;0->3"); }

inline ages::MixedGraph region_white() { return graph(3, "0--1;0->2;1->2"); }
inline ages::MixedGraph region_grey() { return graph(3, "0--1;0--2;1--2"); }
inline ages::MixedGraph region_v1() { return graph(3, "0->1;2->1;0--2"); }
inline ages::MixedGraph region_v0() { return graph(3, "1->0;2->0;1--2"); }

}  // namespace fixture
