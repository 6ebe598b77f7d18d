#include <gtest/gtest.h>

#include "error.hpp"
#include "graph.hpp"

using namespace chambersim;

namespace {
const Config kAll[] = {Config::lt_standard, Config::lt_camera, Config::wt_standard,
                       Config::wt_pressure_control};
}

TEST(Graph, EdgeCounts) {
  EXPECT_EQ(graph_for(Config::lt_standard).edges().size(), 57u);
  EXPECT_EQ(graph_for(Config::lt_camera).edges().size(), 65u);
  EXPECT_EQ(graph_for(Config::wt_standard).edges().size(), 42u);
  EXPECT_EQ(graph_for(Config::wt_pressure_control).edges().size(), 44u);
}

TEST(Graph, DocumentedEdges) {
  const auto& lt = graph_for(Config::lt_standard);
  EXPECT_TRUE(lt.has_edge("red", "ir_1"));
  EXPECT_FALSE(lt.has_edge("ir_1", "red"));
  const auto& pc = graph_for(Config::wt_pressure_control);
  EXPECT_TRUE(pc.has_edge("pressure_downwind", "load_in"));
  EXPECT_TRUE(pc.has_edge("pressure_downwind", "load_out"));
  EXPECT_FALSE(graph_for(Config::wt_standard).has_edge("pressure_downwind", "load_in"));
}

TEST(Graph, DerivedConfigsExtendTheirBase) {
  for (auto [base, derived] : {std::pair{Config::lt_standard, Config::lt_camera},
                               std::pair{Config::wt_standard, Config::wt_pressure_control}})
    for (const auto& e : graph_for(base).edges())
      EXPECT_TRUE(graph_for(derived).has_edge(e.from, e.to)) << e.from << "->" << e.to;
  int into_im = 0;
  for (const auto& e : graph_for(Config::lt_camera).edges()) into_im += e.to == "im";
  EXPECT_EQ(into_im, 8);
}

TEST(Graph, Acyclicity) {
  EXPECT_TRUE(graph_for(Config::lt_standard).is_acyclic());
  EXPECT_TRUE(graph_for(Config::lt_camera).is_acyclic());
  EXPECT_TRUE(graph_for(Config::wt_standard).is_acyclic());
  EXPECT_FALSE(graph_for(Config::wt_pressure_control).is_acyclic());
  // The cycle runs through the downwind barometer.
  const auto& pc = graph_for(Config::wt_pressure_control);
  EXPECT_TRUE(pc.reachable("pressure_downwind", "pressure_downwind"));
}

TEST(Graph, EndpointsAreDeclaredVariables) {
  for (Config c : kAll)
    for (const auto& e : graph_for(c).edges()) {
      EXPECT_NE(find_variable(c, e.from), nullptr) << e.from;
      EXPECT_NE(find_variable(c, e.to), nullptr) << e.to;
    }
}

TEST(Graph, ActuatorsHaveNoParentsInStandardConfigs) {
  for (Config c : {Config::lt_standard, Config::wt_standard})
    for (const auto& e : graph_for(c).edges())
      EXPECT_NE(find_variable(c, e.to)->kind, Kind::actuator) << e.from << "->" << e.to;
}

TEST(Graph, SensorsHaveNoChildrenInStandardConfigs) {
  for (Config c : {Config::lt_standard, Config::wt_standard})
    for (const auto& e : graph_for(c).edges())
      EXPECT_NE(find_variable(c, e.from)->kind, Kind::sensor) << e.from << "->" << e.to;
}

TEST(Graph, BarometersAreConfoundedNotLinked) {
  const auto& wt = graph_for(Config::wt_standard);
  EXPECT_EQ(wt.known_confounded_pairs().size(), 6u);
  EXPECT_FALSE(wt.has_edge("pressure_ambient", "pressure_downwind"));
  EXPECT_TRUE(graph_for(Config::lt_standard).known_confounded_pairs().empty());
}

TEST(Graph, PrecisionRecall) {
  GroundTruthGraph truth(Config::lt_standard, {{"red", "ir_1"}});
  auto pr = edge_precision_recall({{"red", "ir_1"}}, truth);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 1.0);
  pr = edge_precision_recall({{"red", "ir_1"}, {"ir_1", "vis_1"}}, truth);
  EXPECT_EQ(pr.precision, 0.5);
  EXPECT_EQ(pr.recall, 1.0);
  pr = edge_precision_recall({}, truth);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 0.0);
  EXPECT_THROW(edge_precision_recall({{"red", "flux"}}, truth), NotFoundError);

  for (Config c : kAll) {
    const auto& g = graph_for(c);
    pr = edge_precision_recall(g.edges(), g);
    EXPECT_EQ(pr.recall, 1.0);
    EXPECT_EQ(pr.precision, 1.0);
  }
}

TEST(Graph, PrecisionRecallBounds) {
  const auto& g = graph_for(Config::wt_standard);
  std::vector<Edge> est;
  for (std::size_t i = 0; i < g.nodes().size(); ++i)
    for (std::size_t j = 0; j < g.nodes().size(); j += 3)
      if (i != j) est.push_back({g.nodes()[i], g.nodes()[j]});
  const auto pr = edge_precision_recall(est, g);
  EXPECT_GE(pr.precision, 0.0);
  EXPECT_LE(pr.precision, 1.0);
  EXPECT_GE(pr.recall, 0.0);
  EXPECT_LE(pr.recall, 1.0);
}

TEST(Graph, ConstructorRejectsBadEdges) {
  EXPECT_THROW(GroundTruthGraph(Config::wt_standard, {{"red", "ir_1"}}), NotFoundError);
  EXPECT_ANY_THROW(GroundTruthGraph(Config::wt_standard, {{"hatch", "mic"}, {"hatch", "mic"}}));
}

TEST(Graph, ParseEdgeCsv) {
  std::vector<std::vector<std::string>> extra;
  auto edges = parse_edge_csv("# comment\nfrom,to,x_A,x_B\nred,ir_1,0,255\n\nblue,vis_1\n", &extra);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[1].from, "blue");
  EXPECT_EQ(extra[0], (std::vector<std::string>{"0", "255"}));
  EXPECT_TRUE(extra[1].empty());
  EXPECT_TRUE(parse_edge_csv("").empty());
  try {
    parse_edge_csv("from,to\nred\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_edge_csv("a,b\n"), ParseError);
}

TEST(Graph, ExportRoundTrip) {
  for (Config c : kAll) {
    const auto& g = graph_for(c);
    const auto back = parse_edge_csv(export_graph_csv(g));
    EXPECT_EQ(back, g.edges());
  }
}

TEST(Graph, ParentsAndChildren) {
  const auto& wt = graph_for(Config::wt_standard);
  const auto parents = wt.parents("rpm_in");
  EXPECT_NE(std::find(parents.begin(), parents.end(), "load_in"), parents.end());
  const auto children = wt.children("load_in");
  EXPECT_NE(std::find(children.begin(), children.end(), "rpm_in"), children.end());
}
