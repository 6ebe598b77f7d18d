#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "variables.hpp"

namespace chambersim {

struct Edge {
  std::string from;
  std::string to;

  auto operator<=>(const Edge&) const = default;
};

class GroundTruthGraph {
 public:
  GroundTruthGraph(Config config, std::vector<Edge> edges,
                   std::vector<std::pair<std::string, std::string>> confounded = {});

  Config config() const { return config_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Documentation only; these pairs share a latent cause and are not edges.
  const std::vector<std::pair<std::string, std::string>>& known_confounded_pairs() const {
    return confounded_;
  }

  bool has_edge(std::string_view from, std::string_view to) const;
  bool has_node(std::string_view id) const;
  std::vector<std::string> parents(std::string_view id) const;
  std::vector<std::string> children(std::string_view id) const;
  bool is_acyclic() const;
  /// Directed path from -> to of length >= 1.
  bool reachable(std::string_view from, std::string_view to) const;

 private:
  Config config_;
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;  // sorted
  std::vector<std::pair<std::string, std::string>> confounded_;
};

/// Hardcoded ground truth; the returned reference is valid for the process
/// lifetime.
const GroundTruthGraph& graph_for(Config config);

/// Parse a `from,to[,...]` CSV. Lines starting with `#` and blank lines are
/// skipped; a `from,to` header is required unless there are no content lines.
/// Extra columns are returned in `extra` when non-null (one vector per edge).
std::vector<Edge> parse_edge_csv(std::string_view text,
                                 std::vector<std::vector<std::string>>* extra = nullptr);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Empty estimate scores precision 1, recall 0. Throws NotFoundError on an
/// estimate edge whose endpoint is not a node of the truth graph.
PrecisionRecall edge_precision_recall(const std::vector<Edge>& estimate,
                                      const GroundTruthGraph& truth);

std::string export_graph_csv(const GroundTruthGraph& g);

/// Raw embedded data file for a configuration (for inspection and tests).
std::string_view graph_source(Config config);

}  // namespace chambersim
