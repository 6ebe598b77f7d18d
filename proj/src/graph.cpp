#include "graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace detail {
std::string_view embedded_graph(std::string_view name);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string header_value(std::string_view text, std::string_view key) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() != '#') continue;
    t.remove_prefix(1);
    t = trim(t);
    if (t.substr(0, key.size()) == key && t.size() > key.size() && t[key.size()] == ':')
      return std::string(trim(t.substr(key.size() + 1)));
  }
  return {};
}

GroundTruthGraph load(Config config) {
  std::string_view text = detail::embedded_graph(to_string(config));
  std::vector<Edge> edges;
  std::string base = header_value(text, "extends");
  if (!base.empty()) {
    const auto& parent = graph_for(parse_config(base));
    edges = parent.edges();
  }
  for (auto& e : parse_edge_csv(text)) edges.push_back(std::move(e));

  std::string declared = header_value(text, "edges");
  auto n = parse_unsigned(declared);
  if (!n || *n != edges.size())
    throw Error(ErrorCode::invalid_argument,
                "graph data for " + std::string(to_string(config)) + " declares " +
                    declared + " edges, found " + std::to_string(edges.size()));

  std::vector<std::pair<std::string, std::string>> confounded;
  if (chamber_of(config) == Chamber::wind_tunnel) {
    const char* baros[] = {"pressure_upwind", "pressure_downwind", "pressure_ambient",
                           "pressure_intake"};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) confounded.emplace_back(baros[i], baros[j]);
  }
  return GroundTruthGraph(config, std::move(edges), std::move(confounded));
}

}  // namespace

GroundTruthGraph::GroundTruthGraph(
    Config config, std::vector<Edge> edges,
    std::vector<std::pair<std::string, std::string>> confounded)
    : config_(config), edges_(std::move(edges)), confounded_(std::move(confounded)) {
  for (const auto* v : config_variables(config)) nodes_.push_back(v->id);
  for (const auto& e : edges_) {
    for (const auto* id : {&e.from, &e.to}) {
      if (!has_node(*id))
        throw NotFoundError("edge " + e.from + " -> " + e.to + " references '" + *id +
                            "', which is not a variable of " +
                            std::string(to_string(config)));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end())
    throw Error(ErrorCode::invalid_argument,
                "duplicate edge " + dup->from + " -> " + dup->to);
}

bool GroundTruthGraph::has_edge(std::string_view from, std::string_view to) const {
  Edge key{std::string(from), std::string(to)};
  return std::binary_search(edges_.begin(), edges_.end(), key);
}

bool GroundTruthGraph::has_node(std::string_view id) const {
  return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
}

std::vector<std::string> GroundTruthGraph::parents(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges_)
    if (e.to == id) out.push_back(e.from);
  return out;
}

std::vector<std::string> GroundTruthGraph::children(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges_)
    if (e.from == id) out.push_back(e.to);
  return out;
}

bool GroundTruthGraph::reachable(std::string_view from, std::string_view to) const {
  std::set<std::string> seen;
  std::vector<std::string> stack = children(from);
  while (!stack.empty()) {
    std::string n = std::move(stack.back());
    stack.pop_back();
    if (n == to) return true;
    if (!seen.insert(n).second) continue;
    for (auto& c : children(n)) stack.push_back(std::move(c));
  }
  return false;
}

bool GroundTruthGraph::is_acyclic() const {
  // Kahn's algorithm.
  std::map<std::string, int> indeg;
  for (const auto& n : nodes_) indeg[n] = 0;
  for (const auto& e : edges_) ++indeg[e.to];
  std::vector<std::string> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::string n = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& e : edges_)
      if (e.from == n && --indeg[e.to] == 0) ready.push_back(e.to);
  }
  return visited == indeg.size();
}

const GroundTruthGraph& graph_for(Config config) {
  // One static per case: a derived graph loads its base through this function.
  switch (config) {
    case Config::lt_standard: {
      static const GroundTruthGraph g = load(Config::lt_standard);
      return g;
    }
    case Config::lt_camera: {
      static const GroundTruthGraph g = load(Config::lt_camera);
      return g;
    }
    case Config::wt_standard: {
      static const GroundTruthGraph g = load(Config::wt_standard);
      return g;
    }
    case Config::wt_pressure_control: {
      static const GroundTruthGraph g = load(Config::wt_pressure_control);
      return g;
    }
  }
  throw NotFoundError("unknown configuration");
}

std::string_view graph_source(Config config) {
  return detail::embedded_graph(to_string(config));
}

std::vector<Edge> parse_edge_csv(std::string_view text,
                                 std::vector<std::vector<std::string>>* extra) {
  std::vector<Edge> edges;
  bool header_seen = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() < 2 || trim(fields[0]) != "from" || trim(fields[1]) != "to")
        throw ParseError(lineno, "expected header 'from,to'");
      header_seen = true;
      continue;
    }
    if (fields.size() < 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
      throw ParseError(lineno, "expected 'from,to'");
    edges.push_back({std::string(trim(fields[0])), std::string(trim(fields[1]))});
    if (extra) {
      std::vector<std::string> rest;
      for (std::size_t i = 2; i < fields.size(); ++i) rest.emplace_back(trim(fields[i]));
      extra->push_back(std::move(rest));
    }
  }
  // A file with no content lines is an empty edge list.
  return edges;
}

PrecisionRecall edge_precision_recall(const std::vector<Edge>& estimate,
                                      const GroundTruthGraph& truth) {
  std::set<Edge> est;
  for (const auto& e : estimate) {
    for (const auto* id : {&e.from, &e.to})
      if (!truth.has_node(*id)) throw NotFoundError("unknown node id '" + *id + "'");
    est.insert(e);
  }
  std::size_t hit = 0;
  for (const auto& e : est)
    if (truth.has_edge(e.from, e.to)) ++hit;
  PrecisionRecall pr;
  pr.precision = est.empty() ? 1.0 : static_cast<double>(hit) / est.size();
  pr.recall = truth.edges().empty() ? 1.0 : static_cast<double>(hit) / truth.edges().size();
  return pr;
}

std::string export_graph_csv(const GroundTruthGraph& g) {
  std::string out = "from,to\n";
  for (const auto& e : g.edges()) out += e.from + "," + e.to + "\n";
  return out;
}

}  // namespace chambersim
