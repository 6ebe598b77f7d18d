#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "graph.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace chambersim {

struct ValidationSpec {
  Edge edge;
  // Full assignments over every manipulable variable except the target; they
  // differ only at the source.
  std::vector<Assignment> x_A;
  std::vector<Assignment> x_B;
  double T = 1.0;  // s
  std::size_t N = 100;
  double alpha = 0.01;

  void validate() const;
};

struct ValidationResult {
  std::vector<double> samples_A;
  std::vector<double> samples_B;
  double ks_statistic = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  bool underpowered = false;  // one arm drew no sample
};

/// Build x_A / x_B from the catalog: the source takes its contrast values, all
/// other manipulable variables their baselines. Overrides replace the contrast.
ValidationSpec make_validation_spec(Config config, const Edge& edge, std::size_t N,
                                    double alpha, double T,
                                    std::optional<double> x_a = std::nullopt,
                                    std::optional<double> x_b = std::nullopt);

/// The randomized procedure: per sample a fair coin picks the arm, the chamber
/// idles dt ~ U[1e-3, 1] s, takes the arm's assignment, waits T, and records
/// the target. KS on the two arms; reject iff p <= alpha.
ValidationResult validate_edge(const ValidationSpec& spec, Engine& engine, Stream& rng,
                               bool exact_p = false);

struct ValidationOptions {
  std::size_t N = 100;
  double alpha = 0.01;
  double T = 1.0;
  Fidelity fidelity = Fidelity::steady_state;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  unsigned threads = 1;
  bool exact_p = false;
};

struct EdgeRequest {
  Edge edge;
  std::optional<double> x_a;
  std::optional<double> x_b;
};

struct EdgeReport {
  Edge edge;
  std::size_t run = 0;
  double x_a = 0.0;
  double x_b = 0.0;
  double T = 0.0;
  std::size_t N = 0;
  double alpha = 0.0;
  double D = 0.0;
  double p = 1.0;
  bool rejected = false;
  bool underpowered = false;
  std::string error;  // non-empty when the request could not be run
};

/// Seed of one (edge, run) pair; independent of request order and threading.
std::uint64_t edge_seed(std::uint64_t seed, const Edge& edge, std::size_t run);

/// Runs every request `runs` times, one engine per (edge, run). Output is
/// sorted by edge, then run, regardless of `threads`.
std::vector<EdgeReport> validate_edges(Config config, const Params& params,
                                       const std::vector<EdgeRequest>& requests,
                                       const ValidationOptions& options);

/// CSV `edge,x_A,x_B,T,N,alpha,D,p,rejected`; failed requests are omitted.
/// A leading comment flags runs with ambient drift enabled.
std::string validation_report_csv(const std::vector<EdgeReport>& reports, const Params& params);

struct LevelResult {
  Edge edge;
  std::size_t runs = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double bound = 0.0;  // alpha + 3 sqrt(alpha (1 - alpha) / runs)
  bool within() const { return rate <= bound; }
};

/// Non-edges used to check the level of the procedure.
std::vector<Edge> curated_non_edges(Config config);

LevelResult level_test(Config config, const Params& params, const Edge& non_edge,
                       std::size_t runs, const ValidationOptions& options);

}  // namespace chambersim
