#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "params.hpp"

namespace chambersim {

enum class ModelId { A1, A2, B1, C1, C2, C3, D1, E1, F1, F2, F3 };

ModelId parse_model(std::string_view name);
std::string_view to_string(ModelId m);

struct ModelSignature {
  std::vector<std::string> inputs;
  std::vector<double> defaults;
  std::vector<std::string> outputs;
};

const ModelSignature& model_signature(ModelId m);

/// One grid axis: `var=start:stop:step`, `var=value` or `var=v1,v2,...`.
struct GridAxis {
  std::string var;
  std::vector<double> values;
};

GridAxis parse_grid_axis(std::string_view spec);

/// Evaluate over the Cartesian product of the axes (first axis slowest).
/// Unlisted inputs keep their defaults.
struct ModelTable {
  std::vector<std::string> header;  // inputs then outputs
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

ModelTable tabulate_model(ModelId m, const std::vector<GridAxis>& grid, const Params& params);

/// Evaluate a single point; `inputs` in signature order.
std::vector<double> evaluate_model(ModelId m, const std::vector<double>& inputs,
                                   const Params& params);

struct ModelFit {
  std::size_t n = 0;
  double rmse = 0.0;
  double r2 = 0.0;
  std::string target;
  std::vector<std::pair<std::string, double>> fitted;  // E1 only: beta0, beta1
};

/// Compare the model to recorded columns. E1 fits beta1 cos^2 + beta0 to
/// `target` (default ir_3); the other supported models (A1, B1, C1, C3, D1)
/// are evaluated with their parameters as given.
ModelFit compare_model(ModelId m, const Table& data, const Params& params,
                       std::string_view target = {});

/// R^2 and RMSE of predictions against observations.
std::pair<double, double> r2_rmse(const std::vector<double>& observed,
                                  const std::vector<double>& predicted);

/// Least squares y = b1 x + b0; returns {b0, b1}.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chambersim
