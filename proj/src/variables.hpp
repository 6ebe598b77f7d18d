#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chambersim {

enum class Chamber { light_tunnel, wind_tunnel };

enum class Kind { actuator, sensor_parameter, sensor };

enum class Config { lt_standard, lt_camera, wt_standard, wt_pressure_control };

/// How a column is typed when a dataset is read back.
enum class ColumnType { real, integer, path };

/// Value domain of a variable.
struct Range {
  enum class Shape { interval, grid, finite_set };

  Shape shape = Shape::interval;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;           // grid only
  std::vector<double> values;  // finite_set only

  static Range interval(double lo, double hi);
  static Range grid(double lo, double hi, double step);
  static Range set(std::vector<double> values);

  bool contains(double v) const;
  double min() const;
  double max() const;
  std::string describe() const;
};

struct ChamberVariable {
  std::string id;
  std::string symbol;
  Kind kind = Kind::sensor;
  Range range;
  Chamber chamber = Chamber::wind_tunnel;
  ColumnType column_type = ColumnType::real;
  double default_value = 0.0;
  // Value held by the other coordinates while validating an edge.
  double baseline = 0.0;
  // Values used for x_A / x_B when validating an edge out of this variable.
  double contrast_lo = 0.0;
  double contrast_hi = 0.0;
  bool camera_only = false;

  bool settable() const { return kind != Kind::sensor; }
};

std::string_view to_string(Chamber c);
std::string_view to_string(Kind k);
std::string_view to_string(Config c);

/// Accepts `lt_standard`, `lt_camera`, `wt_standard`, `wt_pressure_control`.
Config parse_config(std::string_view name);
/// Protocol header form: chamber `lt`/`wt` plus `standard`, `camera` or
/// `pressure_control`.
std::optional<Config> config_from_parts(std::string_view chamber,
                                        std::string_view variant);
std::string_view chamber_code(Chamber c);
std::string_view variant_name(Config c);
Chamber chamber_of(Config c);

/// Every variable of a chamber, in dataset column order.
const std::vector<ChamberVariable>& chamber_variables(Chamber c);

/// Variables present in a configuration, in dataset column order.
std::vector<const ChamberVariable*> config_variables(Config c);

/// Lookup restricted to a configuration; nullptr when absent.
const ChamberVariable* find_variable(Config c, std::string_view id);

/// Extra bookkeeping columns appended by the pressure controller.
const std::vector<std::string>& pid_columns();

/// Dataset header columns after `timestamp,intervention`.
std::vector<std::string> dataset_columns(Config c);

}  // namespace chambersim
