#include "variables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

Range Range::interval(double lo, double hi) {
  Range r;
  r.shape = Shape::interval;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Range Range::grid(double lo, double hi, double step) {
  Range r;
  r.shape = Shape::grid;
  r.lo = lo;
  r.hi = hi;
  r.step = step;
  return r;
}

Range Range::set(std::vector<double> values) {
  Range r;
  r.shape = Shape::finite_set;
  r.values = std::move(values);
  r.lo = *std::min_element(r.values.begin(), r.values.end());
  r.hi = *std::max_element(r.values.begin(), r.values.end());
  return r;
}

bool Range::contains(double v) const {
  if (!std::isfinite(v)) return false;
  switch (shape) {
    case Shape::interval:
      return v >= lo && v <= hi;
    case Shape::grid: {
      if (v < lo || v > hi) return false;
      double k = (v - lo) / step;
      return std::fabs(k - std::round(k)) < 1e-6;
    }
    case Shape::finite_set:
      // Membership is exact up to decimal representation error (1/3200 etc.).
      return std::any_of(values.begin(), values.end(), [v](double m) {
        return std::fabs(v - m) <= 1e-12 * std::max(1.0, std::fabs(m));
      });
  }
  return false;
}

double Range::min() const { return lo; }
double Range::max() const { return hi; }

std::string Range::describe() const {
  switch (shape) {
    case Shape::interval:
      if (std::isinf(hi)) return ">= " + format_number(lo);
      return "[" + format_number(lo) + ", " + format_number(hi) + "]";
    case Shape::grid:
      return format_number(lo) + ":" + format_number(hi) + ":" + format_number(step);
    case Shape::finite_set: {
      std::string s = "{";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        s += format_number(values[i]);
      }
      return s + "}";
    }
  }
  return {};
}

std::string_view to_string(Chamber c) {
  return c == Chamber::light_tunnel ? "light_tunnel" : "wind_tunnel";
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::actuator:
      return "actuator";
    case Kind::sensor_parameter:
      return "sensor_parameter";
    case Kind::sensor:
      return "sensor";
  }
  return "sensor";
}

std::string_view to_string(Config c) {
  switch (c) {
    case Config::lt_standard:
      return "lt_standard";
    case Config::lt_camera:
      return "lt_camera";
    case Config::wt_standard:
      return "wt_standard";
    case Config::wt_pressure_control:
      return "wt_pressure_control";
  }
  return "";
}

Config parse_config(std::string_view name) {
  for (Config c : {Config::lt_standard, Config::lt_camera, Config::wt_standard,
                   Config::wt_pressure_control}) {
    if (to_string(c) == name) return c;
  }
  throw NotFoundError("unknown configuration '" + std::string(name) +
                      "' (expected lt_standard, lt_camera, wt_standard or "
                      "wt_pressure_control)");
}

std::optional<Config> config_from_parts(std::string_view chamber,
                                        std::string_view variant) {
  if (chamber == "lt") {
    if (variant == "standard") return Config::lt_standard;
    if (variant == "camera") return Config::lt_camera;
  } else if (chamber == "wt") {
    if (variant == "standard") return Config::wt_standard;
    if (variant == "pressure_control") return Config::wt_pressure_control;
  }
  return std::nullopt;
}

std::string_view chamber_code(Chamber c) {
  return c == Chamber::light_tunnel ? "lt" : "wt";
}

std::string_view variant_name(Config c) {
  switch (c) {
    case Config::lt_standard:
    case Config::wt_standard:
      return "standard";
    case Config::lt_camera:
      return "camera";
    case Config::wt_pressure_control:
      return "pressure_control";
  }
  return "standard";
}

Chamber chamber_of(Config c) {
  return (c == Config::lt_standard || c == Config::lt_camera) ? Chamber::light_tunnel
                                                               : Chamber::wind_tunnel;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAmbient = 101325.0;

ChamberVariable make(Chamber ch, std::string id, std::string symbol, Kind kind,
                     Range range, ColumnType type, double def) {
  ChamberVariable v;
  v.id = std::move(id);
  v.symbol = std::move(symbol);
  v.kind = kind;
  v.chamber = ch;
  v.column_type = type;
  v.default_value = def;
  v.baseline = def;
  v.contrast_lo = range.min();
  v.contrast_hi = range.max();
  v.range = std::move(range);
  return v;
}

const std::vector<double> kVrefSettings{1.1, 2.56, 5.0};
const std::vector<double> kOsr{1, 2, 4, 8};

std::vector<ChamberVariable> build_wind() {
  const Chamber W = Chamber::wind_tunnel;
  const Range adc = Range::interval(0, 1023);
  std::vector<ChamberVariable> vs;
  auto actuator = [&](std::string id, std::string sym, Range r, double def) {
    vs.push_back(make(W, std::move(id), std::move(sym), Kind::actuator, std::move(r),
                      ColumnType::real, def));
  };
  auto param = [&](std::string id, std::string sym, Range r, double def) {
    vs.push_back(make(W, std::move(id), std::move(sym), Kind::sensor_parameter,
                      std::move(r), ColumnType::real, def));
  };
  auto sensor = [&](std::string id, std::string sym, Range r) {
    vs.push_back(
        make(W, std::move(id), std::move(sym), Kind::sensor, std::move(r), ColumnType::real, 0));
  };

  actuator("load_in", "L_in", Range::interval(0, 1), 0.5);
  actuator("load_out", "L_out", Range::interval(0, 1), 0.5);
  sensor("current_in", "C̃_in", adc);
  sensor("current_out", "C̃_out", adc);
  sensor("rpm_in", "ω̃_in", Range::interval(0, kInf));
  sensor("rpm_out", "ω̃_out", Range::interval(0, kInf));
  param("res_in", "T_in", Range::set({0, 1}), 1);
  param("res_out", "T_out", Range::set({0, 1}), 1);
  sensor("pressure_upwind", "P̃_up", Range::interval(0, kInf));
  sensor("pressure_downwind", "P̃_dw", Range::interval(0, kInf));
  sensor("pressure_ambient", "P̃_amb", Range::interval(0, kInf));
  sensor("pressure_intake", "P̃_int", Range::interval(0, kInf));
  actuator("pot_1", "A_1", Range::grid(0, 255, 1), 128);
  actuator("pot_2", "A_2", Range::grid(0, 255, 1), 128);
  sensor("signal_1", "S̃_1", adc);
  sensor("signal_2", "S̃_2", adc);
  actuator("hatch", "H", Range::grid(0, 45, 0.1), 0);
  sensor("mic", "M̃", adc);
  param("v_in", "R_in", Range::set(kVrefSettings), 5);
  param("v_out", "R_out", Range::set(kVrefSettings), 5);
  param("v_1", "R_1", Range::set(kVrefSettings), 5);
  param("v_2", "R_2", Range::set(kVrefSettings), 5);
  param("v_mic", "R_M", Range::set(kVrefSettings), 5);
  param("osr_in", "O_in", Range::set(kOsr), 1);
  param("osr_out", "O_out", Range::set(kOsr), 1);
  param("osr_1", "O_1", Range::set(kOsr), 1);
  param("osr_2", "O_2", Range::set(kOsr), 1);
  param("osr_mic", "O_M", Range::set(kOsr), 1);
  param("osr_upwind", "O_up", Range::set(kOsr), 1);
  param("osr_downwind", "O_dw", Range::set(kOsr), 1);
  param("osr_ambient", "O_amb", Range::set(kOsr), 1);
  param("osr_intake", "O_int", Range::set(kOsr), 1);

  for (auto& v : vs) {
    if (v.id == "pressure_downwind") {
      v.contrast_lo = kAmbient - 20.0;
      v.contrast_hi = kAmbient + 20.0;
    }
    // A fan at load 0 stops and its tachometer holds the last reading, so the
    // low contrast is the minimum effective load. Unequal baselines keep the
    // two fans from cancelling in the downwind pressure.
    if (v.id == "load_in" || v.id == "load_out") v.contrast_lo = 0.1;
    if (v.id == "load_in") v.baseline = 0.8;
    if (v.id == "load_out") v.baseline = 0.3;
  }
  return vs;
}

std::vector<ChamberVariable> build_light() {
  const Chamber L = Chamber::light_tunnel;
  const Range adc = Range::interval(0, 1023);
  const Range counts = Range::grid(0, 65535, 1);
  std::vector<ChamberVariable> vs;
  auto add = [&](std::string id, std::string sym, Kind kind, Range r, double def,
                 ColumnType type = ColumnType::real) {
    vs.push_back(make(L, std::move(id), std::move(sym), kind, std::move(r), type, def));
  };
  const Range byte = Range::grid(0, 255, 1);

  add("red", "R", Kind::actuator, byte, 128);
  add("green", "G", Kind::actuator, byte, 128);
  add("blue", "B", Kind::actuator, byte, 128);
  add("current", "C̃", Kind::sensor, adc, 0);
  for (int j = 1; j <= 3; ++j)
    add("ir_" + std::to_string(j), "Ĩ_" + std::to_string(j), Kind::sensor, counts, 0,
        ColumnType::integer);
  for (int j = 1; j <= 3; ++j)
    add("vis_" + std::to_string(j), "Ṽ_" + std::to_string(j), Kind::sensor, counts, 0,
        ColumnType::integer);
  for (int j = 1; j <= 3; ++j)
    add("diode_ir_" + std::to_string(j), "D^I_" + std::to_string(j),
        Kind::sensor_parameter, Range::set({0, 1, 2}), 1, ColumnType::integer);
  for (int j = 1; j <= 3; ++j)
    add("diode_vis_" + std::to_string(j), "D^V_" + std::to_string(j),
        Kind::sensor_parameter, Range::set({0, 1}), 1, ColumnType::integer);
  for (int j = 1; j <= 3; ++j)
    add("t_ir_" + std::to_string(j), "T^I_" + std::to_string(j), Kind::sensor_parameter,
        Range::set({0, 1, 2, 3}), 1, ColumnType::integer);
  for (int j = 1; j <= 3; ++j)
    add("t_vis_" + std::to_string(j), "T^V_" + std::to_string(j),
        Kind::sensor_parameter, Range::set({0, 1, 2, 3}), 1, ColumnType::integer);
  for (int i = 1; i <= 3; ++i)
    for (int k = 1; k <= 2; ++k) {
      std::string ik = std::to_string(i) + std::to_string(k);
      add("l_" + ik, "L_" + ik, Kind::actuator, byte, 0);
    }
  add("pol_1", "θ_1", Kind::actuator, Range::grid(-180, 180, 0.1), 0);
  add("pol_2", "θ_2", Kind::actuator, Range::grid(-180, 180, 0.1), 0);
  add("angle_1", "θ̃_1", Kind::sensor, adc, 0);
  add("angle_2", "θ̃_2", Kind::sensor, adc, 0);
  add("v_c", "R_C", Kind::sensor_parameter, Range::set(kVrefSettings), 5);
  add("v_angle_1", "R_1", Kind::sensor_parameter, Range::set(kVrefSettings), 5);
  add("v_angle_2", "R_2", Kind::sensor_parameter, Range::set(kVrefSettings), 5);
  add("osr_c", "O_C", Kind::sensor_parameter, Range::set(kOsr), 1);
  add("osr_angle_1", "O_1", Kind::sensor_parameter, Range::set(kOsr), 1);
  add("osr_angle_2", "O_2", Kind::sensor_parameter, Range::set(kOsr), 1);

  add("im", "Ĩm", Kind::sensor, Range::interval(0, 255), 0, ColumnType::path);
  add("aperture", "Ap", Kind::sensor_parameter,
      Range::set({1.8, 2.0, 2.2, 2.5, 2.8, 3.2, 3.5, 4.0, 4.5, 5.0, 5.6, 6.3,
                  6.4, 7.1, 8.0, 9.0, 10, 11, 13, 14, 16, 18, 20, 22}),
      8.0);
  add("iso", "ISO", Kind::sensor_parameter,
      Range::set({100, 125, 160, 200, 250, 320, 400, 500, 640, 800,
                  1000, 1250, 1600, 2000, 2500, 3200, 4000, 5000, 6400, 8000,
                  10000, 12800, 16000, 20000, 25600, 32000, 40000, 51200}),
      400, ColumnType::integer);
  add("shutter_speed", "T_Im", Kind::sensor_parameter,
      Range::set({1.0 / 200, 1.0 / 250, 1.0 / 320, 1.0 / 400, 1.0 / 500, 1.0 / 640,
                  1.0 / 800, 1.0 / 1000, 1.0 / 1250, 1.0 / 1600, 1.0 / 2000,
                  1.0 / 2500, 1.0 / 3200, 1.0 / 4000}),
      1.0 / 200);
  for (auto& v : vs) {
    if (v.id == "pol_1" || v.id == "pol_2") {
      v.contrast_lo = 0;
      v.contrast_hi = 90;
    }
    if (v.id == "im" || v.id == "aperture" || v.id == "iso" || v.id == "shutter_speed")
      v.camera_only = true;
  }
  return vs;
}

}  // namespace

const std::vector<ChamberVariable>& chamber_variables(Chamber c) {
  static const std::vector<ChamberVariable> wind = build_wind();
  static const std::vector<ChamberVariable> light = build_light();
  return c == Chamber::light_tunnel ? light : wind;
}

std::vector<const ChamberVariable*> config_variables(Config c) {
  std::vector<const ChamberVariable*> out;
  for (const auto& v : chamber_variables(chamber_of(c))) {
    if (v.camera_only && c != Config::lt_camera) continue;
    out.push_back(&v);
  }
  return out;
}

const ChamberVariable* find_variable(Config c, std::string_view id) {
  for (const auto& v : chamber_variables(chamber_of(c))) {
    if (v.id != id) continue;
    if (v.camera_only && c != Config::lt_camera) return nullptr;
    return &v;
  }
  return nullptr;
}

const std::vector<std::string>& pid_columns() {
  static const std::vector<std::string> cols{
      "pid_target", "pid_kp",   "pid_ki",        "pid_kd",
      "pid_output", "pid_error", "pid_error_sum", "pid_error_diff"};
  return cols;
}

std::vector<std::string> dataset_columns(Config c) {
  std::vector<std::string> cols;
  for (const auto* v : config_variables(c)) cols.push_back(v->id);
  if (c == Config::wt_pressure_control)
    for (const auto& p : pid_columns()) cols.push_back(p);
  return cols;
}

}  // namespace chambersim
