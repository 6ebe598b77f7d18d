#include "model_eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "error.hpp"
#include "numfmt.hpp"
#include "sensors.hpp"

namespace chambersim {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::map<ModelId, std::string> kNames{
    {ModelId::A1, "A1"}, {ModelId::A2, "A2"}, {ModelId::B1, "B1"}, {ModelId::C1, "C1"},
    {ModelId::C2, "C2"}, {ModelId::C3, "C3"}, {ModelId::D1, "D1"}, {ModelId::E1, "E1"},
    {ModelId::F1, "F1"}, {ModelId::F2, "F2"}, {ModelId::F3, "F3"}};

double tidy(double v) {
  // Grid points like 0.1 * 3 print as 0.3, not 0.30000000000000004.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return *parse_number(buf);
}

}  // namespace

ModelId parse_model(std::string_view name) {
  for (const auto& [id, n] : kNames)
    if (n == name) return id;
  throw NotFoundError("unknown model '" + std::string(name) +
                      "' (expected A1, A2, B1, C1, C2, C3, D1, E1, F1, F2 or F3)");
}

std::string_view to_string(ModelId m) { return kNames.at(m); }

const ModelSignature& model_signature(ModelId m) {
  static const double wmax = 314.16;
  static const std::map<ModelId, ModelSignature> sigs{
      {ModelId::A1, {{"L"}, {1.0}, {"omega"}}},
      {ModelId::B1, {{"L"}, {1.0}, {"current"}}},
      {ModelId::A2, {{"L", "t", "omega0"}, {1.0, 5.0, 0.0}, {"omega"}}},
      {ModelId::C1, {{"omega_in", "omega_out"}, {wmax, 0.0}, {"pressure"}}},
      {ModelId::C2, {{"omega", "r"}, {wmax, 0.7}, {"pressure"}}},
      {ModelId::C3, {{"omega_in", "omega_out", "H"}, {wmax, 0.0, 0.0}, {"pressure"}}},
      {ModelId::D1, {{"omega_in"}, {wmax}, {"pressure_diff"}}},
      {ModelId::E1, {{"theta1", "theta2"}, {0.0, 0.0}, {"intensity"}}},
      {ModelId::F1,
       {{"R", "G", "B", "theta1", "theta2"}, {255, 255, 255, 0, 0}, {"r", "g", "b"}}},
      {ModelId::F2,
       {{"R", "G", "B", "theta1", "theta2"}, {255, 255, 255, 0, 0}, {"r", "g", "b"}}},
      {ModelId::F3,
       {{"R", "G", "B", "theta1", "theta2"}, {255, 255, 255, 0, 0}, {"r", "g", "b"}}},
  };
  return sigs.at(m);
}

GridAxis parse_grid_axis(std::string_view spec) {
  auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw RangeError("grid axis must look like var=start:stop:step");
  GridAxis ax;
  ax.var = std::string(trim(spec.substr(0, eq)));
  std::string_view rhs = trim(spec.substr(eq + 1));
  auto bad = [&] { return RangeError("malformed grid axis '" + std::string(spec) + "'"); };
  if (rhs.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      auto c = rhs.find(':', start);
      auto v = parse_number(rhs.substr(start, c == std::string_view::npos ? c : c - start));
      if (!v) throw bad();
      parts.push_back(*v);
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw bad();
    const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) ax.values.push_back(tidy(parts[0] + k * parts[2]));
  } else {
    std::size_t start = 0;
    while (true) {
      auto c = rhs.find(',', start);
      auto v = parse_number(rhs.substr(start, c == std::string_view::npos ? c : c - start));
      if (!v) throw bad();
      ax.values.push_back(*v);
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
  }
  return ax;
}

std::vector<double> evaluate_model(ModelId m, const std::vector<double>& in, const Params& p) {
  switch (m) {
    case ModelId::A1:
      return {model_A1_speed(in[0], p.fan)};
    case ModelId::B1:
      return {model_B1_current(in[0], p.fan)};
    case ModelId::A2:
      return {model_A2_integrate(in[2], in[0], in[1], p.engine.dt, p.fan)};
    case ModelId::C1:
      return {model_C1_pressure(in[0], in[1], p.pressure)};
    case ModelId::C2:
      return {model_C2_static_pressure(in[0], in[1], p.pressure)};
    case ModelId::C3:
      return {model_C3_pressure(in[0], in[1], in[2], p.pressure)};
    case ModelId::D1:
      return {model_D1_pressure_diff(in[0], p.bernoulli)};
    case ModelId::E1: {
      MalusParams mp;
      return {model_E1_intensity(in[0], in[1], mp)};
    }
    case ModelId::F1:
    case ModelId::F2:
    case ModelId::F3: {
      const ColorModel cm =
          m == ModelId::F1 ? ColorModel::F1 : (m == ModelId::F2 ? ColorModel::F2 : ColorModel::F3);
      const Vec3 c = model_F_color(in[0], in[1], in[2], in[3], in[4], cm, p.image);
      return {c[0], c[1], c[2]};
    }
  }
  return {};
}

ModelTable tabulate_model(ModelId m, const std::vector<GridAxis>& grid, const Params& p) {
  const auto& sig = model_signature(m);
  std::vector<double> point = sig.defaults;
  std::vector<std::size_t> slot;
  for (const auto& ax : grid) {
    std::size_t k = 0;
    while (k < sig.inputs.size() && sig.inputs[k] != ax.var) ++k;
    if (k == sig.inputs.size()) {
      std::string names;
      for (const auto& i : sig.inputs) names += (names.empty() ? "" : ", ") + i;
      throw NotFoundError("model " + std::string(to_string(m)) + " has no input '" + ax.var +
                          "' (inputs: " + names + ")");
    }
    if (ax.values.empty()) throw RangeError("empty grid axis " + ax.var);
    slot.push_back(k);
  }
  ModelTable t;
  t.header = sig.inputs;
  t.header.insert(t.header.end(), sig.outputs.begin(), sig.outputs.end());

  std::vector<std::size_t> pos(grid.size(), 0);
  while (true) {
    for (std::size_t a = 0; a < grid.size(); ++a) point[slot[a]] = grid[a].values[pos[a]];
    std::vector<double> row = point;
    for (double v : evaluate_model(m, point, p)) row.push_back(v);
    t.rows.push_back(std::move(row));
    // Odometer increment, last axis fastest.
    std::size_t a = grid.size();
    while (a > 0) {
      --a;
      if (++pos[a] < grid[a].values.size()) break;
      pos[a] = 0;
      if (a == 0) return t;
    }
    if (grid.empty()) return t;
  }
}

std::string ModelTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      append_number(out, r[i]);
    }
    out += '\n';
  }
  return out;
}

std::pair<double, double> r2_rmse(const std::vector<double>& obs, const std::vector<double>& pred) {
  if (obs.size() != pred.size() || obs.empty()) throw RangeError("need matching nonempty series");
  double mean = 0;
  for (double y : obs) mean += y;
  mean /= obs.size();
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    ss_tot += (obs[i] - mean) * (obs[i] - mean);
  }
  const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
  return {r2, std::sqrt(ss_res / obs.size())};
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw RangeError("line fit needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double b1 = sxx > 0 ? sxy / sxx : 0.0;
  return {my - b1 * mx, b1};
}

ModelFit compare_model(ModelId m, const Table& data, const Params& p, std::string_view target) {
  ModelFit fit;
  fit.n = data.rows;
  if (data.rows == 0) throw RangeError("dataset has no rows");
  std::vector<double> obs, pred;
  auto col = [&](std::string_view name) -> const std::vector<double>& {
    const Column& c = data.at(name);
    if (c.numbers.size() != data.rows) throw RangeError("column " + c.name + " is not numeric");
    return c.numbers;
  };
  const double to_rpm = 60.0 / (2.0 * kPi);

  switch (m) {
    case ModelId::E1: {
      fit.target = target.empty() ? "ir_3" : std::string(target);
      const auto& t1 = col("pol_1");
      const auto& t2 = col("pol_2");
      obs = col(fit.target);
      std::vector<double> x(data.rows);
      for (std::size_t i = 0; i < data.rows; ++i) x[i] = malus_factor(t1[i], t2[i]);
      auto [b0, b1] = fit_line(x, obs);
      fit.fitted = {{"beta0", b0}, {"beta1", b1}};
      for (double xi : x) pred.push_back(b1 * xi + b0);
      break;
    }
    case ModelId::A1: {
      fit.target = target.empty() ? "rpm_in" : std::string(target);
      const auto& L = col(fit.target == "rpm_out" ? "load_out" : "load_in");
      obs = col(fit.target);
      for (double l : L) pred.push_back(model_A1_speed(l, p.fan) * to_rpm);
      break;
    }
    case ModelId::B1: {
      fit.target = target.empty() ? "current_in" : std::string(target);
      const bool out = fit.target == "current_out";
      const auto& L = col(out ? "load_out" : "load_in");
      const auto& counts = col(fit.target);
      const auto& vref = col(out ? "v_out" : "v_in");
      for (std::size_t i = 0; i < data.rows; ++i) {
        obs.push_back(calibrate_current(counts[i], vref_actual(Chamber::wind_tunnel, vref[i])));
        pred.push_back(model_B1_current(L[i], p.fan));
      }
      break;
    }
    case ModelId::C1:
    case ModelId::C3: {
      fit.target = "pressure_downwind";
      const auto& Li = col("load_in");
      const auto& Lo = col("load_out");
      const auto& amb = col("pressure_ambient");
      const auto& H = col("hatch");
      obs = col("pressure_downwind");
      for (std::size_t i = 0; i < data.rows; ++i) {
        PressureParams pp = p.pressure;
        pp.P_amb = amb[i];
        const double wi = model_A1_speed(Li[i], p.fan);
        const double wo = model_A1_speed(Lo[i], p.fan);
        pred.push_back(m == ModelId::C1 ? model_C1_pressure(wi, wo, pp)
                                        : model_C3_pressure(wi, wo, H[i], pp));
      }
      break;
    }
    case ModelId::D1: {
      fit.target = "pressure_upwind-pressure_downwind";
      const auto& rpm = col("rpm_in");
      const auto& up = col("pressure_upwind");
      const auto& dw = col("pressure_downwind");
      for (std::size_t i = 0; i < data.rows; ++i) {
        obs.push_back(up[i] - dw[i]);
        pred.push_back(model_D1_pressure_diff(rpm[i] / to_rpm, p.bernoulli));
      }
      break;
    }
    default:
      throw Error(ErrorCode::invalid_argument,
                  "model " + std::string(to_string(m)) + " has no dataset comparison");
  }
  auto [r2, rmse] = r2_rmse(obs, pred);
  fit.r2 = r2;
  fit.rmse = rmse;
  return fit;
}

}  // namespace chambersim
