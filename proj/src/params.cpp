#include "params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace {

struct Field {
  const char* key;
  double* data;
  std::size_t n;
};

template <std::size_t N>
Field vec(const char* key, std::array<double, N>& a) {
  return {key, a.data(), N};
}

Field one(const char* key, double& d) { return {key, &d, 1}; }

std::vector<Field> fields(Params& p) {
  return {
      one("fan.omega_max", p.fan.omega_max),
      one("fan.L_min", p.fan.L_min),
      one("fan.C_max", p.fan.C_max),
      one("fan.C_min", p.fan.C_min),
      one("fan.inertia", p.fan.inertia),
      one("fan.torque_const", p.fan.torque_const),
      one("fan.drag_K", p.fan.drag_K),
      one("pressure.S_max", p.pressure.S_max),
      one("pressure.Q_max", p.pressure.Q_max),
      one("pressure.r0", p.pressure.r0),
      one("pressure.beta", p.pressure.beta),
      one("pressure.P_amb", p.pressure.P_amb),
      one("bernoulli.rho", p.bernoulli.rho),
      one("bernoulli.area", p.bernoulli.area),
      one("bernoulli.delta", p.bernoulli.delta),
      {"image.S", &p.image.S[0][0], 9},
      vec("image.w", p.image.w),
      one("image.exposure", p.image.exposure),
      vec("image.Tp", p.image.Tp),
      vec("image.Tc", p.image.Tc),
      one("sensor.noise_scale", p.sensor.noise_scale),
      one("sensor.adc_noise", p.sensor.adc_noise),
      one("sensor.adc_first_reading_lsb", p.sensor.adc_first_reading_lsb),
      one("sensor.baro_noise", p.sensor.baro_noise),
      one("sensor.baro_first_reading", p.sensor.baro_first_reading),
      one("sensor.intake_coeff", p.sensor.intake_coeff),
      one("sensor.tach_jitter", p.sensor.tach_jitter),
      one("sensor.light_sigma0", p.sensor.light_sigma0),
      one("sensor.light_sigma1", p.sensor.light_sigma1),
      vec("sensor.ir_sensitivity", p.sensor.ir_sensitivity),
      vec("sensor.vis_sensitivity", p.sensor.vis_sensitivity),
      vec("sensor.single_polarizer", p.sensor.single_polarizer),
      vec("sensor.ir_diode_gain", p.sensor.ir_diode_gain),
      vec("sensor.vis_diode_gain", p.sensor.vis_diode_gain),
      vec("sensor.exposure_gain", p.sensor.exposure_gain),
      one("sensor.led_a", p.sensor.led_a),
      one("sensor.led_b", p.sensor.led_b),
      one("sensor.led_vis_factor", p.sensor.led_vis_factor),
      one("sensor.source_idle_current", p.sensor.source_idle_current),
      vec("sensor.source_channel_current", p.sensor.source_channel_current),
      one("sensor.mic_baseline", p.sensor.mic_baseline),
      one("sensor.mic_speaker", p.sensor.mic_speaker),
      one("sensor.mic_fan", p.sensor.mic_fan),
      one("sensor.mic_noise", p.sensor.mic_noise),
      one("sensor.camera_gain", p.sensor.camera_gain),
      one("engine.dt", p.engine.dt),
      one("engine.coupling_in", p.engine.coupling_in),
      one("engine.coupling_out", p.engine.coupling_out),
      one("engine.coupling_hatch", p.engine.coupling_hatch),
      one("engine.drift_sigma", p.engine.drift_sigma),
      one("pid.kp", p.engine.pid_kp),
      one("pid.ki", p.engine.pid_ki),
      one("pid.kd", p.engine.pid_kd),
      one("pid.integral_limit", p.engine.pid_integral_limit),
  };
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(',', start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void Params::sync() {
  pressure.omega_max = fan.omega_max;
  bernoulli.omega_max = fan.omega_max;
  bernoulli.Q_max = pressure.Q_max;
}

void Params::validate() const {
  fan.validate();
  pressure.validate();
  bernoulli.validate();
  image.validate();
  if (!(engine.dt > 0)) throw RangeError("engine.dt must be positive");
  if (sensor.noise_scale < 0) throw RangeError("sensor.noise_scale must be nonnegative");
  if (sensor.image_size < 16) throw RangeError("sensor.image_size must be at least 16");
  if (engine.drift_sigma < 0) throw RangeError("engine.drift_sigma must be nonnegative");
}

MalusParams Params::malus(int channel) const {
  MalusParams m;
  m.I0 = 1.0;
  m.Tp = image.Tp[channel];
  m.Tc = image.Tc[channel];
  return m;
}

Params parse_params(std::string_view text) {
  Params p;
  bool drag_given = false;
  auto table = fields(p);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));

    if (key == "pid.target") {
      if (value == "auto") {
        p.engine.pid_target.reset();
      } else {
        auto v = parse_number(value);
        if (!v) throw ParseError(lineno, "malformed number '" + std::string(value) + "'");
        p.engine.pid_target = *v;
      }
      continue;
    }
    if (key == "sensor.image_size") {
      auto v = parse_integer(value);
      if (!v) throw ParseError(lineno, "malformed integer '" + std::string(value) + "'");
      p.sensor.image_size = static_cast<int>(*v);
      continue;
    }
    if (key == "fan.drag_K" && value == "printed") {
      p.fan.drag_K = FanParams::printed_drag_K;
      drag_given = true;
      continue;
    }

    const Field* f = nullptr;
    for (const auto& cand : table)
      if (key == cand.key) f = &cand;
    if (!f) throw ParseError(lineno, "unknown key '" + std::string(key) + "'");
    auto parts = split_commas(value);
    if (parts.size() != f->n)
      throw ParseError(lineno, std::string(key) + " expects " + std::to_string(f->n) +
                                   " value(s), got " + std::to_string(parts.size()));
    for (std::size_t i = 0; i < f->n; ++i) {
      auto v = parse_number(parts[i]);
      if (!v) throw ParseError(lineno, "malformed number '" + std::string(parts[i]) + "'");
      f->data[i] = *v;
    }
    if (key == "fan.drag_K") drag_given = true;
  }
  if (!drag_given) p.fan.drag_K = p.fan.steady_state_drag();
  p.sync();
  p.validate();
  return p;
}

Params load_params_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parameter file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str());
}

std::string dump_params(const Params& src) {
  Params p = src;
  std::string out;
  for (const auto& f : fields(p)) {
    out += f.key;
    out += " = ";
    for (std::size_t i = 0; i < f.n; ++i) {
      if (i) out += ", ";
      append_number(out, f.data[i]);
    }
    out += '\n';
  }
  out += "sensor.image_size = " + std::to_string(p.sensor.image_size) + "\n";
  out += "pid.target = " +
         (p.engine.pid_target ? format_number(*p.engine.pid_target) : std::string("auto")) +
         "\n";
  return out;
}

}  // namespace chambersim
