#include "engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "error.hpp"
#include "numfmt.hpp"
#include "rng.hpp"
#include "sensors.hpp"

namespace chambersim {

Fidelity parse_fidelity(std::string_view name) {
  if (name == "steady_state") return Fidelity::steady_state;
  if (name == "dynamic") return Fidelity::dynamic;
  throw NotFoundError("unknown fidelity '" + std::string(name) +
                      "' (expected steady_state or dynamic)");
}

std::string_view to_string(Fidelity f) {
  return f == Fidelity::steady_state ? "steady_state" : "dynamic";
}

PidOutput pid_step(PidState& s, const EngineParams& p, double target, double measured) {
  PidOutput o;
  o.error = target - measured;
  s.error_sum = std::clamp(s.error_sum + o.error, -p.pid_integral_limit, p.pid_integral_limit);
  o.error_sum = s.error_sum;
  o.error_diff = o.error - s.prev_error;
  s.prev_error = o.error;
  o.u = p.pid_kp * o.error + p.pid_ki * o.error_sum + p.pid_kd * o.error_diff;
  o.load_in = o.u > 0 ? std::min(1.0, o.u) : 0.0;
  o.load_out = o.u < 0 ? std::min(1.0, -o.u) : 0.0;
  return o;
}

struct Engine::Idx {
  // wind tunnel
  int load_in = -1, load_out = -1, current_in = -1, current_out = -1, rpm_in = -1,
      rpm_out = -1, res_in = -1, res_out = -1, p_up = -1, p_dw = -1, p_amb = -1,
      p_int = -1, pot_1 = -1, pot_2 = -1, signal_1 = -1, signal_2 = -1, hatch = -1,
      mic = -1, v_in = -1, v_out = -1, v_1 = -1, v_2 = -1, v_mic = -1, osr_in = -1,
      osr_out = -1, osr_1 = -1, osr_2 = -1, osr_mic = -1, osr_up = -1, osr_dw = -1,
      osr_amb = -1, osr_int = -1;
  // light tunnel
  int rgb[3] = {-1, -1, -1};
  int current = -1;
  int ir[3] = {-1, -1, -1}, vis[3] = {-1, -1, -1};
  int diode_ir[3] = {-1, -1, -1}, diode_vis[3] = {-1, -1, -1};
  int t_ir[3] = {-1, -1, -1}, t_vis[3] = {-1, -1, -1};
  int led[3][2] = {{-1, -1}, {-1, -1}, {-1, -1}};
  int pol[2] = {-1, -1}, angle[2] = {-1, -1}, v_angle[2] = {-1, -1},
      osr_angle[2] = {-1, -1};
  int v_c = -1, osr_c = -1, im = -1, aperture = -1, iso = -1, shutter = -1;
};

namespace {

int find_index(const std::vector<ChamberVariable>& cat, std::string_view id) {
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].id == id) return static_cast<int>(i);
  return -1;
}

}  // namespace

Engine::Engine(Config config, Params params, Fidelity fidelity, std::uint64_t seed)
    : config_(config),
      chamber_(chamber_of(config)),
      params_(std::move(params)),
      fidelity_(fidelity),
      seed_(seed),
      columns_(dataset_columns(config)),
      catalog_(&chamber_variables(chamber_)) {
  params_.sync();
  params_.validate();
  const auto& cat = *catalog_;
  for (const auto* v : config_variables(config))
    column_index_.push_back(find_index(cat, v->id));
  state_.resize(cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) state_[i] = cat[i].default_value;
  overridden_.assign(cat.size(), false);
  frozen_.assign(cat.size(), false);
  pid_target_ = params_.engine.pid_target;

  auto idx = std::make_shared<Idx>();
  auto f = [&](const char* id) { return find_index(cat, id); };
  if (chamber_ == Chamber::wind_tunnel) {
    idx->load_in = f("load_in");
    idx->load_out = f("load_out");
    idx->current_in = f("current_in");
    idx->current_out = f("current_out");
    idx->rpm_in = f("rpm_in");
    idx->rpm_out = f("rpm_out");
    idx->res_in = f("res_in");
    idx->res_out = f("res_out");
    idx->p_up = f("pressure_upwind");
    idx->p_dw = f("pressure_downwind");
    idx->p_amb = f("pressure_ambient");
    idx->p_int = f("pressure_intake");
    idx->pot_1 = f("pot_1");
    idx->pot_2 = f("pot_2");
    idx->signal_1 = f("signal_1");
    idx->signal_2 = f("signal_2");
    idx->hatch = f("hatch");
    idx->mic = f("mic");
    idx->v_in = f("v_in");
    idx->v_out = f("v_out");
    idx->v_1 = f("v_1");
    idx->v_2 = f("v_2");
    idx->v_mic = f("v_mic");
    idx->osr_in = f("osr_in");
    idx->osr_out = f("osr_out");
    idx->osr_1 = f("osr_1");
    idx->osr_2 = f("osr_2");
    idx->osr_mic = f("osr_mic");
    idx->osr_up = f("osr_upwind");
    idx->osr_dw = f("osr_downwind");
    idx->osr_amb = f("osr_ambient");
    idx->osr_int = f("osr_intake");
  } else {
    const char* rgb[3] = {"red", "green", "blue"};
    for (int c = 0; c < 3; ++c) idx->rgb[c] = f(rgb[c]);
    idx->current = f("current");
    for (int j = 0; j < 3; ++j) {
      const std::string n = std::to_string(j + 1);
      idx->ir[j] = f(("ir_" + n).c_str());
      idx->vis[j] = f(("vis_" + n).c_str());
      idx->diode_ir[j] = f(("diode_ir_" + n).c_str());
      idx->diode_vis[j] = f(("diode_vis_" + n).c_str());
      idx->t_ir[j] = f(("t_ir_" + n).c_str());
      idx->t_vis[j] = f(("t_vis_" + n).c_str());
      for (int k = 0; k < 2; ++k) idx->led[j][k] = f(("l_" + n + std::to_string(k + 1)).c_str());
    }
    for (int j = 0; j < 2; ++j) {
      const std::string n = std::to_string(j + 1);
      idx->pol[j] = f(("pol_" + n).c_str());
      idx->angle[j] = f(("angle_" + n).c_str());
      idx->v_angle[j] = f(("v_angle_" + n).c_str());
      idx->osr_angle[j] = f(("osr_angle_" + n).c_str());
    }
    idx->v_c = f("v_c");
    idx->osr_c = f("osr_c");
    idx->im = f("im");
    idx->aperture = f("aperture");
    idx->iso = f("iso");
    idx->shutter = f("shutter_speed");
  }
  idx_ = idx;

  if (chamber_ == Chamber::wind_tunnel) {
    // The chamber starts at rest in equilibrium with its default loads.
    omega_in_ = steady_speed(state_[idx_->load_in]);
    omega_out_ = steady_speed(state_[idx_->load_out]);
  }
}

int Engine::index_of(std::string_view id) const {
  const ChamberVariable* v = find_variable(config_, id);
  if (!v)
    throw NotFoundError("unknown variable '" + std::string(id) + "' for " +
                        std::string(to_string(config_)));
  return find_index(*catalog_, id);
}

double Engine::value(std::string_view id) const { return state_[index_of(id)]; }

double Engine::steady_speed(double L) const {
  if (fidelity_ == Fidelity::steady_state) return model_A1_speed(L, params_.fan);
  const double tau = fan_torque(L, params_.fan);
  return std::sqrt(tau / params_.fan.drag_K);
}

void Engine::intervene(const std::vector<Assignment>& assignments) {
  // Validate everything first so a bad assignment leaves the state untouched.
  for (const auto& [id, v] : assignments) {
    const int i = index_of(id);
    const auto& var = (*catalog_)[i];
    if (var.settable()) {
      check_assignment(config_, id, v);
    } else if (var.column_type == ColumnType::path || !std::isfinite(v)) {
      throw RangeError("cannot override sensor " + var.id + " with " + format_number(v));
    }
  }
  for (const auto& [id, v] : assignments) {
    const int i = index_of(id);
    state_[i] = v;
    if (!(*catalog_)[i].settable()) overridden_[i] = true;
    if (config_ == Config::wt_pressure_control && (i == idx_->load_in || i == idx_->load_out))
      frozen_[i] = true;
  }
  if (!assignments.empty()) pending_intervention_ = true;
}

void Engine::release(std::string_view id) {
  const int i = index_of(id);
  overridden_[i] = false;
  frozen_[i] = false;
}

void Engine::integrate(double dt) {
  if (dt <= 0) return;
  if (chamber_ == Chamber::wind_tunnel && fidelity_ == Fidelity::dynamic) {
    omega_in_ = model_A2_integrate(omega_in_, state_[idx_->load_in], dt, params_.engine.dt,
                                   params_.fan);
    omega_out_ = model_A2_integrate(omega_out_, state_[idx_->load_out], dt,
                                    params_.engine.dt, params_.fan);
  }
  if (params_.engine.drift_sigma > 0) {
    Stream s(seed_, "ambient_drift", drift_steps_++);
    drift_ += s.normal(0.0, params_.engine.drift_sigma * std::sqrt(dt));
  }
}

void Engine::wait(double seconds) {
  if (!(seconds >= 0)) throw RangeError("wait duration must be nonnegative");
  advance_to(clock_ + seconds);
}

void Engine::advance_to(double t) {
  if (!(t >= clock_)) throw RangeError("virtual clock cannot run backwards");
  integrate(t - clock_);
  clock_ = t;
}

MeasurementRow Engine::measure() {
  MeasurementRow row;
  row.timestamp = clock_;
  row.intervention = pending_intervention_ ? 1 : 0;
  pending_intervention_ = false;
  std::vector<double> cur = state_;
  if (chamber_ == Chamber::wind_tunnel)
    compute_wind(cur, row);
  else
    compute_light(cur, row);
  for (std::size_t c = 0; c < column_index_.size(); ++c) {
    const double v = cur[column_index_[c]];
    if (!std::isfinite(v))
      throw NumericError("non-finite value in column " + columns_[c] + " at t=" +
                         format_number(clock_));
  }
  row.values.reserve(columns_.size());
  for (int i : column_index_) row.values.push_back(cur[i]);
  if (config_ == Config::wt_pressure_control) {
    // compute_wind left the controller bookkeeping at the tail of `cur`.
    row.values.insert(row.values.end(), cur.end() - 8, cur.end());
  }
  ++row_index_;
  return row;
}

void Engine::compute_wind(std::vector<double>& cur, MeasurementRow&) {
  const Idx& x = *idx_;
  const Params& p = params_;
  const SensorParams& sp = p.sensor;
  const double ns = sp.noise_scale;
  const std::uint64_t r = row_index_;
  auto stream = [&](const char* id) { return Stream(seed_, id, r); };
  auto osr = [&](int i) { return static_cast<int>(state_[i]); };
  auto adc = [&](int vref_i, int osr_i) {
    return AnalogSensorConfig::make(chamber_, state_[vref_i], osr(osr_i), sp.adc_noise * ns,
                                    sp.adc_first_reading_lsb);
  };

  const double L_in = state_[x.load_in];
  const double L_out = state_[x.load_out];
  const double H = state_[x.hatch];
  const double h = H / 45.0;
  const double wmax = p.fan.omega_max;

  double w_in = fidelity_ == Fidelity::steady_state ? model_A1_speed(L_in, p.fan) : omega_in_;
  double w_out = fidelity_ == Fidelity::steady_state ? model_A1_speed(L_out, p.fan) : omega_out_;
  if (fidelity_ == Fidelity::steady_state) {
    omega_in_ = w_in;
    omega_out_ = w_out;
  }
  // Shared airflow couples the fans; the open hatch weakens the coupling.
  const double g = 1.0 - p.engine.coupling_hatch * h;
  const double e_in = std::min(wmax, w_in * (1.0 + p.engine.coupling_in * g * w_out / wmax));
  const double e_out = std::min(wmax, w_out * (1.0 + p.engine.coupling_out * g * w_in / wmax));
  const double a_in = e_in / wmax;
  const double a_out = e_out / wmax;

  // Fan currents; both fans hang off one supply.
  const double c_in = model_B1_current(L_in, p.fan);
  const double c_out = model_B1_current(L_out, p.fan);
  const double sag = 0.1;
  {
    Stream s = stream("current_in");
    cur[x.current_in] = analog_measure(
        current_voltage(c_in - sag * (c_out - p.fan.C_min)), adc(x.v_in, x.osr_in), s);
  }
  {
    Stream s = stream("current_out");
    cur[x.current_out] = analog_measure(
        current_voltage(c_out - sag * (c_in - p.fan.C_min)), adc(x.v_out, x.osr_out), s);
  }

  // Tachometers hold the last value while a fan gets no PWM signal.
  if (L_in > 0 && e_in > 0) {
    Stream s = stream("rpm_in");
    last_rpm_in_ = tachometer_rpm(e_in, osr(x.res_in), sp.tach_jitter * ns, s);
  }
  if (L_out > 0 && e_out > 0) {
    Stream s = stream("rpm_out");
    last_rpm_out_ = tachometer_rpm(e_out, osr(x.res_out), sp.tach_jitter * ns, s);
  }
  cur[x.rpm_in] = last_rpm_in_;
  cur[x.rpm_out] = last_rpm_out_;

  // Barometers
  PressureParams pp = p.pressure;
  pp.P_amb += drift_;
  const double p_dw = model_C3_pressure(e_in, e_out, H, pp);
  const double p_up = p_dw + model_D1_pressure_diff(e_in, p.bernoulli);
  const double p_int =
      pp.P_amb - sp.intake_coeff * (a_in * a_in + 0.5 * a_out * a_out) * (1.0 - 0.5 * h);
  auto baro = [&](int out, int osr_i, const char* id, double truth) {
    Stream s = stream(id);
    cur[out] = barometer_measure(truth, osr(osr_i), sp.baro_noise * ns, sp.baro_first_reading, s);
  };
  baro(x.p_up, x.osr_up, "pressure_upwind", p_up);
  baro(x.p_dw, x.osr_dw, "pressure_downwind", p_dw);
  baro(x.p_amb, x.osr_amb, "pressure_ambient", pp.P_amb);
  baro(x.p_int, x.osr_int, "pressure_intake", p_int);

  // Speaker chain
  {
    Stream bits = stream("speaker");
    Stream n1 = stream("signal_1");
    Stream n2 = stream("signal_2");
    auto sig = speaker_signal(state_[x.pot_1], state_[x.pot_2], adc(x.v_1, x.osr_1),
                              adc(x.v_2, x.osr_2), bits, n1, n2);
    cur[x.signal_1] = sig.s1;
    cur[x.signal_2] = sig.s2;
  }

  // Microphone: qualitative level from speaker amplitude and fan noise.
  {
    Stream s = stream("mic");
    const double fan = a_in * a_in * a_in * (1.0 - 0.4 * h) + a_out * a_out * a_out * (1.0 + 0.8 * h);
    const double level = sp.mic_baseline + sp.mic_speaker * state_[x.pot_1] / 255.0 + sp.mic_fan * fan;
    // Acoustic noise is independent across the oversampled readings.
    std::array<double, kAdcReadings> v;
    for (double& r : v) r = std::max(0.0, level + s.normal(0.0, sp.mic_noise * ns));
    cur[x.mic] = analog_measure_readings(v, adc(x.v_mic, x.osr_mic), s);
  }

  // Interventions on sensors replace the measurement.
  for (std::size_t i = 0; i < cur.size(); ++i)
    if (overridden_[i]) cur[i] = state_[i];

  if (config_ == Config::wt_pressure_control) {
    const double measured = cur[x.p_dw];
    if (!pid_target_) pid_target_ = measured;
    PidOutput o = pid_step(pid_, p.engine, *pid_target_, measured);
    if (!frozen_[x.load_in]) state_[x.load_in] = o.load_in;
    if (!frozen_[x.load_out]) state_[x.load_out] = o.load_out;
    cur[x.load_in] = state_[x.load_in];
    cur[x.load_out] = state_[x.load_out];
    cur.insert(cur.end(), {*pid_target_, p.engine.pid_kp, p.engine.pid_ki, p.engine.pid_kd, o.u,
                           o.error, o.error_sum, o.error_diff});
  }
}

void Engine::compute_light(std::vector<double>& cur, MeasurementRow& row) {
  const Idx& x = *idx_;
  const Params& p = params_;
  const SensorParams& sp = p.sensor;
  const double ns = sp.noise_scale;
  const std::uint64_t r = row_index_;
  auto stream = [&](const std::string& id) { return Stream(seed_, id, r); };
  auto iv = [&](int i) { return static_cast<int>(state_[i]); };

  const Vec3 rgb{state_[x.rgb[0]], state_[x.rgb[1]], state_[x.rgb[2]]};
  const double th1 = state_[x.pol[0]];
  const double th2 = state_[x.pol[1]];
  const double m = malus_factor(th1, th2);

  {
    double amps = sp.source_idle_current;
    for (int c = 0; c < 3; ++c) amps += sp.source_channel_current[c] * rgb[c] / 255.0;
    Stream s = stream("current");
    auto cfg = AnalogSensorConfig::make(chamber_, state_[x.v_c], iv(x.osr_c), sp.adc_noise * ns,
                                        sp.adc_first_reading_lsb);
    cur[x.current] = analog_measure(current_voltage(amps), cfg, s);
  }

  const LightSensorConfig noise{1.0, sp.light_sigma0 * ns, sp.light_sigma1 * ns};
  for (int j = 0; j < 3; ++j) {
    Vec3 transmission{1.0, 1.0, 1.0};
    if (j == 1) transmission = sp.single_polarizer;
    if (j == 2)
      for (int c = 0; c < 3; ++c)
        transmission[c] = (p.image.Tp[c] - p.image.Tc[c]) * m + p.image.Tc[c];
    double led = 0.0;
    for (int k = 0; k < 2; ++k)
      led += sp.led_a * (std::exp(sp.led_b * state_[x.led[j][k]] / 255.0) - 1.0);

    double ir = led, vis = sp.led_vis_factor * led;
    for (int c = 0; c < 3; ++c) {
      ir += sp.ir_sensitivity[c] * rgb[c] / 255.0 * transmission[c];
      vis += sp.vis_sensitivity[c] * rgb[c] / 255.0 * transmission[c];
    }
    const std::string n = std::to_string(j + 1);
    LightSensorConfig c_ir = noise;
    c_ir.gain = sp.ir_diode_gain[iv(x.diode_ir[j])] * sp.exposure_gain[iv(x.t_ir[j])];
    LightSensorConfig c_vis = noise;
    c_vis.gain = sp.vis_diode_gain[iv(x.diode_vis[j])] * sp.exposure_gain[iv(x.t_vis[j])];
    Stream s_ir = stream("ir_" + n);
    Stream s_vis = stream("vis_" + n);
    cur[x.ir[j]] = static_cast<double>(light_measure(ir, c_ir, s_ir));
    cur[x.vis[j]] = static_cast<double>(light_measure(vis, c_vis, s_vis));
  }

  const double zero[2] = {kAngleZero1, kAngleZero2};
  for (int j = 0; j < 2; ++j) {
    Stream s = stream("angle_" + std::to_string(j + 1));
    auto cfg = AnalogSensorConfig::make(chamber_, state_[x.v_angle[j]], iv(x.osr_angle[j]),
                                        sp.adc_noise * ns, sp.adc_first_reading_lsb);
    cur[x.angle[j]] = analog_measure(angle_voltage(state_[x.pol[j]], zero[j]), cfg, s);
  }

  if (config_ == Config::lt_camera) {
    ImageModelParams ip = p.image;
    const double ap = state_[x.aperture];
    ip.exposure = sp.camera_gain * state_[x.iso] * state_[x.shutter] / (ap * ap);
    const Vec3 color = model_F_color(rgb[0], rgb[1], rgb[2], th1, th2, ColorModel::F3, ip);
    const int size = sp.image_size;
    if (hex_pixels_ < 0) {
      Raster white = render_hexagon({1.0, 1.0, 1.0}, size);
      hex_pixels_ = std::count(white.rgb.begin(), white.rgb.end(), 255) / 3;
    }
    double sum = 0;
    for (int c = 0; c < 3; ++c) sum += quantize_channel(color[c]);
    cur[x.im] = static_cast<double>(hex_pixels_) * sum / (3.0 * size * size);
    if (render_images_) row.image = render_hexagon(color, size);
  }

  for (std::size_t i = 0; i < cur.size(); ++i)
    if (overridden_[i]) cur[i] = state_[i];
}

ProtocolRun::ProtocolRun(Protocol protocol, Params params, Fidelity fidelity,
                         std::optional<std::uint64_t> seed_override)
    : protocol_(std::move(protocol)),
      engine_(protocol_.config, std::move(params), fidelity,
              seed_override ? *seed_override : protocol_.seed().value_or(0)) {}

bool ProtocolRun::next(MeasurementRow& row) {
  while (pc_ < protocol_.instructions.size()) {
    const Instruction& ins = protocol_.instructions[pc_];
    if (const auto* m = std::get_if<MsrInstr>(&ins)) {
      if (msr_done_ == 0) msr_t0_ = engine_.clock();
      row = engine_.measure();
      ++msr_done_;
      // Exact spacing: t0 + k/hz, no accumulated rounding.
      engine_.advance_to(msr_t0_ + static_cast<double>(msr_done_) / m->hz);
      if (msr_done_ == m->count) {
        msr_done_ = 0;
        ++pc_;
      }
      return true;
    }
    if (const auto* s = std::get_if<SetInstr>(&ins)) {
      engine_.intervene({{s->variable, s->value}});
    } else if (const auto* w = std::get_if<WaitInstr>(&ins)) {
      engine_.wait(w->ms / 1000.0);
    }
    ++pc_;
  }
  return false;
}

std::vector<MeasurementRow> run_protocol(const Protocol& protocol, const Params& params,
                                         Fidelity fidelity,
                                         std::optional<std::uint64_t> seed_override) {
  ProtocolRun run(protocol, params, fidelity, seed_override);
  std::vector<MeasurementRow> rows;
  MeasurementRow row;
  while (run.next(row)) rows.push_back(std::move(row));
  return rows;
}

}  // namespace chambersim
