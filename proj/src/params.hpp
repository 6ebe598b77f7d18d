#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "models.hpp"

namespace chambersim {

/// Noise and calibration constants of the sensor layer. None of these are
/// published instrument values; they are plausible defaults.
struct SensorParams {
  // Multiplies every noise sigma below; 0 gives a noiseless chamber.
  double noise_scale = 1.0;

  // 10-bit ADC
  double adc_noise = 0.003;              // V per reading
  double adc_first_reading_lsb = -2.0;   // error of reading 0 after a channel switch

  // Barometers
  double baro_noise = 0.8;           // Pa per reading
  double baro_first_reading = -2.5;  // Pa
  double intake_coeff = 3.0;         // Pa at full intake speed

  // Tachometers
  double tach_jitter = 20e-6;  // s on the revolution period

  // Light sensors
  double light_sigma0 = 100.0;
  double light_sigma1 = 0.01;
  Vec3 ir_sensitivity{3000, 1200, 800};  // counts at channel value 255, unit gain
  Vec3 vis_sensitivity{1500, 3000, 2400};
  Vec3 single_polarizer{0.42, 0.45, 0.47};
  std::array<double, 3> ir_diode_gain{1, 2, 4};
  std::array<double, 2> vis_diode_gain{1, 4};
  std::array<double, 4> exposure_gain{1, 2, 4, 8};
  double led_a = 20.0;
  double led_b = 3.0;
  double led_vis_factor = 0.7;

  // Light-source current draw, A
  double source_idle_current = 0.05;
  Vec3 source_channel_current{0.25, 0.2, 0.2};

  // Microphone, V
  double mic_baseline = 0.5;
  double mic_speaker = 0.8;
  double mic_fan = 1.0;
  double mic_noise = 0.02;

  // Camera
  double camera_gain = 128.0;  // e = gain * ISO * T / Ap^2
  int image_size = 100;
};

struct EngineParams {
  double dt = 1e-3;  // RK4 step, s
  // Fan coupling: omega_in *= 1 + k_in * g(H) * omega_out / omega_max
  double coupling_in = 0.05;
  double coupling_out = 0.02;
  double coupling_hatch = 0.6;  // g(H) = 1 - coupling_hatch * H / 45
  double drift_sigma = 0.0;     // Pa / sqrt(s) random walk of the ambient pressure

  double pid_kp = 0.5;
  double pid_ki = 0.1;
  double pid_kd = 1e-3;
  double pid_integral_limit = 10.0;  // |sum e| clamp, Pa
  std::optional<double> pid_target;
};

struct Params {
  FanParams fan = FanParams::defaults();
  PressureParams pressure;
  BernoulliParams bernoulli;
  ImageModelParams image;
  SensorParams sensor;
  EngineParams engine;

  /// Propagate shared constants (omega_max, Q_max) into every sub-struct.
  void sync();
  void validate() const;
  /// Tp/Tc of one color channel as Malus parameters with unit I0.
  MalusParams malus(int channel) const;
};

/// Parse `key = value` lines on top of the defaults. `#` starts a comment.
/// Vector values are comma separated. `fan.drag_K = printed` selects the
/// printed constant; when drag_K is not given it is recomputed from the
/// other fan constants.
Params parse_params(std::string_view text);
Params load_params_file(const std::string& path);
/// Every key with its current value, one per line, parseable by parse_params.
std::string dump_params(const Params& p);

}  // namespace chambersim
