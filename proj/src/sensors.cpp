#include "sensors.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

void check_osr(int osr) {
  if (osr != 1 && osr != 2 && osr != 4 && osr != 8)
    throw RangeError("oversampling rate " + std::to_string(osr) + " not in {1,2,4,8}");
}

void check_counts(double counts) {
  if (!(counts >= 0 && counts <= kAdcFullScale))
    throw RangeError("counts " + format_number(counts) + " outside [0, 1023]");
}

}  // namespace

double vref_actual(Chamber chamber, double setting) {
  const bool wind = chamber == Chamber::wind_tunnel;
  if (setting == 5.0) return 5.0;
  if (setting == 2.56) return wind ? 2.65 : 2.55;
  if (setting == 1.1) return wind ? 1.16 : 1.09;
  throw RangeError("reference voltage " + format_number(setting) + " not in {1.1, 2.56, 5}");
}

AnalogSensorConfig AnalogSensorConfig::make(Chamber chamber, double vref_setting, int osr,
                                            double noise_sigma, double first_reading_lsb) {
  check_osr(osr);
  AnalogSensorConfig c;
  c.vref_setting = vref_setting;
  c.vref_actual = chambersim::vref_actual(chamber, vref_setting);
  c.osr = osr;
  c.noise_sigma = noise_sigma;
  c.first_reading_lsb = first_reading_lsb;
  return c;
}

double analog_measure_readings(const std::array<double, kAdcReadings>& true_voltages,
                               const AnalogSensorConfig& cfg, Stream& rng) {
  check_osr(cfg.osr);
  const double vref = cfg.vref_actual;
  const double lsb = vref / kAdcFullScale;
  double sum = 0.0;
  for (int i = 0; i < kAdcReadings; ++i) {
    // Always draw, so stream consumption does not depend on osr.
    double v = true_voltages[i] + rng.normal(0.0, cfg.noise_sigma);
    if (i == 0) v += cfg.first_reading_lsb * lsb;
    double counts;
    if (true_voltages[i] >= vref) {
      counts = kAdcFullScale;
    } else {
      v = std::clamp(v, 0.0, vref);
      counts = std::min<double>(kAdcFullScale, std::floor(v * kAdcFullScale / vref));
    }
    if (i < cfg.osr) sum += counts;
  }
  return sum / cfg.osr;
}

double analog_measure(double true_voltage, const AnalogSensorConfig& cfg, Stream& rng) {
  if (!(true_voltage >= 0)) throw RangeError("true voltage must be nonnegative");
  std::array<double, kAdcReadings> v;
  v.fill(true_voltage);
  return analog_measure_readings(v, cfg, rng);
}

double calibrate_current(double counts, double vref) {
  check_counts(counts);
  return counts * vref / (1023.0 * 5.0) * 2.5;
}

double calibrate_angle(double counts, double zero_offset, double vref) {
  check_counts(counts);
  return (counts - zero_offset) * (720.0 / 1023.0) * (vref / 5.0);
}

double current_voltage(double amps) { return 2.0 * amps; }

double angle_voltage(double theta_deg, double zero_offset) {
  const double counts = zero_offset + theta_deg * 1023.0 / 720.0;
  return std::max(0.0, counts * 5.0 / 1023.0);
}

std::int64_t light_measure(double true_intensity, const LightSensorConfig& cfg, Stream& rng) {
  if (!(true_intensity >= 0)) throw RangeError("intensity must be nonnegative");
  const double x = cfg.gain * true_intensity;
  const double noisy = x + rng.normal(0.0, cfg.sigma0 + cfg.sigma1 * x);
  const double c = std::clamp(noisy, 0.0, static_cast<double>(kLightCountsMax));
  return static_cast<std::int64_t>(std::floor(c));
}

SpeakerReading speaker_signal(double A1, double A2, const AnalogSensorConfig& cfg1,
                              const AnalogSensorConfig& cfg2, Stream& bits, Stream& n1,
                              Stream& n2) {
  for (double a : {A1, A2})
    if (!(a >= 0 && a <= 255))
      throw RangeError("potentiometer setting " + format_number(a) + " outside 0..255");
  std::array<double, kAdcReadings> v1{}, v2{};
  for (int i = 0; i < kAdcReadings; ++i) {
    const double sample = bits.bernoulli() ? 5.0 : 0.0;
    v1[i] = sample * A1 / 255.0;
    v2[i] = v1[i] * A2 / 255.0;
  }
  return {analog_measure_readings(v1, cfg1, n1), analog_measure_readings(v2, cfg2, n2)};
}

double tachometer_rpm(double omega, int resolution, double jitter_s, Stream& rng) {
  if (!(omega > 0)) throw RangeError("tachometer needs a spinning fan");
  const double ticks_per_s = resolution == 1 ? 1e6 : 1e3;
  const double period = kTwoPi / omega + rng.normal(0.0, jitter_s);
  const double ticks = std::max(1.0, std::round(period * ticks_per_s));
  return 60.0 * ticks_per_s / ticks;
}

double barometer_measure(double pressure, int osr, double sigma, double first_reading,
                         Stream& rng) {
  check_osr(osr);
  double sum = 0.0;
  for (int i = 0; i < kAdcReadings; ++i) {
    double p = pressure + rng.normal(0.0, sigma);
    if (i == 0) p += first_reading;
    if (i < osr) sum += p;
  }
  return sum / osr;
}

}  // namespace chambersim
