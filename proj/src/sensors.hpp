#pragma once

#include <array>
#include <cstdint>

#include "rng.hpp"
#include "variables.hpp"

namespace chambersim {

constexpr int kAdcFullScale = 1023;
constexpr int kAdcReadings = 8;
constexpr std::int64_t kLightCountsMax = 65535;

/// Calibrated reference voltage for a nominal setting (1.1, 2.56 or 5).
double vref_actual(Chamber chamber, double setting);

struct AnalogSensorConfig {
  double vref_setting = 5.0;
  double vref_actual = 5.0;
  int osr = 1;
  double noise_sigma = 0.0;        // V
  double first_reading_lsb = 0.0;  // offset of reading 0, in counts

  static AnalogSensorConfig make(Chamber chamber, double vref_setting, int osr,
                                 double noise_sigma, double first_reading_lsb = 0.0);
};

/// Eight noisy readings, each clamped to [0, vref] and floored to 10 bits;
/// returns the mean of the first `osr`. A true voltage at or above vref rails
/// every reading at 1023.
double analog_measure(double true_voltage, const AnalogSensorConfig& cfg, Stream& rng);
/// Same, with a distinct true voltage per reading.
double analog_measure_readings(const std::array<double, kAdcReadings>& true_voltages,
                               const AnalogSensorConfig& cfg, Stream& rng);

double calibrate_current(double counts, double vref_actual);
double calibrate_angle(double counts, double zero_offset, double vref_actual);
/// Voltage from the current sense circuit for a draw of `amps`.
double current_voltage(double amps);
/// Potentiometer voltage of a polarizer frame at `theta_deg`.
double angle_voltage(double theta_deg, double zero_offset);

constexpr double kAngleZero1 = 507.0;
constexpr double kAngleZero2 = 512.0;

struct LightSensorConfig {
  double gain = 1.0;  // product of diode and exposure gains
  double sigma0 = 0.0;
  double sigma1 = 0.0;
};

std::int64_t light_measure(double true_intensity, const LightSensorConfig& cfg, Stream& rng);

struct SpeakerReading {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Binary white noise through the two potentiometers. The same eight signal
/// samples feed both channels; `bits` drives the signal, `n1`/`n2` the ADC noise.
SpeakerReading speaker_signal(double A1, double A2, const AnalogSensorConfig& cfg1,
                              const AnalogSensorConfig& cfg2, Stream& bits, Stream& n1,
                              Stream& n2);

/// Revolution period with timing jitter, counted in ms (res 0) or us (res 1).
double tachometer_rpm(double omega, int resolution, double jitter_s, Stream& rng);

double barometer_measure(double pressure, int osr, double sigma, double first_reading,
                         Stream& rng);

}  // namespace chambersim
