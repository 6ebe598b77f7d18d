#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "sensors.hpp"

using namespace chambersim;

namespace {

double variance(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

AnalogSensorConfig wt_adc(double vref, int osr, double sigma) {
  return AnalogSensorConfig::make(Chamber::wind_tunnel, vref, osr, sigma);
}

}  // namespace

TEST(Adc, ReferenceVoltages) {
  EXPECT_EQ(vref_actual(Chamber::wind_tunnel, 1.1), 1.16);
  EXPECT_EQ(vref_actual(Chamber::wind_tunnel, 2.56), 2.65);
  EXPECT_EQ(vref_actual(Chamber::wind_tunnel, 5), 5.0);
  EXPECT_EQ(vref_actual(Chamber::light_tunnel, 1.1), 1.09);
  EXPECT_EQ(vref_actual(Chamber::light_tunnel, 2.56), 2.55);
  EXPECT_THROW(vref_actual(Chamber::light_tunnel, 3.3), RangeError);
}

TEST(Adc, ZeroAndSaturation) {
  Stream s(1);
  EXPECT_EQ(analog_measure(0.0, wt_adc(5, 1, 0), s), 0.0);
  for (double vref : {1.1, 2.56, 5.0})
    for (int osr : {1, 2, 4, 8})
      for (double sigma : {0.0, 0.01, 1.0}) {
        const double va = vref_actual(Chamber::wind_tunnel, vref);
        EXPECT_EQ(analog_measure(va, wt_adc(vref, osr, sigma), s), 1023.0);
        EXPECT_EQ(analog_measure(va * 3, wt_adc(vref, osr, sigma), s), 1023.0);
      }
  EXPECT_THROW(AnalogSensorConfig::make(Chamber::wind_tunnel, 5, 3, 0), RangeError);
}

TEST(Adc, NoiselessIsOsrInvariant) {
  Stream s(2);
  for (double v = 0; v < 5; v += 0.173) {
    const double ref = analog_measure(v, wt_adc(5, 1, 0), s);
    for (int osr : {2, 4, 8}) EXPECT_EQ(analog_measure(v, wt_adc(5, osr, 0), s), ref);
  }
}

TEST(Adc, OversamplingDividesVariance) {
  Stream s(3);
  const int n = 100000;
  std::vector<double> one(n), eight(n);
  for (int i = 0; i < n; ++i) one[i] = analog_measure(2.5, wt_adc(5, 1, 0.05), s);
  for (int i = 0; i < n; ++i) eight[i] = analog_measure(2.5, wt_adc(5, 8, 0.05), s);
  EXPECT_NEAR(variance(eight) / variance(one), 1.0 / 8.0, 0.15 / 8.0);
}

TEST(Adc, FirstReadingOffset) {
  Stream s(4);
  auto cfg = AnalogSensorConfig::make(Chamber::wind_tunnel, 5, 1, 0.0, -2.0);
  const double two_counts = 2.0 * 5.0 / 1023.0 + 1e-6;
  EXPECT_EQ(analog_measure(2.5, cfg, s), std::floor(2.5 * 1023 / 5) - 2);
  cfg.osr = 8;
  EXPECT_EQ(analog_measure(2.5, cfg, s), std::floor(2.5 * 1023 / 5) - 0.25);
  EXPECT_EQ(analog_measure(two_counts, AnalogSensorConfig::make(Chamber::wind_tunnel, 5, 1, 0.0, -5.0), s),
            0.0);
}

TEST(Adc, StreamDeterminism) {
  Stream a(77), b(77);
  const auto cfg = wt_adc(2.56, 4, 0.02);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(analog_measure(1.3, cfg, a), analog_measure(1.3, cfg, b));
}

TEST(Calibration, Current) {
  EXPECT_EQ(calibrate_current(0, 5), 0.0);
  EXPECT_EQ(calibrate_current(1023, 5), 2.5);
  EXPECT_NEAR(calibrate_current(511.5, 2.65), 511.5 * 2.65 / (1023 * 5) * 2.5, 1e-15);
  EXPECT_NEAR(calibrate_current(511.5, 2.65), 0.6625, 1e-12);
  EXPECT_THROW(calibrate_current(1024, 5), RangeError);
  EXPECT_THROW(calibrate_current(-1, 5), RangeError);
}

TEST(Calibration, CurrentRoundTrip) {
  Stream s(5);
  for (double vref : {1.1, 2.56, 5.0}) {
    const double va = vref_actual(Chamber::wind_tunnel, vref);
    for (double v = 0; v < va; v += va / 37) {
      const double counts = analog_measure(v, wt_adc(vref, 1, 0), s);
      const double amps = calibrate_current(counts, va);
      const double step = va / 1023 * 2.5 / 5;
      EXPECT_LE(v * 2.5 / 5 - amps, step + 1e-12);
      EXPECT_GE(v * 2.5 / 5 - amps, -1e-12);
    }
  }
}

TEST(Calibration, Angle) {
  EXPECT_EQ(calibrate_angle(507, kAngleZero1, 5), 0.0);
  for (double vref : {1.09, 2.55, 5.0}) EXPECT_EQ(calibrate_angle(512, kAngleZero2, vref), 0.0);
  EXPECT_NEAR(calibrate_angle(1023, 507, 5), (1023 - 507) * 720.0 / 1023, 1e-12);
  EXPECT_NEAR(calibrate_angle(1023, 507, 5), 363.167, 1e-3);
  // Inverse of the frame potentiometer.
  Stream s(6);
  auto cfg = AnalogSensorConfig::make(Chamber::light_tunnel, 5, 1, 0.0);
  for (double th = -170; th <= 170; th += 10) {
    const double c = analog_measure(angle_voltage(th, kAngleZero1), cfg, s);
    EXPECT_NEAR(calibrate_angle(c, kAngleZero1, 5), th, 720.0 / 1023 + 1e-9);
  }
}

TEST(LightSensor, Limits) {
  Stream s(7);
  EXPECT_EQ(light_measure(0.0, {1.0, 0.0, 0.0}, s), 0);
  EXPECT_EQ(light_measure(1e9, {1.0, 100.0, 0.01}, s), 65535);
  EXPECT_EQ(light_measure(1234.7, {1.0, 0.0, 0.0}, s), 1234);
  EXPECT_THROW(light_measure(-1, {}, s), RangeError);
}

TEST(LightSensor, GainMonotone) {
  Stream s(8);
  double low = 0, high = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) low += light_measure(2000, {1.0, 100, 0.01}, s);
  for (int i = 0; i < n; ++i) high += light_measure(2000, {4.0, 100, 0.01}, s);
  EXPECT_GE(high / n, low / n);
  EXPECT_NEAR(high / low, 4.0, 0.1);
}

TEST(Speaker, Amplitudes) {
  const auto cfg = wt_adc(5, 1, 0.0);
  Stream bits(9), n1(10), n2(11);
  for (int i = 0; i < 50; ++i) {
    auto r = speaker_signal(0, 200, cfg, cfg, bits, n1, n2);
    EXPECT_EQ(r.s1, 0.0);
    EXPECT_EQ(r.s2, 0.0);
  }
  // A2 only touches S2: S1 draws are identical with and without it.
  Stream b1(12), b2(12), x1(13), x2(13), y1(14), y2(14);
  for (int i = 0; i < 50; ++i) {
    auto with = speaker_signal(180, 255, cfg, cfg, b1, x1, y1);
    auto without = speaker_signal(180, 0, cfg, cfg, b2, x2, y2);
    EXPECT_EQ(with.s1, without.s1);
    EXPECT_EQ(without.s2, 0.0);
  }
}

TEST(Speaker, MaximumLinearInA2) {
  const auto cfg = wt_adc(5, 1, 0.003);
  std::vector<double> xs, ys;
  for (double a2 = 25; a2 <= 255; a2 += 23) {
    Stream bits(15), n1(16), n2(17);
    double mx = 0;
    for (int i = 0; i < 1000; ++i)
      mx = std::max(mx, speaker_signal(200, a2, cfg, cfg, bits, n1, n2).s2);
    xs.push_back(a2);
    ys.push_back(mx);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  EXPECT_GE(sxy * sxy / (sxx * syy), 0.99);
}

TEST(Tachometer, FullSpeedIs3000Rpm) {
  Stream s(18);
  EXPECT_EQ(tachometer_rpm(314.16, 1, 0.0, s), 3000.0);
  EXPECT_EQ(tachometer_rpm(314.16, 0, 0.0, s), 3000.0);
  // Millisecond resolution quantizes the period coarsely.
  EXPECT_EQ(tachometer_rpm(2 * 3.14159265358979 * 45.0, 0, 0.0, s), 60000.0 / 22.0);
  EXPECT_THROW(tachometer_rpm(0.0, 1, 0.0, s), RangeError);
}

TEST(Barometer, OversamplingAndOffset) {
  Stream s(19);
  EXPECT_EQ(barometer_measure(101325, 1, 0.0, -2.5, s), 101322.5);
  EXPECT_EQ(barometer_measure(101325, 8, 0.0, -2.5, s), 101325 - 2.5 / 8);
  EXPECT_THROW(barometer_measure(101325, 5, 0.0, 0.0, s), RangeError);
}
