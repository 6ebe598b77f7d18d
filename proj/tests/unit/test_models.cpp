#include <gtest/gtest.h>

#include <cmath>

#include "error.hpp"
#include "models.hpp"

using namespace chambersim;

namespace {

constexpr double kPi = 3.14159265358979323846;

const FanParams fan = FanParams::defaults();
const PressureParams pressure;

// Operating point of a linear fan curve against a quadratic system curve,
// found by bisection instead of the closed-form root.
double c2_bisect(double omega, double r, const PressureParams& p) {
  const double x = omega / p.omega_max;
  const double Z = p.S_max / (p.Q_max * p.Q_max) * (1 - r) / (r * r);
  auto f = [&](double Q) { return x * x * p.S_max - x * p.S_max * Q / p.Q_max - Z * Q * Q; };
  double lo = 0, hi = x * p.Q_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  const double Q = 0.5 * (lo + hi);
  return Z * Q * Q;
}

}  // namespace

TEST(FanModels, A1Constants) {
  EXPECT_EQ(model_A1_speed(1.0, fan), 314.16);
  EXPECT_EQ(model_A1_speed(0.0, fan), 0.0);
  EXPECT_DOUBLE_EQ(model_A1_speed(0.05, fan), 31.416);
  EXPECT_THROW(model_A1_speed(1.5, fan), RangeError);
  EXPECT_THROW(model_A1_speed(-0.1, fan), RangeError);
}

TEST(FanModels, B1Constants) {
  EXPECT_EQ(model_B1_current(0.0, fan), 0.166);
  EXPECT_EQ(model_B1_current(1.0, fan), 0.26);
  EXPECT_DOUBLE_EQ(model_B1_current(0.5, fan), 0.17775);
}

TEST(FanModels, DragDefaultsToSteadyStateValue) {
  EXPECT_DOUBLE_EQ(fan.drag_K, 0.05 * (0.26 - 0.166) / (314.16 * 314.16));
  EXPECT_NEAR(fan.drag_K, 4.76e-8, 1e-10);
}

TEST(FanModels, A2FixedPoint) {
  for (double L : {0.1, 0.3, 0.75, 1.0}) {
    const double w_ss = std::sqrt(fan_torque(L, fan) / fan.drag_K);
    for (double dt : {1e-4, 1e-3, 1e-2})
      EXPECT_NEAR(model_A2_step(w_ss, L, dt, fan), w_ss, 1e-9 * w_ss);
  }
}

TEST(FanModels, A2DecaysMonotonicallyWhenOff) {
  double w = 300.0;
  for (int i = 0; i < 200; ++i) {
    const double next = model_A2_integrate(w, 0.0, 1.0, 1e-3, fan);
    ASSERT_LE(next, w);
    ASSERT_GE(next, 0.0);
    w = next;
  }
  EXPECT_LT(w, 300.0 * 0.05);
}

TEST(FanModels, A2MatchesClosedForm) {
  // dw/dt = (tau - K w^2) / J from rest: w(t) = w_inf tanh(t sqrt(tau K) / J).
  const double tau = fan_torque(1.0, fan);
  const double w_inf = std::sqrt(tau / fan.drag_K);
  const double rate = std::sqrt(tau * fan.drag_K) / fan.inertia;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const double rk = model_A2_integrate(0.0, 1.0, t, 1e-3, fan);
    EXPECT_NEAR(rk, w_inf * std::tanh(rate * t), 1e-7 * w_inf) << t;
  }
  const double w10 = model_A2_integrate(0.0, 1.0, 10.0, 1e-3, fan);
  EXPECT_NEAR(w10, w_inf, 1e-3 * w_inf);
  // Endpoint consistency with A1.
  EXPECT_NEAR(w10, model_A1_speed(1.0, fan), 1e-3 * 314.16);
}

TEST(FanModels, A2StepConvergence) {
  const double coarse = model_A2_integrate(0.0, 1.0, 5.0, 1e-3, fan);
  const double fine = model_A2_integrate(0.0, 1.0, 5.0, 1e-4, fan);
  EXPECT_LT(std::fabs(coarse - fine) / fine, 1e-6);
  EXPECT_THROW(model_A2_step(1.0, 1.0, 0.0, fan), RangeError);
  EXPECT_THROW(model_A2_step(NAN, 1.0, 1e-3, fan), NumericError);
}

TEST(FanModels, PrintedDragConstantSelectable) {
  FanParams p = fan;
  p.drag_K = FanParams::printed_drag_K;
  EXPECT_EQ(p.drag_K, 5.26e-8);
  const double w = model_A2_integrate(0.0, 1.0, 20.0, 1e-3, p);
  EXPECT_NEAR(w, std::sqrt(fan_torque(1.0, p) / 5.26e-8), 1e-6 * w);
  EXPECT_LT(w, 314.16);
}

TEST(PressureModels, C1) {
  const double wmax = pressure.omega_max;
  EXPECT_EQ(model_C1_pressure(100.0, 100.0, pressure), 101325.0);
  EXPECT_DOUBLE_EQ(model_C1_pressure(wmax, 0.0, pressure), 101325.0 + 74.82);
  EXPECT_DOUBLE_EQ(model_C1_pressure(0.0, wmax / 2, pressure), 101325.0 - 18.705);
}

TEST(PressureModels, C2Examples) {
  const double wmax = pressure.omega_max;
  for (double w : {0.0, 100.0, wmax}) EXPECT_EQ(model_C2_static_pressure(w, 1.0, pressure), 0.0);
  EXPECT_EQ(model_C2_static_pressure(0.0, 0.5, pressure), 0.0);
  EXPECT_NEAR(model_C2_static_pressure(wmax, 0.7, pressure), 22.446, 1e-9 * 22.446);
  EXPECT_THROW(model_C2_static_pressure(wmax, 0.0, pressure), RangeError);
}

TEST(PressureModels, C2FullSpeedIdentity) {
  for (int k = 1; k <= 10; ++k) {
    const double r = k / 10.0;
    const double expect = pressure.S_max * (1 - r);
    const double got = model_C2_static_pressure(pressure.omega_max, r, pressure);
    if (expect == 0)
      EXPECT_EQ(got, 0.0);
    else
      EXPECT_NEAR(got, expect, 1e-9 * expect) << r;
  }
}

TEST(PressureModels, C2AgreesWithBisection) {
  for (double r : {0.05, 0.3, 0.7, 0.95})
    for (double w : {10.0, 120.0, 250.0, 314.16}) {
      const double oracle = c2_bisect(w, r, pressure);
      EXPECT_NEAR(model_C2_static_pressure(w, r, pressure), oracle, 1e-9 * (1 + oracle));
    }
}

TEST(PressureModels, C2Monotone) {
  for (double r = 0.1; r <= 1.0; r += 0.1)
    for (double w = 0; w + 10 <= 314.16; w += 10) {
      EXPECT_LE(model_C2_static_pressure(w, r, pressure),
                model_C2_static_pressure(w + 10, r, pressure));
      if (r + 0.1 <= 1.0)
        EXPECT_GE(model_C2_static_pressure(w, r, pressure),
                  model_C2_static_pressure(w, r + 0.1, pressure));
    }
}

TEST(PressureModels, C3) {
  const double wmax = pressure.omega_max;
  for (double a : {0.0, 100.0, wmax})
    for (double b : {0.0, 50.0, wmax})
      EXPECT_EQ(model_C3_pressure(a, b, 0.0, pressure),
                101325.0 + model_C2_static_pressure(a, 0.7, pressure) -
                    model_C2_static_pressure(b, 0.7, pressure));
  PressureParams open = pressure;
  open.r0 = 0.9;
  EXPECT_EQ(hatch_ratio(45.0, open), 1.0);
  EXPECT_EQ(model_C3_pressure(wmax, 0.0, 45.0, open), 101325.0);
  EXPECT_NEAR(model_C3_pressure(wmax, 0.0, 45.0, pressure) - 101325.0, 11.223, 1e-9);
}

TEST(PressureModels, D1) {
  const BernoulliParams b;
  EXPECT_EQ(model_D1_pressure_diff(0.0, b), 7.1);
  const double A = kPi * 0.06 * 0.06;
  const double oracle = 1.2 * 0.052 * 0.052 / (2 * A * A) + 7.1;
  EXPECT_NEAR(model_D1_pressure_diff(314.16, b), oracle, 1e-9);
  EXPECT_NEAR(model_D1_pressure_diff(314.16, b), 19.79, 0.01);
  const double w = 80.0;
  EXPECT_NEAR(model_D1_pressure_diff(2 * w, b) - 7.1, 4 * (model_D1_pressure_diff(w, b) - 7.1),
              1e-12);
}

TEST(LightModels, E1) {
  const MalusParams m;
  EXPECT_DOUBLE_EQ(model_E1_intensity(30, 30, m), 0.29);
  EXPECT_NEAR(model_E1_intensity(10, 100, m), 0.02, 1e-15);
  EXPECT_NEAR(model_E1_intensity(0, 45, m), (0.29 + 0.02) / 2, 1e-15);
}

TEST(LightModels, E1Symmetry) {
  const MalusParams m;
  for (double a = -180; a <= 180; a += 17.3)
    for (double b = -180; b <= 180; b += 23.9) {
      EXPECT_EQ(model_E1_intensity(a, b, m), model_E1_intensity(b, a, m));
      EXPECT_NEAR(model_E1_intensity(a + 180, b, m), model_E1_intensity(a, b, m), 1e-15);
      EXPECT_NEAR(model_E1_intensity(a, b + 180, m), model_E1_intensity(a, b, m), 1e-15);
    }
}

TEST(LightModels, FExamples) {
  const ImageModelParams ip;
  Vec3 c = model_F_color(255, 0, 0, 20, 20, ColorModel::F1, ip);
  EXPECT_EQ(c, (Vec3{1, 0, 0}));
  c = model_F_color(200, 100, 50, 0, 90, ColorModel::F1, ip);
  for (double v : c) EXPECT_NEAR(v, 0.0, 1e-30);
  c = model_F_color(255, 255, 255, 0, 90, ColorModel::F3, ip);
  EXPECT_NEAR(c[0], 0.02, 1e-15);
  EXPECT_NEAR(c[1], 0.08, 1e-15);
  EXPECT_NEAR(c[2], 0.18, 1e-15);
  EXPECT_GT(c[2], c[1]);
  EXPECT_GT(c[1], c[0]);
  EXPECT_THROW(model_F_color(256, 0, 0, 0, 0, ColorModel::F1, ip), RangeError);
}

TEST(LightModels, F3ReducesToF1) {
  for (double cval : {0.25, 0.5, 0.8}) {
    ImageModelParams ip;
    ip.Tp = {cval, cval, cval};
    ip.Tc = {0, 0, 0};
    ip.exposure = 3.0 / cval;
    for (double t : {0.0, 30.0, 61.0})
      for (double v : {0.0, 77.0, 255.0}) {
        const Vec3 f1 = model_F_color(v, 255 - v, 128, t, 0, ColorModel::F1, ip);
        const Vec3 f3 = model_F_color(v, 255 - v, 128, t, 0, ColorModel::F3, ip);
        for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f3[i], f1[i]);
      }
  }
}

TEST(LightModels, Purity) {
  const ImageModelParams ip;
  EXPECT_EQ(model_F_color(12, 34, 56, 7, 89, ColorModel::F2, ip),
            model_F_color(12, 34, 56, 7, 89, ColorModel::F2, ip));
  EXPECT_EQ(model_C2_static_pressure(123.4, 0.37, pressure),
            model_C2_static_pressure(123.4, 0.37, pressure));
}

TEST(Images, Hexagon) {
  const Raster black = render_hexagon({0, 0, 0}, 50);
  for (auto b : black.rgb) ASSERT_EQ(b, 0);
  const Raster white = render_hexagon({1, 1, 1}, 100);
  EXPECT_EQ(white.pixel(50, 50), (std::array<std::uint8_t, 3>{255, 255, 255}));
  EXPECT_EQ(white.pixel(0, 0), (std::array<std::uint8_t, 3>{0, 0, 0}));
  EXPECT_EQ(white.pixel(99, 99), (std::array<std::uint8_t, 3>{0, 0, 0}));
  EXPECT_THROW(render_hexagon({1, 1, 1}, 8), RangeError);
}

TEST(Images, HexagonArea) {
  const int size = 1000;
  const Raster r = render_hexagon({1, 1, 1}, size);
  std::size_t lit = 0;
  for (std::size_t i = 0; i < r.rgb.size(); i += 3) lit += r.rgb[i] != 0;
  const double R = 0.4 * size;
  const double area = 3.0 * std::sqrt(3.0) / 2.0 * R * R;
  EXPECT_NEAR(lit / area, 1.0, 0.02);
}

TEST(Images, Quantize) {
  EXPECT_EQ(quantize_channel(0.0), 0);
  EXPECT_EQ(quantize_channel(1.0), 255);
  EXPECT_EQ(quantize_channel(2.0), 255);
  EXPECT_EQ(quantize_channel(-1.0), 0);
  EXPECT_EQ(quantize_channel(0.5), 128);  // 127.5 rounds up
}
