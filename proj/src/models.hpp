#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace chambersim {

struct FanParams {
  double omega_max = 314.16;   // rad/s
  double L_min = 0.1;
  double C_max = 0.26;         // A
  double C_min = 0.166;        // A
  double inertia = 3.48e-5;    // kg m^2
  double torque_const = 0.05;  // N m / A
  double drag_K = 0.0;         // N m s^2; see steady_state_drag()

  /// K such that the A2 steady state at L = 1 equals omega_max.
  double steady_state_drag() const;
  /// The value printed alongside the model description.
  static constexpr double printed_drag_K = 5.26e-8;

  static FanParams defaults();
  void validate() const;
};

struct PressureParams {
  double S_max = 74.82;  // Pa
  double Q_max = 0.052;  // m^3/s
  double r0 = 0.7;
  double beta = 0.15;
  double P_amb = 101325.0;  // Pa
  double omega_max = 314.16;

  void validate() const;
};

struct BernoulliParams {
  double rho = 1.2;                            // kg/m^3
  double area = 3.14159265358979323846 * 0.06 * 0.06;  // m^2
  double delta = 7.1;                          // Pa
  double Q_max = 0.052;
  double omega_max = 314.16;

  void validate() const;
};

struct MalusParams {
  double I0 = 1.0;
  double Tp = 0.29;
  double Tc = 0.02;

  void validate() const;
};

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct ImageModelParams {
  Mat3 S{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Vec3 w{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double exposure = 3.0;
  Vec3 Tp{0.29, 0.35, 0.33};
  Vec3 Tc{0.02, 0.08, 0.18};

  void validate() const;
};

enum class ColorModel { F1, F2, F3 };

// Fan (A1, B1, A2)
double model_A1_speed(double L, const FanParams& p);
double model_B1_current(double L, const FanParams& p);
/// Motor torque tau(L) driving the A2 equation.
double fan_torque(double L, const FanParams& p);
double model_A2_step(double omega, double L, double dt, const FanParams& p);
/// Integrate A2 over `duration` with fixed step `dt` (last step shortened).
double model_A2_integrate(double omega, double L, double duration, double dt,
                          const FanParams& p);

// Pressure (C1, C2, C3, D1)
double model_C1_pressure(double omega_in, double omega_out, const PressureParams& p);
double model_C2_static_pressure(double omega, double r, const PressureParams& p);
double hatch_ratio(double H, const PressureParams& p);
double model_C3_pressure(double omega_in, double omega_out, double H,
                         const PressureParams& p);
double model_D1_pressure_diff(double omega_in, const BernoulliParams& p);

// Light (E1, F1-F3)
double malus_factor(double theta1_deg, double theta2_deg);
double model_E1_intensity(double theta1_deg, double theta2_deg, const MalusParams& p);
Vec3 model_F_color(double R, double G, double B, double theta1_deg, double theta2_deg,
                   ColorModel model, const ImageModelParams& p);

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> pixel(int x, int y) const;
};

/// Round half up to 0..255.
std::uint8_t quantize_channel(double c);
Raster render_hexagon(const Vec3& color, int size);

}  // namespace chambersim
