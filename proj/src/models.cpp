#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

void check_load(double L) {
  require(L >= 0.0 && L <= 1.0, "load " + format_number(L) + " outside [0, 1]");
}

void check_speed(double omega, double omega_max, const char* name) {
  require(std::isfinite(omega) && omega >= 0.0 && omega <= omega_max,
          std::string(name) + " " + format_number(omega) + " outside [0, " +
              format_number(omega_max) + "] rad/s");
}

double cube(double x) { return x * x * x; }

}  // namespace

double FanParams::steady_state_drag() const {
  return torque_const * (C_max - C_min) / (omega_max * omega_max);
}

FanParams FanParams::defaults() {
  FanParams p;
  p.drag_K = p.steady_state_drag();
  return p;
}

void FanParams::validate() const {
  require(omega_max > 0, "fan.omega_max must be positive");
  require(L_min > 0 && L_min < 1, "fan.L_min must be in (0, 1)");
  require(C_max > C_min && C_min >= 0, "fan currents need C_max > C_min >= 0");
  require(inertia > 0 && torque_const > 0, "fan inertia and torque constant must be positive");
  require(drag_K > 0, "fan.drag_K must be positive");
}

void PressureParams::validate() const {
  require(S_max > 0 && Q_max > 0, "pressure.S_max and Q_max must be positive");
  require(r0 > 0 && r0 <= 1, "pressure.r0 must be in (0, 1]");
  require(beta >= 0, "pressure.beta must be nonnegative");
  require(omega_max > 0, "omega_max must be positive");
}

void BernoulliParams::validate() const {
  require(rho > 0 && area > 0 && Q_max > 0 && omega_max > 0,
          "bernoulli parameters must be positive");
  require(std::isfinite(delta), "bernoulli.delta must be finite");
}

void MalusParams::validate() const {
  require(I0 >= 0, "malus I0 must be nonnegative");
  require(Tc >= 0 && Tc < Tp && Tp <= 1, "malus needs 0 <= Tc < Tp <= 1");
}

void ImageModelParams::validate() const {
  for (const auto& row : S)
    for (double s : row) require(s >= 0, "image sensor matrix must be nonnegative");
  double sum = 0;
  for (int i = 0; i < 3; ++i) {
    require(w[i] >= 0, "white balance must be nonnegative");
    require(Tc[i] >= 0 && Tc[i] < Tp[i] && Tp[i] <= 1, "image needs 0 <= Tc < Tp <= 1");
    sum += w[i];
  }
  require(std::fabs(sum - 1.0) < 1e-9, "white balance must sum to 1");
  require(exposure > 0, "exposure must be positive");
}

double model_A1_speed(double L, const FanParams& p) {
  check_load(L);
  if (L <= 0.0) return 0.0;
  return std::max(L, p.L_min) * p.omega_max;
}

double model_B1_current(double L, const FanParams& p) {
  check_load(L);
  if (L <= 0.0) return p.C_min;
  return p.C_min + cube(std::max(p.L_min, L)) * (p.C_max - p.C_min);
}

double fan_torque(double L, const FanParams& p) {
  check_load(L);
  if (L <= 0.0) return 0.0;
  return p.torque_const * cube(std::max(p.L_min, L)) * (p.C_max - p.C_min);
}

double model_A2_step(double omega, double L, double dt, const FanParams& p) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw RangeError("time step must be positive, got " + format_number(dt));
  if (!std::isfinite(omega)) throw NumericError("non-finite fan speed");
  if (omega < 0) throw RangeError("fan speed must be nonnegative");
  const double tau = fan_torque(L, p);
  const double K = p.drag_K;
  const double inv_I = 1.0 / p.inertia;
  auto f = [&](double w) { return (tau - K * w * w) * inv_I; };
  const double k1 = f(omega);
  const double k2 = f(omega + 0.5 * dt * k1);
  const double k3 = f(omega + 0.5 * dt * k2);
  const double k4 = f(omega + dt * k3);
  double next = omega + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(next)) throw NumericError("fan speed diverged");
  return std::max(0.0, next);
}

double model_A2_integrate(double omega, double L, double duration, double dt,
                          const FanParams& p) {
  if (duration < 0) throw RangeError("negative integration horizon");
  const auto steps = static_cast<std::int64_t>(std::floor(duration / dt + 1e-9));
  for (std::int64_t i = 0; i < steps; ++i) omega = model_A2_step(omega, L, dt, p);
  const double rest = duration - static_cast<double>(steps) * dt;
  if (rest > 1e-12) omega = model_A2_step(omega, L, rest, p);
  return omega;
}

double model_C1_pressure(double omega_in, double omega_out, const PressureParams& p) {
  check_speed(omega_in, p.omega_max, "omega_in");
  check_speed(omega_out, p.omega_max, "omega_out");
  const double a = omega_in / p.omega_max;
  const double b = omega_out / p.omega_max;
  return p.P_amb + p.S_max * a * a - p.S_max * b * b;
}

double model_C2_static_pressure(double omega, double r, const PressureParams& p) {
  require(r > 0.0 && r <= 1.0, "ratio r " + format_number(r) + " outside (0, 1]");
  check_speed(omega, p.omega_max, "omega");
  const double x = omega / p.omega_max;
  const double Z = (p.S_max / (p.Q_max * p.Q_max)) * (1.0 - r) / (r * r);
  if (Z == 0.0 || x == 0.0) return 0.0;
  // Z Q^2 + a Q - c = 0; cancellation-free form of the positive root.
  const double a = x * p.S_max / p.Q_max;
  const double c = x * x * p.S_max;
  const double q = 2.0 * c / (a + std::sqrt(a * a + 4.0 * Z * c));
  return Z * q * q;
}

double hatch_ratio(double H, const PressureParams& p) {
  require(H >= 0.0 && H <= 45.0, "hatch " + format_number(H) + " outside [0, 45]");
  return std::min(1.0, p.r0 + p.beta * H / 45.0);
}

double model_C3_pressure(double omega_in, double omega_out, double H,
                         const PressureParams& p) {
  const double r = hatch_ratio(H, p);
  return p.P_amb + model_C2_static_pressure(omega_in, r, p) -
         model_C2_static_pressure(omega_out, r, p);
}

double model_D1_pressure_diff(double omega_in, const BernoulliParams& p) {
  require(omega_in >= 0.0, "omega_in must be nonnegative");
  const double k = p.Q_max / p.omega_max;
  return p.rho / (2.0 * p.area * p.area) * k * k * omega_in * omega_in + p.delta;
}

double malus_factor(double theta1_deg, double theta2_deg) {
  // Reduce the difference first: period 180 deg, and fmod is odd so the
  // swap symmetry holds bit-for-bit.
  const double d = std::fmod(theta1_deg - theta2_deg, 180.0);
  const double c = std::cos(d * kPi / 180.0);
  return c * c;
}

double model_E1_intensity(double theta1_deg, double theta2_deg, const MalusParams& p) {
  return p.I0 * ((p.Tp - p.Tc) * malus_factor(theta1_deg, theta2_deg) + p.Tc);
}

Vec3 model_F_color(double R, double G, double B, double theta1_deg, double theta2_deg,
                   ColorModel model, const ImageModelParams& p) {
  for (double ch : {R, G, B})
    require(ch >= 0 && ch <= 255, "color channel " + format_number(ch) + " outside 0..255");
  const double m = malus_factor(theta1_deg, theta2_deg);
  const Vec3 x{R / 255.0, G / 255.0, B / 255.0};
  Vec3 out{};
  if (model == ColorModel::F1) {
    for (int i = 0; i < 3; ++i) out[i] = m * x[i];
    return out;
  }
  Vec3 t{};
  for (int i = 0; i < 3; ++i)
    t[i] = model == ColorModel::F2 ? m * x[i] : ((p.Tp[i] - p.Tc[i]) * m + p.Tc[i]) * x[i];
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += p.S[i][j] * t[j];
    out[i] = std::min(1.0, p.exposure * p.w[i] * s);
  }
  return out;
}

std::array<std::uint8_t, 3> Raster::pixel(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

std::uint8_t quantize_channel(double c) {
  double v = std::floor(std::clamp(c, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

Raster render_hexagon(const Vec3& color, int size) {
  if (size < 16) throw RangeError("image size must be at least 16, got " + std::to_string(size));
  Raster r;
  r.width = r.height = size;
  r.rgb.assign(static_cast<std::size_t>(size) * size * 3, 0);
  const std::uint8_t q[3] = {quantize_channel(color[0]), quantize_channel(color[1]),
                             quantize_channel(color[2])};
  const double c = size / 2.0;
  const double radius = 0.4 * size;
  const double s3 = std::sqrt(3.0);
  for (int y = 0; y < size; ++y) {
    const double dy = std::fabs(y + 0.5 - c);
    if (dy > s3 / 2.0 * radius) continue;
    for (int x = 0; x < size; ++x) {
      const double dx = std::fabs(x + 0.5 - c);
      if (s3 * dx + dy > s3 * radius) continue;
      std::uint8_t* px = &r.rgb[(static_cast<std::size_t>(y) * size + x) * 3];
      px[0] = q[0];
      px[1] = q[1];
      px[2] = q[2];
    }
  }
  return r;
}

}  // namespace chambersim
