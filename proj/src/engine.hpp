#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "models.hpp"
#include "params.hpp"
#include "protocol.hpp"
#include "variables.hpp"

namespace chambersim {

enum class Fidelity { steady_state, dynamic };

Fidelity parse_fidelity(std::string_view name);
std::string_view to_string(Fidelity f);

struct MeasurementRow {
  double timestamp = 0.0;
  int intervention = 0;
  std::vector<double> values;   // aligned with Engine::columns()
  std::optional<Raster> image;  // lt_camera with image rendering enabled
};

struct PidState {
  double error_sum = 0.0;
  double prev_error = 0.0;
};

struct PidOutput {
  double error = 0.0;
  double error_sum = 0.0;
  double error_diff = 0.0;
  double u = 0.0;
  double load_in = 0.0;
  double load_out = 0.0;
};

/// One controller update. The integral is clamped to +-integral_limit.
PidOutput pid_step(PidState& state, const EngineParams& p, double target, double measured);

using Assignment = std::pair<std::string, double>;

/// A virtual chamber. Single-threaded; independent instances share nothing.
class Engine {
 public:
  Engine(Config config, Params params, Fidelity fidelity, std::uint64_t seed);

  Config config() const { return config_; }
  Fidelity fidelity() const { return fidelity_; }
  std::uint64_t seed() const { return seed_; }
  const Params& params() const { return params_; }
  const std::vector<std::string>& columns() const { return columns_; }
  double clock() const { return clock_; }
  std::uint64_t rows_measured() const { return row_index_; }

  /// do(X = x). Manipulable variables are range checked. Sensor variables
  /// (e.g. pressure_downwind) are overridden in the output and in anything
  /// that reads them, until released. In wt_pressure_control an intervened
  /// load is frozen against the controller until released. A non-empty
  /// assignment marks the next row.
  void intervene(const std::vector<Assignment>& assignments);
  void release(std::string_view id);

  /// Current setting of a manipulable variable.
  double value(std::string_view id) const;

  void wait(double seconds);
  /// Advance the clock to `t` (>= clock), integrating the fans on the way.
  void advance_to(double t);

  /// Sample every sensor at the current clock. Does not advance time.
  MeasurementRow measure();

  void set_render_images(bool on) { render_images_ = on; }

  double omega_in() const { return omega_in_; }
  double omega_out() const { return omega_out_; }

 private:
  int index_of(std::string_view id) const;
  void compute_wind(std::vector<double>& cur, MeasurementRow& row);
  void compute_light(std::vector<double>& cur, MeasurementRow& row);
  void integrate(double dt);
  double steady_speed(double L) const;

  Config config_;
  Chamber chamber_;
  Params params_;
  Fidelity fidelity_;
  std::uint64_t seed_;
  std::vector<std::string> columns_;
  const std::vector<ChamberVariable>* catalog_;
  std::vector<int> column_index_;  // catalog index per variable column

  std::vector<double> state_;     // catalog indexed
  std::vector<bool> overridden_;  // sensor overrides
  std::vector<bool> frozen_;      // loads frozen against the controller
  double clock_ = 0.0;
  std::uint64_t row_index_ = 0;
  bool pending_intervention_ = false;
  bool render_images_ = false;

  double omega_in_ = 0.0;
  double omega_out_ = 0.0;
  double last_rpm_in_ = 0.0;
  double last_rpm_out_ = 0.0;
  double drift_ = 0.0;
  std::uint64_t drift_steps_ = 0;

  PidState pid_;
  std::optional<double> pid_target_;

  std::int64_t hex_pixels_ = -1;

  // Catalog indices used on the hot path.
  struct Idx;
  std::shared_ptr<const Idx> idx_;
};

/// Pull-based execution of a protocol.
class ProtocolRun {
 public:
  /// Seed precedence: `seed_override`, then the protocol's SEED, then 0.
  ProtocolRun(Protocol protocol, Params params, Fidelity fidelity,
              std::optional<std::uint64_t> seed_override = std::nullopt);

  /// Produce the next row; false once the protocol is exhausted.
  bool next(MeasurementRow& row);

  const std::vector<std::string>& columns() const { return engine_.columns(); }
  Engine& engine() { return engine_; }
  const Protocol& protocol() const { return protocol_; }

 private:
  Protocol protocol_;
  Engine engine_;
  std::size_t pc_ = 0;
  std::int64_t msr_done_ = 0;
  double msr_t0_ = 0.0;
};

/// Run to completion; convenience for tests and small protocols.
std::vector<MeasurementRow> run_protocol(const Protocol& protocol, const Params& params,
                                         Fidelity fidelity,
                                         std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace chambersim
