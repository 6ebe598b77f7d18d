#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "engine.hpp"
#include "error.hpp"
#include "protocol.hpp"

using namespace chambersim;

namespace {

std::size_t col(const Engine& e, const std::string& name) {
  const auto& c = e.columns();
  const auto it = std::find(c.begin(), c.end(), name);
  if (it == c.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - c.begin());
}

Params quiet() {
  Params p;
  p.sensor.noise_scale = 0.0;
  return p;
}

}  // namespace

TEST(Engine, ClockAdvancesByCountOverHz) {
  const Protocol p = parse_protocol("CHAMBER,wt,standard\nMSR,70,7\nWAIT,250\nMSR,3,2\n");
  ProtocolRun run(p, Params{}, Fidelity::steady_state);
  MeasurementRow row;
  std::vector<double> ts;
  while (run.next(row)) ts.push_back(row.timestamp);
  ASSERT_EQ(ts.size(), 73u);
  EXPECT_EQ(ts[0], 0.0);
  EXPECT_EQ(ts[69], 69.0 / 7.0);
  EXPECT_EQ(ts[70], 10.0 + 0.25);
  EXPECT_EQ(ts[72], 10.25 + 1.0);
  EXPECT_EQ(run.engine().clock(), 10.25 + 1.5);
}

TEST(Engine, DeterministicForSeed) {
  const Protocol p =
      parse_protocol("CHAMBER,lt,standard\nSET,red,200\nMSR,50,10\nSET,pol_1,45\nMSR,50,10\n");
  const auto a = run_protocol(p, Params{}, Fidelity::steady_state, 9);
  const auto b = run_protocol(p, Params{}, Fidelity::steady_state, 9);
  const auto c = run_protocol(p, Params{}, Fidelity::steady_state, 10);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].values, b[i].values);
    differs = differs || a[i].values != c[i].values;
  }
  EXPECT_TRUE(differs);
}

TEST(Engine, SeedPrecedence) {
  const Protocol p = parse_protocol("CHAMBER,wt,standard\nSEED,5\nMSR,5,5\n");
  EXPECT_EQ(ProtocolRun(p, Params{}, Fidelity::steady_state).engine().seed(), 5u);
  EXPECT_EQ(ProtocolRun(p, Params{}, Fidelity::steady_state, 8).engine().seed(), 8u);
  const Protocol q = parse_protocol("CHAMBER,wt,standard\nMSR,5,5\n");
  EXPECT_EQ(ProtocolRun(q, Params{}, Fidelity::steady_state).engine().seed(), 0u);
}

TEST(Engine, InterventionFlag) {
  const Protocol p = parse_protocol("CHAMBER,wt,standard\nMSR,2,5\nSET,hatch,10\nMSR,2,5\n");
  const auto rows = run_protocol(p, Params{}, Fidelity::steady_state);
  EXPECT_EQ(rows[0].intervention, 0);
  EXPECT_EQ(rows[1].intervention, 0);
  EXPECT_EQ(rows[2].intervention, 1);
  EXPECT_EQ(rows[3].intervention, 0);
}

TEST(Engine, EmptyInterventionLeavesState) {
  Engine e(Config::wt_standard, Params{}, Fidelity::steady_state, 1);
  const double before = e.value("load_in");
  e.intervene({});
  EXPECT_EQ(e.value("load_in"), before);
  EXPECT_EQ(e.measure().intervention, 0);
}

TEST(Engine, BadInterventionIsAtomic) {
  Engine e(Config::wt_standard, Params{}, Fidelity::steady_state, 1);
  EXPECT_THROW(e.intervene({{"hatch", 20}, {"load_in", 2}}), RangeError);
  EXPECT_EQ(e.value("hatch"), 0.0);
  EXPECT_THROW(e.intervene({{"flux", 1}}), NotFoundError);
  EXPECT_THROW(e.wait(-1), RangeError);
}

TEST(Engine, SensorOverride) {
  Engine e(Config::wt_standard, Params{}, Fidelity::steady_state, 1);
  e.intervene({{"pressure_downwind", 101000}});
  EXPECT_EQ(e.measure().values[col(e, "pressure_downwind")], 101000.0);
  e.release("pressure_downwind");
  EXPECT_GT(e.measure().values[col(e, "pressure_downwind")], 101200.0);
}

TEST(Engine, FullSpeedReads3000RpmAfterSpinUp) {
  for (Fidelity f : {Fidelity::steady_state, Fidelity::dynamic}) {
    Engine e(Config::wt_standard, quiet(), f, 3);
    e.intervene({{"load_in", 1.0}});
    e.wait(10.0);
    EXPECT_EQ(e.measure().values[col(e, "rpm_in")], 3000.0) << to_string(f);
  }
}

TEST(Engine, TachometerHoldsWhenFanOff) {
  Engine e(Config::wt_standard, quiet(), Fidelity::steady_state, 3);
  e.intervene({{"load_in", 1.0}});
  const double on = e.measure().values[col(e, "rpm_in")];
  e.intervene({{"load_in", 0.0}});
  e.wait(5);
  EXPECT_EQ(e.measure().values[col(e, "rpm_in")], on);
}

TEST(Engine, DarkLightTunnelReadsZero) {
  Params p;
  p.sensor.light_sigma0 = 0.0;
  Engine e(Config::lt_standard, p, Fidelity::steady_state, 4);
  e.intervene({{"red", 0}, {"green", 0}, {"blue", 0}});
  const auto row = e.measure();
  EXPECT_EQ(row.values[col(e, "ir_3")], 0.0);
  EXPECT_EQ(row.values[col(e, "vis_3")], 0.0);
}

TEST(Engine, RepeatedMeasurementsAtSameRowAgree) {
  Engine a(Config::lt_standard, Params{}, Fidelity::steady_state, 12);
  Engine b(Config::lt_standard, Params{}, Fidelity::steady_state, 12);
  b.wait(3.0);
  // Noise depends on the row index, not on the clock.
  EXPECT_EQ(a.measure().values, b.measure().values);
  EXPECT_NE(a.measure().values[col(a, "ir_1")], a.measure().values[col(a, "ir_1")]);
}

TEST(Engine, SubstreamsAreIndependentOfOtherSettings) {
  // Changing the speaker leaves the barometer draws untouched.
  Engine a(Config::wt_standard, Params{}, Fidelity::steady_state, 21);
  Engine b(Config::wt_standard, Params{}, Fidelity::steady_state, 21);
  b.intervene({{"pot_1", 255}, {"pot_2", 255}});
  for (int i = 0; i < 20; ++i) {
    const auto ra = a.measure();
    const auto rb = b.measure();
    EXPECT_EQ(ra.values[col(a, "pressure_ambient")], rb.values[col(b, "pressure_ambient")]);
  }
}

TEST(Pid, StepExamples) {
  EngineParams p;
  PidState s;
  PidOutput o = pid_step(s, p, 3.0, 0.0);
  EXPECT_NEAR(o.u, 1.803, 1e-12);
  EXPECT_EQ(o.load_in, 1.0);
  EXPECT_EQ(o.load_out, 0.0);
  s = {};
  o = pid_step(s, p, -3.0, 0.0);
  EXPECT_EQ(o.load_in, 0.0);
  EXPECT_EQ(o.load_out, 1.0);
  s = {};
  o = pid_step(s, p, 5.0, 5.0);
  EXPECT_EQ(o.u, 0.0);
  EXPECT_EQ(o.load_in, 0.0);
  EXPECT_EQ(o.load_out, 0.0);
}

TEST(Pid, IntegralClamped) {
  EngineParams p;
  PidState s;
  for (int i = 0; i < 100; ++i) pid_step(s, p, 100.0, 0.0);
  EXPECT_EQ(s.error_sum, p.pid_integral_limit);
}

TEST(Pid, ColumnsAppended) {
  Engine e(Config::wt_pressure_control, Params{}, Fidelity::steady_state, 1);
  const auto& c = e.columns();
  EXPECT_EQ(c.back(), "pid_error_diff");
  EXPECT_EQ(e.measure().values.size(), c.size());
}

TEST(Pid, FrozenLoadIgnoresController) {
  Engine e(Config::wt_pressure_control, Params{}, Fidelity::steady_state, 1);
  e.intervene({{"load_in", 0.42}});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(e.measure().values[col(e, "load_in")], 0.42);
  e.release("load_in");
  e.intervene({{"pressure_downwind", 101000}});
  e.measure();
  EXPECT_NE(e.measure().values[col(e, "load_in")], 0.42);
}

TEST(Pid, ConvergesInDynamicFidelity) {
  Params p = quiet();
  p.engine.pid_target = 101330.0;
  const Protocol proto = parse_protocol("CHAMBER,wt,pressure_control\nMSR,420,7\n");
  const auto rows = run_protocol(proto, p, Fidelity::dynamic, 2);
  Engine probe(Config::wt_pressure_control, p, Fidelity::dynamic, 2);
  const std::size_t dw = col(probe, "pressure_downwind");
  EXPECT_NEAR(rows.back().values[dw], 101330.0, 1.0);
}
