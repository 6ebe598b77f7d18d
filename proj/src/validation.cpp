#include "validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "error.hpp"
#include "numfmt.hpp"
#include "stats.hpp"

namespace chambersim {

void ValidationSpec::validate() const {
  if (N < 2) throw RangeError("validation needs N >= 2");
  if (!(alpha > 0 && alpha < 1)) throw RangeError("alpha must be in (0, 1)");
  if (!(T >= 0)) throw RangeError("T must be nonnegative");
  if (x_A.size() != x_B.size()) throw RangeError("x_A and x_B must assign the same variables");
  std::size_t differing = 0;
  for (std::size_t k = 0; k < x_A.size(); ++k) {
    if (x_A[k].first != x_B[k].first)
      throw RangeError("x_A and x_B must list variables in the same order");
    if (x_A[k].second != x_B[k].second) {
      if (x_A[k].first != edge.from)
        throw RangeError("x_A and x_B differ at " + x_A[k].first + ", not only at the source");
      ++differing;
    }
    if (x_A[k].first == edge.to) throw RangeError("assignments must not include the target");
  }
  if (differing != 1) throw RangeError("x_A and x_B must differ at the source " + edge.from);
}

ValidationSpec make_validation_spec(Config config, const Edge& edge, std::size_t N,
                                    double alpha, double T, std::optional<double> x_a,
                                    std::optional<double> x_b) {
  const ChamberVariable* src = find_variable(config, edge.from);
  const ChamberVariable* dst = find_variable(config, edge.to);
  if (!src) throw NotFoundError("unknown variable '" + edge.from + "'");
  if (!dst) throw NotFoundError("unknown variable '" + edge.to + "'");
  if (edge.from == edge.to) throw RangeError("source and target must differ");
  if (!src->settable() && src->column_type == ColumnType::path)
    throw RangeError("cannot intervene on " + src->id);

  ValidationSpec spec;
  spec.edge = edge;
  spec.N = N;
  spec.alpha = alpha;
  spec.T = T;
  const double lo = x_a.value_or(src->contrast_lo);
  const double hi = x_b.value_or(src->contrast_hi);
  for (const auto* v : config_variables(config)) {
    if (v->id == edge.to) continue;
    if (v->id == edge.from) {
      spec.x_A.emplace_back(v->id, lo);
      spec.x_B.emplace_back(v->id, hi);
    } else if (v->settable()) {
      spec.x_A.emplace_back(v->id, v->baseline);
      spec.x_B.emplace_back(v->id, v->baseline);
    }
  }
  spec.validate();
  return spec;
}

ValidationResult validate_edge(const ValidationSpec& spec, Engine& engine, Stream& rng,
                               bool exact_p) {
  spec.validate();
  const auto& cols = engine.columns();
  const auto it = std::find(cols.begin(), cols.end(), spec.edge.to);
  if (it == cols.end()) throw NotFoundError("engine has no column " + spec.edge.to);
  const auto j = static_cast<std::size_t>(it - cols.begin());

  // Coins and waits are drawn up front, so the schedule is a function of the
  // stream alone.
  std::vector<bool> arm_b(spec.N);
  std::vector<double> idle(spec.N);
  for (std::size_t n = 0; n < spec.N; ++n) {
    arm_b[n] = rng.bernoulli(0.5);
    idle[n] = rng.uniform(1e-3, 1.0);
  }

  ValidationResult res;
  for (std::size_t n = 0; n < spec.N; ++n) {
    engine.wait(idle[n]);
    engine.intervene(arm_b[n] ? spec.x_B : spec.x_A);
    engine.wait(spec.T);
    const double y = engine.measure().values[j];
    (arm_b[n] ? res.samples_B : res.samples_A).push_back(y);
  }
  if (res.samples_A.empty() || res.samples_B.empty()) {
    res.underpowered = true;
    res.p_value = 1.0;
    return res;
  }
  const TestResult t = exact_p ? ks_two_sample_exact(res.samples_A, res.samples_B)
                               : ks_two_sample(res.samples_A, res.samples_B);
  res.ks_statistic = t.statistic;
  res.p_value = t.p_value;
  res.rejected = t.p_value <= spec.alpha;
  return res;
}

std::uint64_t edge_seed(std::uint64_t seed, const Edge& edge, std::size_t run) {
  return substream_key(seed, hash_id(edge.from + ">" + edge.to), run);
}

namespace {

Params validation_params(Config config, Params params) {
  // Hold the controller at ambient so both arms of an override pull apart.
  if (config == Config::wt_pressure_control && !params.engine.pid_target)
    params.engine.pid_target = params.pressure.P_amb;
  return params;
}

EdgeReport run_one(Config config, const Params& params, const EdgeRequest& req,
                   std::size_t run, const ValidationOptions& o) {
  EdgeReport rep;
  rep.edge = req.edge;
  rep.run = run;
  rep.T = o.T;
  rep.N = o.N;
  rep.alpha = o.alpha;
  try {
    ValidationSpec spec =
        make_validation_spec(config, req.edge, o.N, o.alpha, o.T, req.x_a, req.x_b);
    for (const auto& [id, v] : spec.x_A)
      if (id == req.edge.from) rep.x_a = v;
    for (const auto& [id, v] : spec.x_B)
      if (id == req.edge.from) rep.x_b = v;
    const std::uint64_t s = edge_seed(o.seed, req.edge, run);
    Engine engine(config, params, o.fidelity, s);
    Stream rng(s, "validation", 0);
    ValidationResult r = validate_edge(spec, engine, rng, o.exact_p);
    rep.D = r.ks_statistic;
    rep.p = r.p_value;
    rep.rejected = r.rejected;
    rep.underpowered = r.underpowered;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

}  // namespace

std::vector<EdgeReport> validate_edges(Config config, const Params& params_in,
                                       const std::vector<EdgeRequest>& requests,
                                       const ValidationOptions& o) {
  const Params params = validation_params(config, params_in);
  const std::size_t runs = std::max<std::size_t>(1, o.runs);
  const std::size_t total = requests.size() * runs;
  std::vector<EdgeReport> out(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < total;)
      out[k] = run_one(config, params, requests[k / runs], k % runs, o);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(total)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::stable_sort(out.begin(), out.end(), [](const EdgeReport& a, const EdgeReport& b) {
    if (a.edge != b.edge) return a.edge < b.edge;
    return a.run < b.run;
  });
  return out;
}

std::string validation_report_csv(const std::vector<EdgeReport>& reports, const Params& params) {
  std::string out;
  if (params.engine.drift_sigma > 0)
    out += "# ambient pressure drift enabled (engine.drift_sigma = " +
           format_number(params.engine.drift_sigma) +
           "); the level guarantee of the procedure does not hold\n";
  out += "edge,x_A,x_B,T,N,alpha,D,p,rejected\n";
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    out += r.edge.from + "->" + r.edge.to + ",";
    append_number(out, r.x_a);
    out += ',';
    append_number(out, r.x_b);
    out += ',';
    append_number(out, r.T);
    out += "," + std::to_string(r.N) + ",";
    append_number(out, r.alpha);
    if (r.underpowered) {
      out += ",,,underpowered\n";
      continue;
    }
    out += ',';
    append_number(out, r.D);
    out += ',';
    append_number(out, r.p);
    out += r.rejected ? ",true\n" : ",false\n";
  }
  return out;
}

std::vector<Edge> curated_non_edges(Config config) {
  if (chamber_of(config) == Chamber::light_tunnel)
    return {{"red", "angle_1"},     {"pol_1", "ir_1"},      {"pol_2", "vis_2"},
            {"l_11", "ir_2"},       {"l_21", "vis_3"},      {"diode_ir_1", "ir_2"},
            {"t_vis_2", "vis_1"},   {"osr_c", "angle_2"},   {"v_angle_1", "current"},
            {"blue", "angle_2"}};
  return {{"pot_2", "signal_1"},         {"pot_1", "pressure_downwind"},
          {"res_in", "rpm_out"},         {"osr_1", "signal_2"},
          {"hatch", "current_in"},       {"v_mic", "signal_1"},
          {"osr_upwind", "pressure_downwind"}, {"load_in", "signal_1"}};
}

LevelResult level_test(Config config, const Params& params, const Edge& non_edge,
                       std::size_t runs, const ValidationOptions& options) {
  ValidationOptions o = options;
  o.runs = runs;
  const auto reports = validate_edges(config, params, {{non_edge, {}, {}}}, o);
  LevelResult lr;
  lr.edge = non_edge;
  for (const auto& r : reports) {
    if (!r.error.empty()) throw Error(ErrorCode::invalid_argument, r.error);
    ++lr.runs;
    if (r.rejected) ++lr.rejections;
  }
  lr.rate = lr.runs ? static_cast<double>(lr.rejections) / lr.runs : 0.0;
  const double a = o.alpha;
  lr.bound = a + 3.0 * std::sqrt(a * (1 - a) / static_cast<double>(lr.runs));
  return lr;
}

}  // namespace chambersim
