#include "chambersim.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "dataset.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "model_eval.hpp"
#include "numfmt.hpp"
#include "params.hpp"
#include "protocol.hpp"
#include "stats.hpp"
#include "validation.hpp"

struct cs_params {
  chambersim::Params value;
};

struct cs_protocol {
  chambersim::Protocol value;
};

struct cs_run {
  std::unique_ptr<chambersim::ProtocolRun> run;
  chambersim::Config config;
  chambersim::MeasurementRow row;
};

namespace {

using namespace chambersim;

thread_local std::string g_last_error;
thread_local std::size_t g_last_line = 0;

cs_status code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return CS_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return CS_ERR_PARSE;
    case ErrorCode::range: return CS_ERR_RANGE;
    case ErrorCode::io: return CS_ERR_IO;
    case ErrorCode::not_found: return CS_ERR_NOT_FOUND;
    case ErrorCode::numeric: return CS_ERR_NUMERIC;
    case ErrorCode::underpowered: return CS_ERR_UNDERPOWERED;
  }
  return CS_ERR_INTERNAL;
}

cs_status fail(cs_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
cs_status guarded(F&& f) {
  g_last_error.clear();
  g_last_line = 0;
  try {
    f();
    return CS_OK;
  } catch (const ParseError& e) {
    g_last_line = e.line();
    return fail(CS_ERR_PARSE, e.what());
  } catch (const Error& e) {
    return fail(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CS_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

Params params_or_default(const cs_params* p) { return p ? p->value : Params{}; }

ValidationOptions to_options(const cs_validate_options* in) {
  cs_validate_options d;
  cs_validate_options_init(&d);
  if (!in) in = &d;
  ValidationOptions o;
  o.N = in->N;
  o.alpha = in->alpha;
  o.T = in->T;
  o.fidelity = in->fidelity ? parse_fidelity(in->fidelity) : Fidelity::steady_state;
  o.seed = in->seed;
  o.runs = in->runs;
  o.threads = in->threads;
  o.exact_p = in->exact_p != 0;
  return o;
}

}  // namespace

extern "C" {

const char* cs_version(void) { return "0.1.0"; }

const char* cs_status_string(cs_status status) {
  switch (status) {
    case CS_OK: return "ok";
    case CS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CS_ERR_PARSE: return "parse error";
    case CS_ERR_RANGE: return "out of range";
    case CS_ERR_IO: return "I/O error";
    case CS_ERR_NOT_FOUND: return "not found";
    case CS_ERR_NUMERIC: return "numeric error";
    case CS_ERR_UNDERPOWERED: return "underpowered";
    case CS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cs_last_error_message(void) { return g_last_error.c_str(); }
size_t cs_last_error_line(void) { return g_last_line; }
void cs_string_free(char* s) { std::free(s); }

cs_status cs_params_default(cs_params** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cs_params{Params{}};
  });
}

cs_status cs_params_parse(const char* text, cs_params** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cs_params{parse_params(text)};
  });
}

cs_status cs_params_load(const char* path, cs_params** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cs_params{load_params_file(path)};
  });
}

cs_status cs_params_set(cs_params* params, const char* key, const char* value) {
  return guarded([&] {
    require(params, "params");
    require(key, "key");
    require(value, "value");
    // Keep drag_K derived unless it was pinned to something else.
    std::string base;
    std::istringstream in(dump_params(params->value));
    const bool derived = params->value.fan.drag_K == params->value.fan.steady_state_drag();
    for (std::string line; std::getline(in, line);)
      if (!(derived && line.rfind("fan.drag_K", 0) == 0)) base += line + '\n';
    params->value = parse_params(base + key + " = " + value + '\n');
  });
}

cs_status cs_params_dump(const cs_params* params, char** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = dup(dump_params(params->value));
  });
}

void cs_params_free(cs_params* params) { delete params; }

cs_status cs_protocol_parse(const char* text, cs_protocol** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cs_protocol{parse_protocol(text)};
  });
}

cs_status cs_protocol_load(const char* path, cs_protocol** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cs_protocol{load_protocol_file(path)};
  });
}

cs_status cs_protocol_serialize(const cs_protocol* protocol, char** out) {
  return guarded([&] {
    require(protocol, "protocol");
    require(out, "out");
    *out = dup(serialize_protocol(protocol->value));
  });
}

const char* cs_protocol_config(const cs_protocol* protocol) {
  if (!protocol) return "";
  return to_string(protocol->value.config).data();
}

void cs_protocol_free(cs_protocol* protocol) { delete protocol; }

void cs_run_options_init(cs_run_options* options) {
  if (!options) return;
  options->fidelity = nullptr;
  options->has_seed = 0;
  options->seed = 0;
  options->render_images = 0;
}

cs_status cs_run_create(const cs_protocol* protocol, const cs_params* params,
                        const cs_run_options* options, cs_run** out) {
  return guarded([&] {
    require(protocol, "protocol");
    require(out, "out");
    cs_run_options o;
    cs_run_options_init(&o);
    if (options) o = *options;
    const Fidelity f = o.fidelity ? parse_fidelity(o.fidelity) : Fidelity::steady_state;
    std::optional<std::uint64_t> seed;
    if (o.has_seed) seed = o.seed;
    auto r = std::make_unique<cs_run>();
    r->config = protocol->value.config;
    r->run = std::make_unique<ProtocolRun>(protocol->value, params_or_default(params), f, seed);
    r->run->engine().set_render_images(o.render_images != 0);
    *out = r.release();
  });
}

size_t cs_run_column_count(const cs_run* run) { return run ? run->run->columns().size() : 0; }

const char* cs_run_column_name(const cs_run* run, size_t index) {
  if (!run || index >= run->run->columns().size()) return nullptr;
  return run->run->columns()[index].c_str();
}

cs_status cs_run_next(cs_run* run, cs_row* row, int* has_row) {
  return guarded([&] {
    require(run, "run");
    require(row, "row");
    require(has_row, "has_row");
    if (!run->run->next(run->row)) {
      *has_row = 0;
      return;
    }
    const auto& r = run->row;
    row->timestamp = r.timestamp;
    row->intervention = r.intervention;
    row->n_values = r.values.size();
    row->values = r.values.data();
    row->has_image = r.image ? 1 : 0;
    row->image_width = r.image ? r.image->width : 0;
    row->image_height = r.image ? r.image->height : 0;
    row->image_rgb = r.image ? r.image->rgb.data() : nullptr;
    *has_row = 1;
  });
}

cs_status cs_run_write(cs_run* run, const char* dir, const char* name, size_t* rows_written) {
  return guarded([&] {
    require(run, "run");
    require(dir, "dir");
    require(name, "name");
    if (run->config == Config::lt_camera) run->run->engine().set_render_images(true);
    ExperimentWriter writer(dir, name, run->config);
    while (run->run->next(run->row)) writer.write(run->row);
    const Manifest m = writer.finish();
    if (rows_written) *rows_written = m.rows;
  });
}

void cs_run_free(cs_run* run) { delete run; }

cs_status cs_graph_export(const char* config, char** csv) {
  return guarded([&] {
    require(config, "config");
    require(csv, "csv");
    *csv = dup(export_graph_csv(graph_for(parse_config(config))));
  });
}

cs_status cs_graph_edge_count(const char* config, size_t* count) {
  return guarded([&] {
    require(config, "config");
    require(count, "count");
    *count = graph_for(parse_config(config)).edges().size();
  });
}

cs_status cs_graph_is_acyclic(const char* config, int* acyclic) {
  return guarded([&] {
    require(config, "config");
    require(acyclic, "acyclic");
    *acyclic = graph_for(parse_config(config)).is_acyclic() ? 1 : 0;
  });
}

cs_status cs_graph_score(const char* config, const char* estimate_csv, double* precision,
                         double* recall) {
  return guarded([&] {
    require(config, "config");
    require(estimate_csv, "estimate_csv");
    const auto pr =
        edge_precision_recall(parse_edge_csv(estimate_csv), graph_for(parse_config(config)));
    if (precision) *precision = pr.precision;
    if (recall) *recall = pr.recall;
  });
}

cs_status cs_ks_two_sample(const double* a, size_t n, const double* b, size_t m, int exact,
                           double* statistic, double* p_value) {
  return guarded([&] {
    if (n) require(a, "a");
    if (m) require(b, "b");
    std::vector<double> x(a, a + n), y(b, b + m);
    const TestResult t = exact ? ks_two_sample_exact(x, y) : ks_two_sample(x, y);
    if (statistic) *statistic = t.statistic;
    if (p_value) *p_value = t.p_value;
  });
}

cs_status cs_rank_sum(const double* a, size_t n, const double* b, size_t m, int method,
                      double* statistic, double* p_value) {
  return guarded([&] {
    if (n) require(a, "a");
    if (m) require(b, "b");
    if (method < 0 || method > 2) throw RangeError("rank-sum method must be 0, 1 or 2");
    std::vector<double> x(a, a + n), y(b, b + m);
    const TestResult t = rank_sum(x, y, static_cast<RankSumMethod>(method));
    if (statistic) *statistic = t.statistic;
    if (p_value) *p_value = t.p_value;
  });
}

void cs_validate_options_init(cs_validate_options* options) {
  if (!options) return;
  options->N = 100;
  options->alpha = 0.01;
  options->T = 1.0;
  options->fidelity = nullptr;
  options->seed = 0;
  options->runs = 1;
  options->threads = 1;
  options->exact_p = 0;
}

cs_status cs_validate(const char* config, const cs_params* params, const char* edges_csv,
                      const cs_validate_options* options, char** report, char** warnings,
                      cs_validate_summary* summary) {
  return guarded([&] {
    require(config, "config");
    const Config cfg = parse_config(config);
    const ValidationOptions o = to_options(options);
    std::vector<EdgeRequest> requests;
    if (!edges_csv) {
      for (const auto& e : graph_for(cfg).edges()) requests.push_back({e, {}, {}});
    } else {
      std::vector<std::vector<std::string>> extra;
      const auto edges = parse_edge_csv(edges_csv, &extra);
      for (std::size_t k = 0; k < edges.size(); ++k) {
        EdgeRequest r{edges[k], {}, {}};
        auto cell = [&](std::size_t i) -> std::optional<double> {
          if (extra[k].size() <= i || trim(extra[k][i]).empty()) return std::nullopt;
          auto v = parse_number(extra[k][i]);
          if (!v)
            throw ParseError(0, "malformed contrast value '" + extra[k][i] + "' for " +
                                    edges[k].from + "->" + edges[k].to);
          return v;
        };
        r.x_a = cell(0);
        r.x_b = cell(1);
        requests.push_back(std::move(r));
      }
    }
    if (requests.empty()) throw RangeError("nothing to validate");

    const Params p = params_or_default(params);
    const auto reports = validate_edges(cfg, p, requests, o);
    cs_validate_summary s{};
    s.requested = requests.size();
    std::string warn;
    std::set<Edge> skipped;
    for (const auto& r : reports) {
      if (!r.error.empty()) {
        if (skipped.insert(r.edge).second)
          warn += "skipping " + r.edge.from + "->" + r.edge.to + ": " + r.error + '\n';
        continue;
      }
      if (r.underpowered) {
        ++s.underpowered;
        continue;
      }
      ++s.tested;
      if (r.rejected) ++s.rejected;
    }
    s.skipped = skipped.size();
    if (summary) *summary = s;
    if (report) *report = dup(validation_report_csv(reports, p));
    if (warnings) *warnings = dup(warn);
  });
}

cs_status cs_level_test(const char* config, const cs_params* params, const char* from,
                        const char* to, size_t runs, const cs_validate_options* options,
                        size_t* rejections, double* rate, double* bound) {
  return guarded([&] {
    require(config, "config");
    require(from, "from");
    require(to, "to");
    const LevelResult r = level_test(parse_config(config), params_or_default(params),
                                     Edge{from, to}, runs, to_options(options));
    if (rejections) *rejections = r.rejections;
    if (rate) *rate = r.rate;
    if (bound) *bound = r.bound;
  });
}

cs_status cs_non_edges(const char* config, char** csv) {
  return guarded([&] {
    require(config, "config");
    require(csv, "csv");
    std::string out = "from,to\n";
    for (const auto& e : curated_non_edges(parse_config(config)))
      out += e.from + ',' + e.to + '\n';
    *csv = dup(out);
  });
}

cs_status cs_model_table(const char* model, const char* const* axes, size_t n_axes,
                         const cs_params* params, char** csv) {
  return guarded([&] {
    require(model, "model");
    require(csv, "csv");
    if (n_axes) require(axes, "axes");
    std::vector<GridAxis> grid;
    for (size_t k = 0; k < n_axes; ++k) {
      require(axes[k], "axis");
      grid.push_back(parse_grid_axis(axes[k]));
    }
    *csv = dup(tabulate_model(parse_model(model), grid, params_or_default(params)).to_csv());
  });
}

cs_status cs_model_compare(const char* model, const char* dir, const char* name,
                           const char* target, const cs_params* params, cs_model_fit* fit) {
  return guarded([&] {
    require(model, "model");
    require(dir, "dir");
    require(name, "name");
    require(fit, "fit");
    const ModelId m = parse_model(model);
    const Table t = read_experiment(dir, name);
    const ModelFit f = compare_model(m, t, params_or_default(params), target ? target : "");
    cs_model_fit out{};
    out.n = f.n;
    out.rmse = f.rmse;
    out.r2 = f.r2;
    for (const auto& [k, v] : f.fitted) {
      if (k == "beta0") out.beta0 = v;
      if (k == "beta1") out.beta1 = v;
    }
    *fit = out;
  });
}

}  // extern "C"
