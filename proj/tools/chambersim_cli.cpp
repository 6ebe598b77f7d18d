// chambersim: run protocols, validate edges, evaluate models, export graphs.
//
// Exit codes: 0 success; 1 bad input (parse, range, unknown names, nothing to
// validate); 2 I/O failure; 3 internal or numeric failure.

#include <chambersim.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

struct Failure {
  int code;
};

int exit_code(cs_status s) {
  switch (s) {
    case CS_OK: return 0;
    case CS_ERR_IO: return kExitIo;
    case CS_ERR_NUMERIC:
    case CS_ERR_INTERNAL: return kExitInternal;
    default: return kExitInput;
  }
}

void check(cs_status s, const std::string& context = {}) {
  if (s == CS_OK) return;
  std::cerr << "error: " << (context.empty() ? "" : context + ": ") << cs_last_error_message()
            << '\n';
  throw Failure{exit_code(s)};
}

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "error: " << msg << '\n';
  throw Failure{code};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) die(kExitIo, "cannot write " + path);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cs_string_free(s);
  return out;
}

struct ParamsHandle {
  cs_params* p = nullptr;
  ~ParamsHandle() { cs_params_free(p); }
};

void load_params(ParamsHandle& h, const std::string& path, const std::vector<std::string>& sets) {
  if (path.empty())
    check(cs_params_default(&h.p));
  else
    check(cs_params_load(path.c_str(), &h.p), path);
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) die(kExitInput, "--set expects key=value, got '" + kv + "'");
    check(cs_params_set(h.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- run ----

struct RunArgs {
  std::string protocol, dir, name, params, fidelity = "steady_state";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  cs_protocol* proto = nullptr;
  const std::string text = read_file(a.protocol);
  check(cs_protocol_parse(text.c_str(), &proto), a.protocol);
  std::unique_ptr<cs_protocol, void (*)(cs_protocol*)> proto_guard(proto, cs_protocol_free);

  ParamsHandle params;
  load_params(params, a.params, a.sets);

  cs_run_options opts;
  cs_run_options_init(&opts);
  opts.fidelity = a.fidelity.c_str();
  if (a.seed) {
    opts.has_seed = 1;
    opts.seed = *a.seed;
  }
  cs_run* run = nullptr;
  check(cs_run_create(proto, params.p, &opts, &run));
  std::unique_ptr<cs_run, void (*)(cs_run*)> run_guard(run, cs_run_free);

  std::error_code ec;
  std::filesystem::create_directories(a.dir, ec);
  if (ec) die(kExitIo, "cannot create " + a.dir + ": " + ec.message());
  size_t rows = 0;
  check(cs_run_write(run, a.dir.c_str(), a.name.c_str(), &rows));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << rows << " rows written to "
            << (std::filesystem::path(a.dir) / (a.name + ".csv")).string() << " in " << fmt(secs)
            << " s\n";
  return 0;
}

// ---- validate ----

struct ValidateArgs {
  std::string config, edges, out, params, fidelity = "steady_state";
  std::vector<std::string> sets;
  bool all = false, non_edges = false, exact = false;
  size_t N = 100, runs = 1;
  double alpha = 0.01, T = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int cmd_validate(const ValidateArgs& a) {
  ParamsHandle params;
  load_params(params, a.params, a.sets);

  std::string edges_text;
  const char* edges = nullptr;
  if (a.non_edges) {
    char* s = nullptr;
    check(cs_non_edges(a.config.c_str(), &s));
    edges_text = take(s);
    edges = edges_text.c_str();
  } else if (!a.all) {
    edges_text = read_file(a.edges);
    edges = edges_text.c_str();
  }

  cs_validate_options o;
  cs_validate_options_init(&o);
  o.N = a.N;
  o.alpha = a.alpha;
  o.T = a.T;
  o.fidelity = a.fidelity.c_str();
  o.seed = a.seed;
  o.runs = a.runs;
  o.threads = a.threads;
  o.exact_p = a.exact ? 1 : 0;

  char* report = nullptr;
  char* warnings = nullptr;
  cs_validate_summary s{};
  check(cs_validate(a.config.c_str(), params.p, edges, &o, &report, &warnings, &s));
  const std::string rep = take(report);
  const std::string warn = take(warnings);
  if (!warn.empty()) {
    std::istringstream in(warn);
    for (std::string line; std::getline(in, line);) std::cerr << "warning: " << line << '\n';
  }
  if (s.skipped == s.requested) die(kExitInput, "no edge could be validated");
  write_output(a.out, rep);

  const size_t decided = s.tested;
  std::cerr << s.requested - s.skipped << " edges, " << decided << " tests, " << s.rejected
            << " rejected at alpha " << fmt(a.alpha) << " (rejection fraction "
            << fmt(decided ? static_cast<double>(s.rejected) / decided : 0.0) << ")";
  if (s.underpowered) std::cerr << ", " << s.underpowered << " underpowered";
  std::cerr << '\n';
  return 0;
}

// ---- models ----

struct ModelsArgs {
  std::string model, data, target, params;
  std::vector<std::string> grid, sets;
  bool csv = false;
};

int cmd_models(const ModelsArgs& a) {
  ParamsHandle params;
  load_params(params, a.params, a.sets);
  if (a.data.empty()) {
    std::vector<const char*> axes;
    for (const auto& g : a.grid) axes.push_back(g.c_str());
    char* csv = nullptr;
    check(cs_model_table(a.model.c_str(), axes.data(), axes.size(), params.p, &csv));
    std::cout << take(csv);
    return 0;
  }
  std::filesystem::path path(a.data);
  if (path.extension() != ".csv") path += ".csv";
  const std::string dir = path.parent_path().empty() ? "." : path.parent_path().string();
  const std::string name = path.stem().string();
  cs_model_fit fit{};
  check(cs_model_compare(a.model.c_str(), dir.c_str(), name.c_str(),
                         a.target.empty() ? nullptr : a.target.c_str(), params.p, &fit));
  const bool e1 = a.model == "E1";
  if (a.csv) {
    std::cout << "model,n,rmse,r2" << (e1 ? ",beta0,beta1" : "") << '\n';
    std::cout << a.model << ',' << fit.n << ',' << fit.rmse << ',' << fit.r2;
    if (e1) std::cout << ',' << fit.beta0 << ',' << fit.beta1;
    std::cout << '\n';
  } else {
    std::cout << "model " << a.model << " vs " << path.string() << ": n=" << fit.n
              << " RMSE=" << fmt(fit.rmse) << " R^2=" << fmt(fit.r2);
    if (e1) std::cout << " beta0=" << fmt(fit.beta0) << " beta1=" << fmt(fit.beta1);
    std::cout << '\n';
  }
  return 0;
}

// ---- graph ----

struct GraphArgs {
  std::string config, out, score;
  bool csv = false;
};

int cmd_graph(const GraphArgs& a) {
  if (a.score.empty()) {
    char* csv = nullptr;
    check(cs_graph_export(a.config.c_str(), &csv));
    write_output(a.out, take(csv));
    return 0;
  }
  const std::string est = read_file(a.score);
  double precision = 0, recall = 0;
  check(cs_graph_score(a.config.c_str(), est.c_str(), &precision, &recall), a.score);
  if (a.csv)
    std::cout << "precision,recall\n" << precision << ',' << recall << '\n';
  else
    std::cout << "precision " << fmt(precision) << ", recall " << fmt(recall) << '\n';
  return 0;
}

// ---- params ----

int cmd_params(const std::string& path, const std::vector<std::string>& sets) {
  ParamsHandle params;
  load_params(params, path, sets);
  char* s = nullptr;
  check(cs_params_dump(params.p, &s));
  std::cout << take(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual light-tunnel and wind-tunnel chambers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs_version()));

  const std::vector<std::string> configs{"lt_standard", "lt_camera", "wt_standard",
                                         "wt_pressure_control"};
  const std::vector<std::string> fidelities{"steady_state", "dynamic"};

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Execute a protocol and write the experiment CSV");
  run->add_option("protocol", ra.protocol, "Protocol file")->required();
  run->add_option("out_dir", ra.dir, "Output directory")->required();
  run->add_option("name", ra.name, "Experiment name")->required();
  run->add_option("--seed", ra.seed, "Seed (overrides the protocol's SEED)");
  run->add_option("--fidelity", ra.fidelity)->check(CLI::IsMember(fidelities));
  run->add_option("--params", ra.params, "Parameter file");
  run->add_option("--set", ra.sets, "Parameter override key=value (repeatable)");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Test edges with the randomized KS procedure");
  val->add_option("--config", va.config)->required()->check(CLI::IsMember(configs));
  auto* edges_opt = val->add_option("--edges", va.edges, "CSV from,to[,x_A,x_B]");
  auto* all_opt = val->add_flag("--all", va.all, "Every ground-truth edge");
  auto* ne_opt = val->add_flag("--non-edges", va.non_edges, "The curated non-edge list");
  edges_opt->excludes(all_opt)->excludes(ne_opt);
  all_opt->excludes(ne_opt);
  val->add_option("--N", va.N)->check(CLI::Range(2, 100000000));
  val->add_option("--alpha", va.alpha)->check(CLI::Range(0.0, 1.0));
  val->add_option("--T", va.T)->check(CLI::NonNegativeNumber);
  val->add_option("--out", va.out, "Report path (stdout when omitted)");
  val->add_option("--seed", va.seed);
  val->add_option("--params", va.params);
  val->add_option("--set", va.sets, "Parameter override key=value (repeatable)");
  val->add_option("--runs", va.runs, "Repeat each edge with independent seeds")
      ->check(CLI::PositiveNumber);
  val->add_option("--threads", va.threads)->check(CLI::PositiveNumber);
  val->add_option("--fidelity", va.fidelity)->check(CLI::IsMember(fidelities));
  val->add_flag("--exact", va.exact, "Exact permutation p-values (n, m <= 20)");

  ModelsArgs ma;
  auto* mod = app.add_subcommand("models", "Tabulate a mechanistic model or score it on data");
  mod->add_option("--model", ma.model)->required();
  mod->add_option("--grid", ma.grid, "var=start:stop:step, var=value or var=v1,v2");
  mod->add_option("--data", ma.data, "Experiment CSV to compare against");
  mod->add_option("--target", ma.target, "Column to compare (E1: ir_3 by default)");
  mod->add_option("--params", ma.params);
  mod->add_option("--set", ma.sets, "Parameter override key=value (repeatable)");
  mod->add_flag("--csv", ma.csv, "CSV output");

  GraphArgs ga;
  auto* gr = app.add_subcommand("graph", "Export or score against a ground-truth graph");
  gr->add_option("--config", ga.config)->required()->check(CLI::IsMember(configs));
  gr->add_option("--out", ga.out);
  gr->add_option("--score", ga.score, "Estimated edge CSV to score");
  gr->add_flag("--csv", ga.csv, "CSV output");

  std::string pp;
  std::vector<std::string> psets;
  auto* par = app.add_subcommand("params", "Print the effective parameters");
  par->add_option("--params", pp);
  par->add_option("--set", psets, "Parameter override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*val) {
      if (!va.all && !va.non_edges && va.edges.empty())
        die(kExitInput, "validate needs --edges, --all or --non-edges");
      return cmd_validate(va);
    }
    if (*mod) return cmd_models(ma);
    if (*gr) return cmd_graph(ga);
    if (*par) return cmd_params(pp, psets);
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
