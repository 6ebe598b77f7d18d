#include "protocol.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace {

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void expect_arity(std::size_t line, const std::vector<std::string_view>& f, std::size_t n,
                  const char* usage) {
  if (f.size() != n) throw ParseError(line, std::string("expected ") + usage);
}

double number_at(std::size_t line, std::string_view tok) {
  auto v = parse_number(tok);
  if (!v) throw ParseError(line, "malformed number '" + std::string(tok) + "'");
  return *v;
}

}  // namespace

std::optional<std::uint64_t> Protocol::seed() const {
  for (const auto& ins : instructions)
    if (const auto* s = std::get_if<SeedInstr>(&ins)) return s->seed;
  return std::nullopt;
}

double max_frequency(Chamber chamber) {
  return chamber == Chamber::light_tunnel ? 10.0 : 7.0;
}

void check_assignment(Config config, std::string_view id, double value) {
  const ChamberVariable* v = find_variable(config, id);
  if (!v)
    throw NotFoundError("unknown variable '" + std::string(id) + "' for " +
                        std::string(to_string(config)));
  if (!v->settable()) throw RangeError("cannot SET sensor variable " + v->id);
  if (!v->range.contains(value))
    throw RangeError("value " + format_number(value) + " for " + v->id + " outside " +
                     v->range.describe());
}

Protocol parse_protocol(std::string_view text) {
  Protocol p;
  bool have_header = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto f = fields_of(line);

    if (!have_header) {
      if (f[0] != "CHAMBER" || f.size() != 3)
        throw ParseError(lineno, "expected header 'CHAMBER,<lt|wt>,<config>'");
      auto cfg = config_from_parts(f[1], f[2]);
      if (!cfg)
        throw ParseError(lineno, "unknown chamber configuration '" + std::string(f[1]) + "," +
                                     std::string(f[2]) + "'");
      p.config = *cfg;
      have_header = true;
      continue;
    }

    const std::string_view op = f[0];
    if (op == "SEED") {
      expect_arity(lineno, f, 2, "SEED,<u64>");
      if (!p.instructions.empty()) throw ParseError(lineno, "SEED must be the first instruction");
      auto s = parse_unsigned(f[1]);
      if (!s) throw ParseError(lineno, "malformed seed '" + std::string(f[1]) + "'");
      p.instructions.emplace_back(SeedInstr{*s});
    } else if (op == "SET") {
      expect_arity(lineno, f, 3, "SET,<variable>,<value>");
      const double value = number_at(lineno, f[2]);
      try {
        check_assignment(p.config, f[1], value);
      } catch (const Error& e) {
        throw ParseError(lineno, e.what());
      }
      p.instructions.emplace_back(SetInstr{std::string(f[1]), value});
    } else if (op == "WAIT") {
      expect_arity(lineno, f, 2, "WAIT,<ms>");
      const double ms = number_at(lineno, f[1]);
      if (ms < 0) throw ParseError(lineno, "WAIT duration must be nonnegative");
      p.instructions.emplace_back(WaitInstr{ms});
    } else if (op == "MSR") {
      expect_arity(lineno, f, 3, "MSR,<count>,<hz>");
      auto n = parse_integer(f[1]);
      if (!n) throw ParseError(lineno, "malformed count '" + std::string(f[1]) + "'");
      if (*n < 1) throw ParseError(lineno, "MSR count must be at least 1");
      const double hz = number_at(lineno, f[2]);
      if (!(hz > 0)) throw ParseError(lineno, "frequency must be positive");
      const double limit = max_frequency(chamber_of(p.config));
      if (hz > limit)
        throw ParseError(lineno, "frequency " + format_number(hz) + " exceeds " +
                                     format_number(limit) + " Hz limit");
      p.instructions.emplace_back(MsrInstr{*n, hz});
    } else if (op == "CHAMBER") {
      throw ParseError(lineno, "duplicate CHAMBER header");
    } else {
      throw ParseError(lineno, "unknown instruction '" + std::string(op) + "'");
    }
  }
  if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing CHAMBER header");
  if (p.instructions.empty()) throw ParseError(lineno, "protocol has no instructions");
  return p;
}

Protocol load_protocol_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open protocol file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_protocol(ss.str());
}

std::string serialize_protocol(const Protocol& p) {
  std::string out = "CHAMBER,";
  out += chamber_code(chamber_of(p.config));
  out += ',';
  out += variant_name(p.config);
  out += '\n';
  for (const auto& ins : p.instructions) {
    if (const auto* s = std::get_if<SeedInstr>(&ins)) {
      out += "SEED," + std::to_string(s->seed);
    } else if (const auto* s = std::get_if<SetInstr>(&ins)) {
      out += "SET," + s->variable + ",";
      append_number(out, s->value);
    } else if (const auto* w = std::get_if<WaitInstr>(&ins)) {
      out += "WAIT,";
      append_number(out, w->ms);
    } else if (const auto* m = std::get_if<MsrInstr>(&ins)) {
      out += "MSR," + std::to_string(m->count) + ",";
      append_number(out, m->hz);
    }
    out += '\n';
  }
  return out;
}

}  // namespace chambersim
