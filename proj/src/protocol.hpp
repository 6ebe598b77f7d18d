#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "variables.hpp"

namespace chambersim {

struct SetInstr {
  std::string variable;
  double value = 0.0;
  bool operator==(const SetInstr&) const = default;
};

struct WaitInstr {
  double ms = 0.0;
  bool operator==(const WaitInstr&) const = default;
};

struct MsrInstr {
  std::int64_t count = 1;
  double hz = 1.0;
  bool operator==(const MsrInstr&) const = default;
};

struct SeedInstr {
  std::uint64_t seed = 0;
  bool operator==(const SeedInstr&) const = default;
};

using Instruction = std::variant<SetInstr, WaitInstr, MsrInstr, SeedInstr>;

struct Protocol {
  Config config = Config::wt_standard;
  std::vector<Instruction> instructions;

  std::optional<std::uint64_t> seed() const;
  bool operator==(const Protocol&) const = default;
};

/// Highest MSR rate: 10 Hz for the light tunnel, 7 Hz for the wind tunnel.
double max_frequency(Chamber chamber);

/// Throws RangeError / NotFoundError with a message naming the variable when
/// `id = value` is not a legal protocol assignment in `config`.
void check_assignment(Config config, std::string_view id, double value);

/// Never aborts; every failure is a ParseError carrying a 1-based line.
Protocol parse_protocol(std::string_view text);
Protocol load_protocol_file(const std::string& path);
std::string serialize_protocol(const Protocol& p);

}  // namespace chambersim
