#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minimax/complexity.hpp"
#include "minimax/harness.hpp"
#include "minimax/kvdoc.hpp"
#include "minimax/verify.hpp"

namespace minimax::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2, kInvariantFailure = 3 };

struct KeyInfo {
  std::string key;
  std::string fallback;
  std::string help;
};

/// Every config key a command accepts, with its default.
const std::vector<KeyInfo>& run_keys();
const std::vector<KeyInfo>& sweep_keys();
const std::vector<KeyInfo>& verify_keys();
const std::vector<KeyInfo>& prox_check_keys();

/// Config file (if any), then each override, then --seed. Throws
/// ValidationError naming an unknown key and its nearest valid key.
KeyValueDoc load_config(const std::vector<KeyInfo>& keys, const std::optional<std::string>& path,
                        const std::vector<std::string>& overrides, const std::optional<std::uint64_t>& seed);

RunSpec run_spec_from(const KeyValueDoc& doc);
SweepSpec sweep_spec_from(const KeyValueDoc& doc);
VerifySpec verify_spec_from(const KeyValueDoc& doc);

/// Entry point for the minimax-kit executable; returns the exit code.
int main(int argc, const char* const* argv);

}  // namespace minimax::cli
