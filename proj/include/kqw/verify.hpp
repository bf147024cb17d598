#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kqw {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle suite: closed-form spectra, particle-hole identities, the
/// tight-binding Landauer reduction and the steady-limit residue formula.
std::vector<CheckResult> run_verification(int threads = 1, std::uint64_t seed = 20240611);

}  // namespace kqw
