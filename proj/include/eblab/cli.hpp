#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eblab {

inline constexpr const char* kVersion = "0.1.0";

namespace cli {

enum ExitCode : int { kOk = 0, kBadInput = 1, kDiverged = 2, kNotApplicable = 3 };

/// Entry point shared by the eblab executable and the tests.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

/// 64-bit FNV-1a, used to fingerprint problem documents in output headers.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cli
}  // namespace eblab
