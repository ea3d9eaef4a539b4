#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rnforms/linalg.hpp"

namespace rnforms::cli {

enum class OutputFormat { Human, Json, Csv };

struct RunConfig {
    ToleranceConfig tol;
    OutputFormat format = OutputFormat::Human;
    /// Tables (demo, truncate) default to CSV unless a format is given.
    bool format_explicit = false;
    std::uint64_t seed = 20240611;
};

/// Exit codes: 0 success, 1 mathematical negative (witness printed),
/// 2 malformed input or usage error.
enum ExitCode : int { kOk = 0, kDomainNegative = 1, kBadInput = 2 };

/// Runs the command line in @p args (without the program name).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rnforms::cli
