#pragma once

#include <string>
#include <vector>

namespace rateq::cli {

/// Dispatches the subcommands (info, region, verify, simulate).
/// Exit codes: 0 success, 1 validation/usage failure, 2 tolerance failure
/// in `verify`.
int run(const std::vector<std::string>& args);

}  // namespace rateq::cli
