// `curvkit` command-line front end, callable in-process for tests.
#ifndef CURVKIT_TOOLS_CLI_HPP
#define CURVKIT_TOOLS_CLI_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvkit/claims.hpp"

namespace curvkit::cli {

enum ExitCode : int {
  kOk = 0,
  kClaimFailed = 1,  // verify-paper only; also unexpected engine errors
  kUsage = 2,
  kParse = 3,
  kDegenerate = 4,
  kEmptyGrid = 5,
  kFileNotFound = 6,
};

struct Hooks {
  /// Extra criterion-13 suites for verify-paper.
  std::vector<PropertyCheck> extra_properties;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace curvkit::cli

#endif  // CURVKIT_TOOLS_CLI_HPP
