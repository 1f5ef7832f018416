// Prints one line per acceptance criterion and exits nonzero if any fails.
//
//   acceptance                 all criteria
//   acceptance --criterion 7   one criterion
//   acceptance -v              with every individual check
#include <CLI11.hpp>

#include <iostream>

#include "curvkit/claims.hpp"
#include "oracles.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  bool verbose = false;
  app.add_option("--criterion", criterion, "criterion number (default: all)")
      ->check(CLI::Range(1, curvkit::kCriterionCount));
  app.add_flag("-v,--verbose", verbose, "print every check");
  CLI11_PARSE(app, argc, argv);

  curvkit::ClaimOptions options;
  options.extra_properties = curvkit::oracle::property_checks();

  std::vector<curvkit::ClaimResult> results;
  if (criterion)
    results.push_back(curvkit::run_criterion(criterion, options));
  else
    results = curvkit::run_all(options);

  bool failed = false;
  for (const auto& r : results) {
    std::cout << curvkit::summary_line(r) << "\n";
    for (const auto& d : r.details)
      if (verbose || d.rfind("[ok]", 0) != 0) std::cout << "    " << d << "\n";
    failed = failed || r.status == curvkit::ClaimStatus::fail;
  }
  return failed ? 1 : 0;
}
