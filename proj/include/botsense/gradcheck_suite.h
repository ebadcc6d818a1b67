#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "botsense/gradcheck.h"

namespace botsense {

struct GradCheckCase {
  std::string name;
  int seeds = 0;
  double max_rel_err = 0.0;
  bool passed = true;
  std::vector<std::string> failures;  // "seed <s>: <tensor>"
};

struct GradCheckSuiteReport {
  std::vector<GradCheckCase> cases;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  double wall_seconds = 0.0;

  std::string summary() const;
};

struct GradCheckSuiteOptions {
  double tolerance = 1e-4;
  int seeds = 5;
  // Forwarded to GradCheckOptions::corrupt_backward.
  bool corrupt = false;
};

// Every layer type plus the micro-scale topology of each model variant
// (R=8, T=2), in 64-bit precision.
GradCheckSuiteReport run_gradcheck_suite(const GradCheckSuiteOptions& options = {});

}  // namespace botsense
