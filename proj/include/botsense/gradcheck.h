#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "botsense/layers.h"

namespace botsense {

struct GradCheckOptions {
  double tolerance = 1e-4;
  double h = 1e-5;
  bool check_input = true;
  bool train_mode = true;
  std::uint64_t seed = 7;
  // Negates every analytic gradient after backward. Negative control for
  // the checker itself.
  bool corrupt_backward = false;
};

struct GradCheckEntry {
  std::string name;
  std::size_t count = 0;
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::vector<std::string> failures;  // names of offending tensors

  std::string summary() const;
};

// Adds scale * N(0,1) to every parameter. Freshly initialized nets have zero
// biases, which can park a ReLU exactly on its kink where the numeric and
// analytic derivatives legitimately disagree.
void perturb_params(Layer<double>& net, double scale, std::uint64_t seed);

// |a - n| / max(|a|, |n|, 1e-6).
double relative_error(double analytic, double numeric);

// Compares backward against central differences of L = sum(r * net(x)) for
// a fixed random projection r. Dropout is reseeded before every forward so
// masks are identical; running statistics are restored afterwards.
GradCheckReport grad_check(Layer<double>& net, const Tensor<double>& input, const GradCheckOptions& options = {});

}  // namespace botsense
