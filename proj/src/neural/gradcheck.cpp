#include "botsense/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "botsense/rng.h"

namespace botsense {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / denom;
}

void perturb_params(Layer<double>& net, double scale, std::uint64_t seed) {
  Rng rng(seed);
  for (Param<double>* p : net.params()) {
    for (double& v : p->value.data) v += scale * standard_normal(rng);
  }
}

std::string GradCheckReport::summary() const {
  std::string s;
  char buf[256];
  for (const GradCheckEntry& e : entries) {
    std::snprintf(buf, sizeof buf, "%-40s n=%-7zu max_rel_err=%.3e %s\n", e.name.c_str(), e.count, e.max_rel_err,
                  e.passed ? "ok" : "FAIL");
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "max_rel_err=%.3e tolerance=%.1e %s", max_rel_err, tolerance,
                passed ? "PASS" : "FAIL");
  s += buf;
  if (!failures.empty()) {
    s += " offending:";
    for (const std::string& f : failures) s += " " + f;
  }
  return s;
}

namespace {

struct Objective {
  Layer<double>& net;
  const Tensor<double>* projection = nullptr;
  const GradCheckOptions& opt;

  double operator()(const Tensor<double>& x) {
    net.reseed(opt.seed);
    const Tensor<double> y = net.forward(x, opt.train_mode);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (*projection)[i] * y[i];
    return s;
  }
};

void record(GradCheckReport& report, GradCheckEntry entry) {
  entry.passed = entry.max_rel_err <= report.tolerance;
  report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
  if (!entry.passed) {
    report.passed = false;
    report.failures.push_back(entry.name);
  }
  report.entries.push_back(std::move(entry));
}

}  // namespace

GradCheckReport grad_check(Layer<double>& net, const Tensor<double>& input, const GradCheckOptions& opt) {
  GradCheckReport report;
  report.tolerance = opt.tolerance;

  std::vector<Tensor<double>> saved_buffers;
  for (Param<double>* b : net.buffers()) saved_buffers.push_back(b->value);

  net.reseed(opt.seed);
  const Tensor<double> y = net.forward(input, opt.train_mode);
  Rng rng(mix_seed(opt.seed, 0x9c));
  Tensor<double> r(y.shape);
  for (double& v : r.data) v = standard_normal(rng);

  net.zero_grad();
  Tensor<double> dx = net.backward(r);
  const double sign = opt.corrupt_backward ? -1.0 : 1.0;

  Objective f{net, &r, opt};
  const double h = opt.h;

  for (Param<double>* p : net.params()) {
    GradCheckEntry e;
    e.name = p->name;
    e.count = p->value.size();
    const Tensor<double> analytic = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value[i];
      p->value[i] = orig + h;
      const double fp = f(input);
      p->value[i] = orig - h;
      const double fm = f(input);
      p->value[i] = orig;
      const double err = relative_error(sign * analytic[i], (fp - fm) / (2.0 * h));
      if (err > e.max_rel_err) {
        e.max_rel_err = err;
        e.worst_index = i;
      }
    }
    record(report, std::move(e));
  }

  if (opt.check_input) {
    GradCheckEntry e;
    e.name = "input";
    e.count = input.size();
    Tensor<double> x = input;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      x[i] = orig + h;
      const double fp = f(x);
      x[i] = orig - h;
      const double fm = f(x);
      x[i] = orig;
      const double err = relative_error(sign * dx[i], (fp - fm) / (2.0 * h));
      if (err > e.max_rel_err) {
        e.max_rel_err = err;
        e.worst_index = i;
      }
    }
    record(report, std::move(e));
  }

  std::vector<Param<double>*> bufs = net.buffers();
  for (std::size_t i = 0; i < bufs.size(); ++i) bufs[i]->value = saved_buffers[i];
  return report;
}

}  // namespace botsense
