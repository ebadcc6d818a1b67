#include "botsense/gradcheck_suite.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <sstream>

#include "botsense/model.h"

namespace botsense {

namespace {

Tensor<double> random_tensor(Shape s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<double> t(std::move(s));
  for (double& v : t.data) v = standard_normal(rng);
  return t;
}

void jitter(Param<double>& p, Rng& rng, double scale) {
  for (double& v : p.value.data) v += scale * standard_normal(rng);
}

ModelConfig micro_config(Variant v, std::uint64_t seed) {
  ModelConfig c;
  c.R = 8;
  c.T = 2;
  c.conv_filters = {3, 4};
  c.dense_width = 5;
  c.lstm_units = 4;
  c.head_widths = {4, 3};
  c.dropout = 0.25;
  c.batch_size = 2;
  c.variant = v;
  c.seed = seed;
  return c;
}

std::vector<FeatureSequence> micro_batch(std::uint64_t seed) {
  Rng rng(seed + 40);
  std::vector<FeatureSequence> out;
  for (int i = 0; i < 2; ++i) {
    FeatureSequence s;
    s.T = 2;
    s.R = 8;
    s.label = i;
    s.valid = 2;
    s.spatial.resize(2 * 8 * 8 * kSpatialChannels);
    s.scalars.resize(2 * kScalarFeatures);
    for (float& v : s.spatial) v = bernoulli(rng, 0.2) ? static_cast<float>(uniform01(rng)) : 0.0f;
    for (float& v : s.scalars) v = static_cast<float>(uniform01(rng));
    out.push_back(std::move(s));
  }
  return out;
}

// Builds the network and input for one seed.
using CaseFn = std::function<void(std::uint64_t seed, GradCheckOptions& opt,
                                  const std::function<void(Layer<double>&, const Tensor<double>&)>& check)>;

struct CaseDef {
  std::string name;
  CaseFn run;
};

std::vector<CaseDef> case_defs() {
  std::vector<CaseDef> defs;
  defs.push_back({"conv2d", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    Rng rng(seed);
                    Conv2D<double> conv("conv", 2, 3, 3, rng);
                    jitter(conv.bias, rng, 1.0);
                    check(conv, random_tensor({2, 5, 4, 2}, seed + 100));
                  }});
  defs.push_back({"relu", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    ReLU<double> relu;
                    check(relu, random_tensor({3, 7}, seed));
                  }});
  defs.push_back({"maxpool2d", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    MaxPool2D<double> pool;
                    check(pool, random_tensor({2, 5, 6, 3}, seed));
                  }});
  for (bool train : {true, false}) {
    defs.push_back({train ? "batchnorm(train)" : "batchnorm(infer)",
                    [train](std::uint64_t seed, GradCheckOptions& opt, const auto& check) {
                      BatchNorm<double> bn("bn", 3);
                      Rng rng(seed);
                      for (double& g : bn.gamma.value.data) g = 1.0 + 0.3 * standard_normal(rng);
                      jitter(bn.beta, rng, 1.0);
                      opt.train_mode = train;
                      check(bn, random_tensor({2, 3, 3, 3}, seed + 50));
                    }});
  }
  for (Activation act : {Activation::None, Activation::Relu, Activation::Sigmoid}) {
    const char* label = act == Activation::None ? "dense(linear)" : act == Activation::Relu ? "dense(relu)" : "dense(sigmoid)";
    defs.push_back({label, [act](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                      Rng rng(seed);
                      Dense<double> d("dense", 4, 3, act, rng);
                      jitter(d.bias, rng, 0.5);
                      check(d, random_tensor({5, 4}, seed + 9));
                    }});
  }
  defs.push_back({"dropout", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    Dropout<double> drop(0.3, seed);
                    check(drop, random_tensor({4, 6}, seed));
                  }});
  defs.push_back({"flatten", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    Flatten<double> flat;
                    check(flat, random_tensor({2, 3, 2, 2}, seed));
                  }});
  defs.push_back({"lstm", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    Rng rng(seed);
                    LSTM<double> lstm("lstm", 2, 2, rng);
                    jitter(lstm.b, rng, 0.3);
                    check(lstm, random_tensor({2, 3, 2}, seed + 77));
                  }});
  defs.push_back({"temporal_mean", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    TemporalMean<double> mean;
                    check(mean, random_tensor({3, 4, 2}, seed));
                  }});
  defs.push_back({"time_distributed", [](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                    Rng rng(seed);
                    auto block = std::make_unique<Sequential<double>>();
                    block->add(LayerPtr<double>(new Conv2D<double>("conv", 1, 2, 3, rng)));
                    block->add(LayerPtr<double>(new ReLU<double>()));
                    block->add(LayerPtr<double>(new MaxPool2D<double>()));
                    block->add(LayerPtr<double>(new BatchNorm<double>("bn", 2)));
                    block->add(LayerPtr<double>(new Flatten<double>()));
                    block->add(LayerPtr<double>(new Dense<double>("dense", 8, 3, Activation::Relu, rng)));
                    TimeDistributed<double> td(std::move(block));
                    perturb_params(td, 0.05, seed);
                    check(td, random_tensor({2, 3, 4, 4, 1}, seed));
                  }});
  for (Variant v : {Variant::Full, Variant::RnnOnly, Variant::CnnOnly}) {
    defs.push_back({std::string("model(") + variant_name(v) + ")",
                    [v](std::uint64_t seed, GradCheckOptions&, const auto& check) {
                      Model<double> m(micro_config(v, seed));
                      perturb_params(m.network(), 0.05, seed);
                      const std::vector<FeatureSequence> batch = micro_batch(seed);
                      check(m.network(), m.pack({&batch[0], &batch[1]}));
                    }});
  }
  return defs;
}

}  // namespace

std::string GradCheckSuiteReport::summary() const {
  std::ostringstream out;
  out.precision(3);
  for (const GradCheckCase& c : cases) {
    out << (c.passed ? "ok   " : "FAIL ") << c.name << " seeds=" << c.seeds << " max_rel_err=" << std::scientific
        << c.max_rel_err << std::defaultfloat << "\n";
    for (const std::string& f : c.failures) out << "     " << f << "\n";
  }
  out << (passed ? "PASS" : "FAIL") << " gradcheck max_rel_err=" << std::scientific << max_rel_err
      << " tolerance=" << tolerance << std::defaultfloat << "\n";
  return out.str();
}

GradCheckSuiteReport run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  GradCheckSuiteReport report;
  report.tolerance = options.tolerance;
  for (const CaseDef& def : case_defs()) {
    GradCheckCase c;
    c.name = def.name;
    for (int s = 1; s <= options.seeds; ++s) {
      GradCheckOptions opt;
      opt.tolerance = options.tolerance;
      opt.corrupt_backward = options.corrupt;
      opt.seed = static_cast<std::uint64_t>(s) + 6;
      def.run(static_cast<std::uint64_t>(s), opt, [&](Layer<double>& net, const Tensor<double>& x) {
        const GradCheckReport r = grad_check(net, x, opt);
        c.max_rel_err = std::max(c.max_rel_err, r.max_rel_err);
        if (!r.passed) {
          c.passed = false;
          for (const std::string& f : r.failures) c.failures.push_back("seed " + std::to_string(s) + ": " + f);
        }
      });
      ++c.seeds;
    }
    report.max_rel_err = std::max(report.max_rel_err, c.max_rel_err);
    report.passed = report.passed && c.passed;
    report.cases.push_back(std::move(c));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace botsense
