#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "botsense/commands.h"
#include "botsense/error.h"

using namespace botsense;

namespace {

int exit_code_for(const std::string& category) {
  static const std::map<std::string, int> codes = {
      {"config", 3}, {"io", 4}, {"schema", 5}, {"dataset", 5}, {"feature", 5},    {"shape", 5},
      {"numeric", 6}, {"evaluation", 7}, {"metrics", 7}, {"agent", 8}, {"game", 8}, {"checkpoint", 9}};
  auto it = codes.find(category);
  return it == codes.end() ? 10 : it->second;
}

std::uint64_t parse_seed(const char* text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 10);
    if (used != std::string(text).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error("config", std::string("BOTSENSE_SEED: not an unsigned integer: ") + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"botsense: bot detection from turn-based match telemetry"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool deterministic = false;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--jobs", jobs, "Worker threads for simulate and cross-validation")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", deterministic, "Run every stage serially");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");

  CLI::App* simulate = app.add_subcommand("simulate", "Play the configured match mix and write logs");
  CLI::App* featurize = app.add_subcommand("featurize", "Build the dataset manifest and feature cache");
  CLI::App* train = app.add_subcommand("train", "Train one model on the whole dataset");
  CLI::App* crossval = app.add_subcommand("crossval", "k-fold cross-validation of the configured variant");
  CLI::App* ablate = app.add_subcommand("ablate", "Cross-validate full, rnn_only and cnn_only on shared folds");
  CLI::App* baseline = app.add_subcommand("baseline", "Cross-validate the summary-feature logistic baseline");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every layer and the model");
  double tolerance = 1e-4;
  int seeds = 5;
  bool corrupt = false;
  gradcheck->add_option("--tolerance", tolerance, "Maximum relative error");
  gradcheck->add_option("--seeds", seeds, "Seeds per case")->check(CLI::PositiveNumber);
  gradcheck->add_flag("--corrupt", corrupt, "Negate analytic gradients (checker self-test)")->group("");

  CLI::App* predict = app.add_subcommand("predict", "Score one match log with a trained checkpoint");
  std::string checkpoint, log_path;
  int perspective = 0;
  predict->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
  predict->add_option("--log", log_path, "Match log (.ttlog)")->required();
  predict->add_option("--perspective", perspective, "Player to classify (0 or 1)");

  CLI11_PARSE(app, argc, argv);

  CommandOptions options;
  options.jobs = jobs;
  options.deterministic = deterministic;
  options.log = [](const std::string& msg) { std::cerr << msg << "\n"; };

  try {
    if (gradcheck->parsed()) {
      GradCheckSuiteOptions g;
      g.tolerance = tolerance;
      g.seeds = seeds;
      g.corrupt = corrupt;
      const GradCheckSuiteReport r = cmd_gradcheck(g);
      std::cout << r.summary();
      return r.passed ? 0 : 1;
    }
    if (predict->parsed()) {
      const Prediction p = cmd_predict(checkpoint, log_path, perspective);
      std::cout << "perspective " << p.perspective << " p_human " << p.p_human << " label "
                << (p.predicted_label ? "human" : "bot") << "\n";
      return 0;
    }

    if (config_path.empty()) throw Error("config", "--config is required for this command");
    RunConfig config = load_run_config(config_path);
    if (const char* seed = std::getenv("BOTSENSE_SEED")) config.override_seeds(parse_seed(seed));
    if (!out_dir.empty()) config.output_dir = out_dir;
    config.validate();

    if (simulate->parsed()) {
      std::cout << cmd_simulate(config, options).text();
    } else if (featurize->parsed()) {
      const Dataset d = cmd_featurize(config, options);
      std::cout << "sequences " << d.sequences.size() << " (human " << d.manifest.class_counts[1] << ", bot "
                << d.manifest.class_counts[0] << ")\n";
    } else if (train->parsed()) {
      const TrainOutcome t = cmd_train(config, options);
      std::cout << "checkpoint " << t.checkpoint << "\ncheckpoint_hash " << t.checkpoint_hash << "\n";
    } else if (crossval->parsed()) {
      const CVResult r = cmd_crossval(config, options);
      std::cout << results_table({r}) << "fold-hash " << r.fold_hash << "\n";
    } else if (ablate->parsed()) {
      const AblationResult r = cmd_ablate(config, options);
      std::cout << results_table(r.rows);
      for (const std::string& l : r.log) std::cout << l << "\n";
    } else if (baseline->parsed()) {
      const CVResult r = cmd_baseline(config, options);
      std::cout << results_table({r}) << "fold-hash " << r.fold_hash << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 10;
  }
}
