#include "botsense/commands.h"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "botsense/error.h"
#include "botsense/json_io.h"

namespace botsense {

namespace fs = std::filesystem;

namespace {

void say(const CommandOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("io", "cannot create directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path);
  out << text;
  if (!out) throw Error("io", "write failed for " + path);
}

// Probes writability by creating and removing a scratch file.
void check_writable(const std::string& dir) {
  ensure_dir(dir);
  const std::string probe = (fs::path(dir) / ".write_probe").string();
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out || !(out << "x")) throw Error("io", "output directory is not writable: " + dir);
  }
  std::error_code ec;
  fs::remove(probe, ec);
}

template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

EvalOptions eval_options(const CommandOptions& o, const std::string& checkpoint_dir) {
  if (!checkpoint_dir.empty()) ensure_dir(checkpoint_dir);
  EvalOptions e;
  e.jobs = o.effective_jobs();
  e.checkpoint_dir = checkpoint_dir;
  e.log = o.log;
  return e;
}

void write_evaluation(const std::string& dir, const std::string& stem, const std::vector<CVResult>& rows,
                      const std::vector<std::string>& log_lines) {
  ensure_dir(dir);
  write_text((fs::path(dir) / (stem + ".csv")).string(), cv_csv(rows));
  write_text((fs::path(dir) / (stem + "_table.txt")).string(), results_table(rows));
  std::string log;
  for (const std::string& l : log_lines) log += l + "\n";
  write_text((fs::path(dir) / (stem + ".log")).string(), log);
}

}  // namespace

OutputPaths output_paths(const RunConfig& config) {
  OutputPaths p;
  const fs::path root = fs::absolute(config.output_dir).lexically_normal();
  p.root = root.string();
  p.logs = (root / "logs").string();
  p.dataset = (root / "dataset").string();
  p.manifest = (root / "dataset" / "manifest.json").string();
  p.features = (root / "dataset" / "features.bsfc").string();
  p.train = (root / "train").string();
  p.checkpoint = (root / "train" / "model.bsnn").string();
  p.crossval = (root / "crossval").string();
  p.ablate = (root / "ablate").string();
  p.baseline = (root / "baseline").string();
  return p;
}

std::vector<PlannedMatch> plan_matches(const SimulateSection& sim) {
  std::vector<PlannedMatch> out;
  if (sim.matches.total() > 0 && sim.maps.empty()) throw Error("config", "simulate.maps: at least one map is required");
  std::size_t persona_cursor = 0;
  auto humanized = [&]() {
    if (sim.personas.empty()) throw Error("config", "simulate.personas: humanized pairings need at least one persona");
    const PersonaConfig& persona = sim.personas[persona_cursor++ % sim.personas.size()];
    Policy p;
    p.name = "human";
    p.agent = apply_archetype(sim.agent, persona.archetype);
    p.persona = persona;
    return p;
  };
  auto bot = [&]() {
    Policy p;
    p.name = "bot";
    p.agent = sim.agent;
    return p;
  };
  const std::pair<const char*, int> groups[] = {
      {"bot_bot", sim.matches.bot_bot}, {"bot_human", sim.matches.bot_human}, {"human_human", sim.matches.human_human}};
  for (const auto& [pairing, count] : groups) {
    for (int j = 0; j < count; ++j) {
      PlannedMatch m;
      m.index = static_cast<int>(out.size());
      m.pairing = pairing;
      m.map = m.index % static_cast<int>(sim.maps.size());
      m.seed = mix_seed(sim.seed, static_cast<std::uint64_t>(m.index));
      const std::string kind = pairing;
      if (kind == "bot_bot") {
        m.policy[0] = bot();
        m.policy[1] = bot();
      } else if (kind == "bot_human") {
        const int human_seat = j % 2;
        m.policy[human_seat] = humanized();
        m.policy[1 - human_seat] = bot();
      } else {
        m.policy[0] = humanized();
        m.policy[1] = humanized();
      }
      char name[64];
      std::snprintf(name, sizeof(name), "match_%05d_%s.ttlog", m.index, pairing);
      m.file_name = name;
      out.push_back(std::move(m));
    }
  }
  return out;
}

nlohmann::json SimulateReport::to_json() const {
  static const char* reason_names[] = {"none", "elimination", "domination", "turn_limit", "mutual_elimination"};
  Json reasons = Json::object();
  for (int r = 0; r < 5; ++r) reasons[reason_names[r]] = this->reasons[r];
  return {{"matches", {{"bot_bot", counts.bot_bot}, {"bot_human", counts.bot_human}, {"human_human", counts.human_human},
                       {"total", counts.total()}}},
          {"outcomes", {{"player0_wins", wins[0]}, {"player1_wins", wins[1]}, {"draws", draws}, {"reasons", reasons}}},
          {"mean_turns", mean_turns},
          {"mean_actions", mean_actions},
          {"human_player_ratio", human_player_ratio},
          {"files", files}};
}

std::string SimulateReport::text() const {
  std::ostringstream out;
  out << "matches " << counts.total() << " (bot_bot " << counts.bot_bot << ", bot_human " << counts.bot_human
      << ", human_human " << counts.human_human << ")\n";
  out << "outcomes: player0 " << wins[0] << ", player1 " << wins[1] << ", draws " << draws << "\n";
  out << "mean turns " << mean_turns << ", mean actions " << mean_actions << "\n";
  out << "humanized seats " << human_player_ratio << "\n";
  return out.str();
}

SimulateReport cmd_simulate(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const OutputPaths paths = output_paths(config);
  check_writable(paths.logs);
  const std::vector<PlannedMatch> plan = plan_matches(config.simulate);

  std::vector<std::shared_ptr<const MapGeometry>> maps;
  for (const std::string& m : config.simulate.maps) maps.push_back(std::make_shared<const MapGeometry>(load_map(config.resolve(m))));

  for (const auto& entry : fs::directory_iterator(paths.logs)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("match_", 0) == 0 && entry.path().extension() == kLogExtension) {
      fs::remove(entry.path());
    }
  }

  struct Played {
    Outcome outcome;
    int turns = 0;
    std::size_t actions = 0;
  };
  std::vector<Played> played(plan.size());
  std::atomic<int> done{0};
  std::mutex log_mutex;
  parallel_for(static_cast<int>(plan.size()), options.effective_jobs(), [&](int i) {
    const PlannedMatch& m = plan[i];
    const MatchLog log = play_match(maps[m.map], m.policy[0], m.policy[1], m.seed, config.simulate.match);
    write_log(log, (fs::path(paths.logs) / m.file_name).string());
    played[i] = {log.header.outcome, log.records.back().turn_number, log.records.size() - 1};
    const int n = ++done;
    if (options.log && (n % 10 == 0 || n == static_cast<int>(plan.size()))) {
      std::lock_guard<std::mutex> lock(log_mutex);
      say(options, "simulated " + std::to_string(n) + "/" + std::to_string(plan.size()));
    }
  });

  SimulateReport report;
  report.counts = config.simulate.matches;
  int humanized_seats = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Played& p = played[i];
    if (p.outcome.status == OutcomeStatus::Win) ++report.wins[p.outcome.winner];
    else ++report.draws;
    ++report.reasons[static_cast<int>(p.outcome.reason)];
    report.mean_turns += p.turns;
    report.mean_actions += static_cast<double>(p.actions);
    humanized_seats += plan[i].policy[0].humanized() + plan[i].policy[1].humanized();
    report.files.push_back(plan[i].file_name);
  }
  if (!plan.empty()) {
    const double n = static_cast<double>(plan.size());
    report.mean_turns /= n;
    report.mean_actions /= n;
    report.human_player_ratio = humanized_seats / (2.0 * n);
  }
  write_text((fs::path(paths.logs) / "simulate_report.json").string(), report.to_json().dump(2) + "\n");
  return report;
}

Dataset cmd_featurize(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const OutputPaths paths = output_paths(config);
  DatasetOptions d;
  d.T = config.featurize.T;
  d.R = config.featurize.R;
  d.balance = config.featurize.balance;
  d.seed = config.featurize.seed;
  d.first_player_only = config.featurize.first_player_only;
  Dataset out;
  out.manifest = build_dataset(paths.logs, d);
  ensure_dir(paths.dataset);
  write_manifest(out.manifest, paths.manifest);
  out.sequences = load_sequences(out.manifest);
  write_feature_cache(out.sequences, paths.features);
  say(options, "featurized " + std::to_string(out.sequences.size()) + " sequences (human " +
                   std::to_string(out.manifest.class_counts[1]) + ", bot " + std::to_string(out.manifest.class_counts[0]) + ")");
  return out;
}

Dataset ensure_dataset(const RunConfig& config, const CommandOptions& options) {
  const OutputPaths paths = output_paths(config);
  if (fs::is_regular_file(paths.manifest)) {
    DatasetManifest m = read_manifest(paths.manifest);
    const FeaturizeSection& f = config.featurize;
    if (m.T == f.T && m.R == f.R && m.balance == f.balance && m.seed == f.seed) {
      Dataset out;
      out.manifest = std::move(m);
      if (fs::is_regular_file(paths.features)) {
        out.sequences = read_feature_cache(paths.features);
        if (out.sequences.size() == out.manifest.entries.size()) return out;
      }
      out.sequences = load_sequences(out.manifest);
      return out;
    }
    say(options, "dataset manifest does not match the featurize section; rebuilding");
  }
  return cmd_featurize(config, options);
}

TrainOutcome cmd_train(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const OutputPaths paths = output_paths(config);
  check_writable(paths.train);
  const Dataset data = ensure_dataset(config, options);
  Model<float> model(config.model);
  TrainOutcome out;
  out.report = train(model, data.sequences, {}, paths.checkpoint);
  out.checkpoint = paths.checkpoint;
  out.checkpoint_hash = file_hash(paths.checkpoint);

  Json epochs = Json::array();
  for (const EpochStats& e : out.report.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"steps", e.steps}, {"train_loss", e.train_loss}});
  }
  const Json report = {{"checkpoint", fs::path(paths.checkpoint).filename().string()},
                       {"checkpoint_hash", out.checkpoint_hash},
                       {"model", to_json(config.model)},
                       {"sequences", data.sequences.size()},
                       {"optimizer_steps", out.report.optimizer_steps},
                       {"epochs", epochs},
                       {"meta", {{"wall_seconds", out.report.wall_seconds}}}};
  write_text((fs::path(paths.train) / "train_report.json").string(), report.dump(2) + "\n");
  say(options, "checkpoint " + paths.checkpoint + " hash " + out.checkpoint_hash);
  return out;
}

CVResult cmd_crossval(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  const OutputPaths paths = output_paths(config);
  check_writable(paths.crossval);
  const Dataset data = ensure_dataset(config, options);
  CVResult r = cross_validate(data.manifest, data.sequences, config.model, config.evaluate.plan,
                              eval_options(options, (fs::path(paths.crossval) / "checkpoints").string()));
  write_evaluation(paths.crossval, "crossval", {r},
                   {std::string("fold-hash ") + variant_name(config.model.variant) + " " + r.fold_hash});
  return r;
}

AblationResult cmd_ablate(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  if (!config.evaluate.ablation) throw Error("config", "evaluate.ablation: disabled in this config");
  const OutputPaths paths = output_paths(config);
  check_writable(paths.ablate);
  const Dataset data = ensure_dataset(config, options);
  AblationResult r = run_ablation(data.manifest, data.sequences, config.model, config.evaluate.plan,
                                  eval_options(options, (fs::path(paths.ablate) / "checkpoints").string()));
  write_evaluation(paths.ablate, "ablation", r.rows, r.log);
  return r;
}

CVResult cmd_baseline(const RunConfig& config, const CommandOptions& options) {
  config.validate();
  if (!config.evaluate.baseline) throw Error("config", "evaluate.baseline: disabled in this config");
  const OutputPaths paths = output_paths(config);
  check_writable(paths.baseline);
  const Dataset data = ensure_dataset(config, options);
  std::vector<double> weights;
  for (const ManifestEntry& e : data.manifest.entries) weights.push_back(data.manifest.class_weights[e.label]);
  CVResult r = run_baseline(data.manifest, load_summaries(data.manifest), weights, config.evaluate.plan,
                            config.evaluate.baseline_config);
  write_evaluation(paths.baseline, "baseline", {r}, {"fold-hash baseline " + r.fold_hash});
  return r;
}

GradCheckSuiteReport cmd_gradcheck(const GradCheckSuiteOptions& options) {
  if (!(options.tolerance > 0.0)) throw Error("config", "gradcheck.tolerance: must be positive");
  if (options.seeds < 1) throw Error("config", "gradcheck.seeds: must be >= 1");
  return run_gradcheck_suite(options);
}

Prediction cmd_predict(const std::string& checkpoint, const std::string& log_path, int perspective) {
  if (perspective != 0 && perspective != 1) throw Error("config", "predict.perspective: must be 0 or 1");
  Model<float> model = load_model(checkpoint);
  const MatchLog log = read_log(log_path);
  const FeatureSequence seq = build_sequence(log, perspective, model.config().T, model.config().R);
  Prediction p;
  p.perspective = perspective;
  p.p_human = model.predict(seq);
  p.predicted_label = p.p_human >= 0.5 ? 1 : 0;
  return p;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace botsense
