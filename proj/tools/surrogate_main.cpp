// surrogate: command-line front end for the surrogate-modeling pipeline.

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surrogate/pipeline.hpp"

namespace {

using surrogate::PipelineConfig;

struct Flags {
  std::string config;
  std::string corpus, schema, rules, out;
  std::uint64_t seed = 0;
  double train_frac = 0;
  std::size_t n_samples = 0;
  std::vector<std::string> classifiers;
  std::vector<std::string> voting_members;
  bool standardize = false;
  bool stratify = false;
  std::size_t trees = 0;
  std::size_t max_depth = 0;
  std::vector<std::size_t> hidden;
  double alpha = 0, c = 0, gamma = 0;
  std::string model;

  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> setters;
};

template <typename T>
void bind_option(CLI::App* app, Flags& f, std::string name, T& target, std::string help,
          std::function<void(PipelineConfig&)> apply) {
  f.setters.emplace_back(app->add_option(std::move(name), target, std::move(help)), std::move(apply));
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "pipeline config JSON; flags override its fields");
  bind_option(app, f, "--corpus", f.corpus, "corpus root directory", [&f](auto& c) { c.corpus = f.corpus; });
  bind_option(app, f, "--schema", f.schema, "parameter schema JSON", [&f](auto& c) { c.schema = f.schema; });
  bind_option(app, f, "--rules", f.rules, "label rules JSON", [&f](auto& c) { c.rules = f.rules; });
  bind_option(app, f, "--out", f.out, "output directory", [&f](auto& c) { c.out = f.out; });
  bind_option(app, f, "--seed", f.seed, "master seed", [&f](auto& c) { c.seed = f.seed; });
  f.setters.emplace_back(app->add_option("--train-frac", f.train_frac, "training fraction")->check(CLI::Range(0.0, 1.0)),
                         [&f](auto& c) { c.train_frac = f.train_frac; });
  bind_option(app, f, "--n-samples,-n,--n", f.n_samples, "number of generated configurations",
       [&f](auto& c) { c.n_samples = f.n_samples; });
  f.setters.emplace_back(
      app->add_option("--classifier", f.classifiers, "forest|svm|mlp|voting|all (repeatable)")
          ->check(CLI::IsMember({"forest", "svm", "mlp", "voting", "all"}))
          ->delimiter(','),
      [&f](auto& c) {
        c.classifiers = f.classifiers;
        if (f.classifiers.size() == 1 && f.classifiers[0] != "all" && f.classifiers[0] != "voting") {
          c.analysis_model = f.classifiers[0];
        }
      });
  f.setters.emplace_back(app->add_option("--voting-members", f.voting_members, "members of the soft-voting ensemble")
                             ->check(CLI::IsMember({"forest", "svm", "mlp"}))
                             ->delimiter(','),
                         [&f](auto& c) { c.voting_members = f.voting_members; });
  f.setters.emplace_back(app->add_flag("--standardize", f.standardize, "z-score features with training statistics"),
                         [&f](auto& c) { c.standardize = f.standardize; });
  f.setters.emplace_back(app->add_flag("--stratify", f.stratify, "stratify the split by label"),
                         [&f](auto& c) { c.stratify = f.stratify; });
  f.setters.emplace_back(app->add_option("--trees", f.trees, "forest size")->check(CLI::PositiveNumber),
                         [&f](auto& c) { c.forest.n_trees = f.trees; });
  bind_option(app, f, "--max-depth", f.max_depth, "forest depth limit (root is depth 0)",
       [&f](auto& c) { c.forest.max_depth = f.max_depth; });
  f.setters.emplace_back(app->add_option("--hidden", f.hidden, "MLP hidden widths, e.g. 100 or 64,32")->delimiter(','),
                         [&f](auto& c) { c.mlp.hidden_sizes = f.hidden; });
  f.setters.emplace_back(app->add_option("--alpha", f.alpha, "MLP L2 penalty")->check(CLI::NonNegativeNumber),
                         [&f](auto& c) { c.mlp.alpha = f.alpha; });
  f.setters.emplace_back(app->add_option("--c", f.c, "SVM box constraint")->check(CLI::PositiveNumber),
                         [&f](auto& c) { c.svm.c = f.c; });
  f.setters.emplace_back(app->add_option("--gamma", f.gamma, "SVM kernel gamma (default: scale)")->check(CLI::PositiveNumber),
                         [&f](auto& c) { c.svm.gamma = f.gamma; });
}

PipelineConfig resolve(const Flags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : PipelineConfig::load(f.config);
  for (const auto& [opt, apply] : f.setters) {
    if (opt->count() > 0) apply(cfg);
  }
  return cfg;
}

constexpr const char* kStages =
    "Stages (each also available as its own subcommand):\n"
    "  ingest   walk the corpus and build dataset.json\n"
    "  label    apply the rule set, write labels.csv\n"
    "  train    split, fit the selected classifiers, write models/\n"
    "  eval     confusion matrices and accuracy on the test split\n"
    "  sample   fit marginals, draw configurations into samples.jsonl\n"
    "  predict  classify samples.jsonl into predictions.csv\n"
    "  analyze  mean-shift, boolean-rate, ACP and importance reports\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate models for agent-based simulation corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SURROGATE_CLI_VERSION);

  Flags flags;
  surrogate::SynthOptions synth;

  auto* synth_cmd = app.add_subcommand("synth", "generate a toy ABM corpus");
  synth_cmd->add_option("--out", synth.out, "corpus root to create")->required();
  synth_cmd->add_option("--configs", synth.n_configs, "number of configurations")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--runs", synth.runs_per_config, "runs per configuration")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--acps", synth.n_acps, "number of ACPs")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "corpus seed");
  synth_cmd->add_option("--world-seed", synth.world_seed, "ACP quality seed");
  synth_cmd->add_option("--noise", synth.noise_std, "outcome noise std")->check(CLI::NonNegativeNumber);

  struct Stage {
    const char* name;
    const char* help;
    bool takes_model;
  };
  const Stage stage_list[] = {
      {"ingest", "walk a corpus root into dataset.json", false},
      {"label", "label runs with a rule set", false},
      {"train", "train classifiers", false},
      {"eval", "evaluate trained classifiers on the test split", true},
      {"sample", "generate parameter configurations", false},
      {"predict", "classify generated configurations", true},
      {"analyze", "characterize predicted-optimal configurations", false},
      {"pipeline", "run every stage in order", false},
  };
  std::map<std::string, CLI::App*> cmds;
  std::string model_file;
  for (const auto& s : stage_list) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    if (s.takes_model) cmd->add_option("--model", model_file, "saved model file")->check(CLI::ExistingFile);
    cmds[s.name] = cmd;
  }
  cmds["pipeline"]->footer(kStages);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (synth_cmd->parsed()) {
      surrogate::stages::synth(synth);
      return 0;
    }
    const auto cfg = resolve(flags);
    const std::optional<std::string> model = model_file.empty() ? std::nullopt : std::optional(model_file);
    if (cmds["ingest"]->parsed()) surrogate::stages::ingest(cfg);
    if (cmds["label"]->parsed()) surrogate::stages::label(cfg);
    if (cmds["train"]->parsed()) surrogate::stages::train(cfg);
    if (cmds["eval"]->parsed()) {
      surrogate::stages::eval(cfg, model);
      std::cout << surrogate::evaluation_table(surrogate::read_evaluations(cfg.out));
    }
    if (cmds["sample"]->parsed()) surrogate::stages::sample(cfg);
    if (cmds["predict"]->parsed()) surrogate::stages::predict(cfg, model);
    if (cmds["analyze"]->parsed()) surrogate::stages::analyze(cfg);
    if (cmds["pipeline"]->parsed()) {
      surrogate::run_pipeline(cfg);
      std::cout << surrogate::evaluation_table(surrogate::read_evaluations(cfg.out));
    }
  } catch (const surrogate::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return surrogate::exit_status(e);
  } catch (const surrogate::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return surrogate::exit_status(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
