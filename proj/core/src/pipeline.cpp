#include "surrogate/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "surrogate/analyzer.hpp"
#include "surrogate/corpus.hpp"
#include "surrogate/ensemble.hpp"
#include "surrogate/format.hpp"
#include "surrogate/parallel.hpp"
#include "surrogate/target.hpp"
#include "surrogate/toyabm.hpp"

#ifndef SURROGATE_VERSION
#define SURROGATE_VERSION "dev"
#endif

namespace surrogate {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig::Seeds PipelineConfig::seeds() const {
  return {mix_seed(seed, 1), mix_seed(seed, 2), mix_seed(seed, 3), mix_seed(seed, 4)};
}

namespace {

nlohmann::json sampler_to_json(const SamplerOptions& s) {
  return {{"sigma_scale", s.sigma_scale},
          {"acp", s.acp == AcpSampling::Uniform ? "uniform" : "frequency"},
          {"booleans", s.booleans == BooleanSampling::Observed ? "observed" : "fair"},
          {"min_acceptance", s.min_acceptance}};
}

SamplerOptions sampler_from_json(const nlohmann::json& j) {
  SamplerOptions s;
  s.sigma_scale = j.value("sigma_scale", s.sigma_scale);
  const auto acp = j.value("acp", std::string("uniform"));
  if (acp != "uniform" && acp != "frequency") throw Error(ErrorCode::Usage, "sampler.acp must be uniform|frequency");
  s.acp = acp == "uniform" ? AcpSampling::Uniform : AcpSampling::Frequency;
  const auto booleans = j.value("booleans", std::string("observed"));
  if (booleans != "observed" && booleans != "fair") {
    throw Error(ErrorCode::Usage, "sampler.booleans must be observed|fair");
  }
  s.booleans = booleans == "observed" ? BooleanSampling::Observed : BooleanSampling::FairCoin;
  s.min_acceptance = j.value("min_acceptance", s.min_acceptance);
  return s;
}

}  // namespace

nlohmann::json PipelineConfig::settings_json() const {
  auto forest_json = forest.to_json();
  forest_json.erase("seed");
  auto mlp_json = mlp.to_json();
  mlp_json.erase("seed");
  return {{"seed", seed},
          {"train_frac", train_frac},
          {"stratify", stratify},
          {"standardize", standardize},
          {"n_samples", n_samples},
          {"classifiers", classifiers},
          {"voting_members", voting_members},
          {"analysis_model", analysis_model},
          {"forest", std::move(forest_json)},
          {"svm", svm.to_json()},
          {"mlp", std::move(mlp_json)},
          {"sampler", sampler_to_json(sampler)}};
}

nlohmann::json PipelineConfig::to_json() const {
  auto j = settings_json();
  j["corpus"] = corpus;
  j["schema"] = schema;
  j["rules"] = rules;
  j["out"] = out;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  try {
    PipelineConfig c;
    c.corpus = j.value("corpus", c.corpus);
    c.schema = j.value("schema", c.schema);
    c.rules = j.value("rules", c.rules);
    c.out = j.value("out", c.out);
    c.seed = j.value("seed", c.seed);
    c.train_frac = j.value("train_frac", c.train_frac);
    c.stratify = j.value("stratify", c.stratify);
    c.standardize = j.value("standardize", c.standardize);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.classifiers = j.value("classifiers", c.classifiers);
    c.voting_members = j.value("voting_members", c.voting_members);
    c.analysis_model = j.value("analysis_model", c.analysis_model);
    if (j.contains("forest")) c.forest = ForestParams::from_json(j.at("forest"));
    if (j.contains("svm")) c.svm = SvmParams::from_json(j.at("svm"));
    if (j.contains("mlp")) c.mlp = MlpParams::from_json(j.at("mlp"));
    if (j.contains("sampler")) c.sampler = sampler_from_json(j.at("sampler"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("pipeline config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Usage, "cannot open config file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Usage, path + ": " + e.what());
  }
}

int exit_status(const Error& e) noexcept {
  switch (category(e.code())) {
    case ErrorCategory::Usage: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Numeric: return 3;
  }
  return 2;
}

// ---------------------------------------------------------------------------
// File helpers

namespace {

template <typename Fn>
void with_stage(const char* stage, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const nlohmann::json::exception& e) {
    throw StageError(stage, Error(ErrorCode::MalformedConfig, e.what()));
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, Error(ErrorCode::IoFailure, e.what()));
  }
}

fs::path out_dir(const PipelineConfig& cfg) {
  fs::path p(cfg.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

std::string config_hash(const PipelineConfig& cfg) {
  // FNV-1a over the canonical settings text.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : cfg.settings_json().dump()) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json provenance(const PipelineConfig& cfg) {
  const auto s = cfg.seeds();
  return {{"tool", "surrogate"},
          {"tool_version", SURROGATE_VERSION},
          {"model_format_version", kModelFormatVersion},
          {"config_hash", config_hash(cfg)},
          {"seeds",
           {{"master", cfg.seed}, {"split", s.split}, {"forest", s.forest}, {"mlp", s.mlp}, {"sampler", s.sampler}}},
          {"timestamp", utc_timestamp()}};
}

ParameterSchema load_schema(const PipelineConfig& cfg) {
  if (!cfg.schema.empty()) return ParameterSchema::load(cfg.schema);
  const auto p = fs::path(cfg.out) / artifacts::kDataset;
  if (!fs::exists(p)) throw Error(ErrorCode::Usage, "no --schema given and no " + p.string());
  return ParameterSchema::from_json(read_json(p).at("schema"));
}

Dataset load_dataset(const PipelineConfig& cfg) {
  if (!cfg.corpus.empty()) {
    if (cfg.schema.empty()) throw Error(ErrorCode::Usage, "--corpus requires --schema");
    return ingest(cfg.corpus, ParameterSchema::load(cfg.schema));
  }
  const auto p = fs::path(cfg.out) / artifacts::kDataset;
  if (!fs::exists(p)) throw Error(ErrorCode::Usage, "no --corpus given and no " + p.string());
  return Dataset::from_json(read_json(p));
}

std::string labels_csv(const Dataset& ds, const std::vector<int>& labels) {
  std::string csv = "config_id,label,qli,gdp_index,unemployment,gini\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& o = ds.records[i].outcome;
    csv += ds.records[i].config_id + ',' + std::to_string(labels[i]) + ',' + format_double(o.qli) + ',' +
           format_double(o.gdp_index) + ',' + format_double(o.unemployment) + ',' + format_double(o.gini) + '\n';
  }
  return csv;
}

std::vector<int> load_labels(const PipelineConfig& cfg, const Dataset& ds) {
  if (!cfg.rules.empty()) return label(ds, RuleSet::load(cfg.rules));
  const auto p = fs::path(cfg.out) / artifacts::kLabels;
  if (!fs::exists(p)) throw Error(ErrorCode::Usage, "no --rules given and no " + p.string());
  std::istringstream in(read_text(p));
  std::string line;
  std::getline(in, line);
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos) throw Error(ErrorCode::MalformedConfig, p.string() + ": malformed row");
    const auto id = line.substr(0, c1);
    const auto value = line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);
    if (labels.size() >= ds.size() || ds.records[labels.size()].config_id != id) {
      throw Error(ErrorCode::SchemaMismatch, p.string() + " does not match the dataset record order");
    }
    labels.push_back(value == "1" ? 1 : 0);
  }
  if (labels.size() != ds.size()) throw Error(ErrorCode::SchemaMismatch, p.string() + " row count differs");
  return labels;
}

SplitIndices make_split(const PipelineConfig& cfg, std::span<const int> labels) {
  const auto seed = cfg.seeds().split;
  return cfg.stratify ? stratified_split(labels, cfg.train_frac, seed) : split(labels.size(), cfg.train_frac, seed);
}

ScalerStats read_scaler(const PipelineConfig& cfg) {
  const auto j = read_json(fs::path(cfg.out) / artifacts::kScaler);
  return {j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
}

Matrix prepare_features(const PipelineConfig& cfg, const Matrix& X) {
  if (!cfg.standardize || X.rows() == 0) return X;
  return standardize(X, read_scaler(cfg)).first;
}

bool wants(const PipelineConfig& cfg, const std::string& name) {
  for (const auto& c : cfg.classifiers) {
    if (c == name || c == "all") return true;
  }
  return false;
}

fs::path model_path(const PipelineConfig& cfg, const std::string& name) {
  return fs::path(cfg.out) / artifacts::kModelDir / (name + ".json");
}

std::vector<std::string> evaluated_models(const PipelineConfig& cfg) {
  std::vector<std::string> names;
  for (const char* n : {"forest", "svm", "mlp", "voting"}) {
    if (wants(cfg, n)) names.emplace_back(n);
  }
  return names;
}

std::vector<int> read_prediction_labels(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::string line;
  std::getline(in, line);
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    labels.push_back(line.back() == '1' ? 1 : 0);
  }
  return labels;
}

std::vector<ParameterVector> read_samples(const PipelineConfig& cfg, const ParameterSchema& schema) {
  std::istringstream in(read_text(fs::path(cfg.out) / artifacts::kSamples));
  return read_jsonl(in, schema);
}

std::string analysis_model_name(const PipelineConfig& cfg) {
  if (wants(cfg, cfg.analysis_model)) return cfg.analysis_model;
  const auto names = evaluated_models(cfg);
  if (names.empty()) throw Error(ErrorCode::Usage, "no classifier selected");
  return names.front();
}

template <typename Writer, typename Rows>
std::string render(Writer writer, const Rows& rows) {
  std::ostringstream os;
  writer(os, rows);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

namespace stages {

void synth(const SynthOptions& opts) {
  with_stage("synth", [&] {
    if (opts.out.empty()) throw Error(ErrorCode::Usage, "synth requires --out");
    const auto schema = toy_schema(opts.n_acps);
    const auto world = ToyWorld::create(schema, opts.world_seed, opts.noise_std);
    generate_corpus(world, schema, {opts.n_configs, opts.runs_per_config, opts.seed}, opts.out);
    write_json(fs::path(opts.out) / "toy_schema.json", schema.to_json());
  });
}

void ingest(const PipelineConfig& cfg) {
  with_stage("ingest", [&] {
    if (cfg.corpus.empty()) throw Error(ErrorCode::Usage, "ingest requires --corpus");
    const auto ds = load_dataset(cfg);
    for (const auto& s : ds.skipped) std::cerr << "warning: skipped " << s << '\n';
    write_json(out_dir(cfg) / artifacts::kDataset, ds.to_json());
  });
}

void label(const PipelineConfig& cfg) {
  with_stage("label", [&] {
    if (cfg.rules.empty()) throw Error(ErrorCode::Usage, "label requires --rules");
    const auto rules = RuleSet::load(cfg.rules);
    const auto ds = load_dataset(cfg);
    write_text(out_dir(cfg) / artifacts::kLabels, labels_csv(ds, surrogate::label(ds, rules)));
  });
}

void train(const PipelineConfig& cfg) {
  with_stage("train", [&] {
    const auto ds = load_dataset(cfg);
    const auto labels = load_labels(cfg, ds);
    const auto sp = make_split(cfg, labels);
    const auto dir = out_dir(cfg);
    write_json(dir / artifacts::kSplit, {{"seed", cfg.seeds().split},
                                         {"train_frac", cfg.train_frac},
                                         {"stratified", cfg.stratify},
                                         {"train", sp.train},
                                         {"test", sp.test}});

    Matrix X = ds.X.select_rows(sp.train);
    const auto y = select<int>(labels, sp.train);
    if (cfg.standardize) {
      auto [scaled, stats] = standardize(X);
      X = std::move(scaled);
      write_json(dir / artifacts::kScaler, {{"mean", stats.mean}, {"std", stats.std}});
    }
    fs::create_directories(dir / artifacts::kModelDir);

    const auto s = cfg.seeds();
    std::map<std::string, std::shared_ptr<const Classifier>> trained;
    auto need = [&](const std::string& name) {
      if (wants(cfg, name)) return true;
      if (!wants(cfg, "voting")) return false;
      return std::find(cfg.voting_members.begin(), cfg.voting_members.end(), name) != cfg.voting_members.end();
    };
    if (need("forest")) {
      auto p = cfg.forest;
      p.seed = s.forest;
      trained["forest"] = std::make_shared<ForestModel>(ForestModel::train(X, y, p));
    }
    if (need("svm")) trained["svm"] = std::make_shared<SvmModel>(SvmModel::train(X, y, cfg.svm));
    if (need("mlp")) {
      auto p = cfg.mlp;
      p.seed = s.mlp;
      trained["mlp"] = std::make_shared<MlpModel>(MlpModel::train(X, y, p));
    }
    if (wants(cfg, "voting")) {
      std::vector<std::shared_ptr<const Classifier>> members;
      for (const auto& m : cfg.voting_members) {
        auto it = trained.find(m);
        if (it == trained.end()) throw Error(ErrorCode::Usage, "unknown voting member '" + m + "'");
        members.push_back(it->second);
      }
      trained["voting"] = std::make_shared<VotingModel>(std::move(members));
    }
    for (const auto& [name, model] : trained) {
      if (wants(cfg, name)) write_model_file(*model, model_path(cfg, name).string());
    }
  });
}

void eval(const PipelineConfig& cfg, const std::optional<std::string>& model_file) {
  with_stage("eval", [&] {
    const auto ds = load_dataset(cfg);
    const auto labels = load_labels(cfg, ds);
    const auto sp = make_split(cfg, labels);
    const Matrix X_test = prepare_features(cfg, ds.X.select_rows(sp.test));
    const auto y_test = select<int>(labels, sp.test);

    std::vector<std::pair<std::string, std::shared_ptr<const Classifier>>> models;
    if (model_file) {
      auto m = read_model_file(*model_file);
      models.emplace_back(m->kind(), m);
    } else {
      for (const auto& name : evaluated_models(cfg)) {
        models.emplace_back(name, read_model_file(model_path(cfg, name).string()));
      }
    }

    std::vector<ClassifierEvaluation> evals;
    nlohmann::json per = nlohmann::json::object();
    nlohmann::json order = nlohmann::json::array();
    for (const auto& [name, model] : models) {
      const auto pred = model->predict(X_test);
      ClassifierEvaluation e{name, confusion(y_test, pred), 0.0};
      e.score = accuracy(e.matrix);
      per[name] = evaluation_to_json(e);
      order.push_back(name);
      evals.push_back(std::move(e));
    }
    const auto positives = std::count(y_test.begin(), y_test.end(), 1);
    nlohmann::json report{{"provenance", provenance(cfg)},
                          {"train_size", sp.train.size()},
                          {"test_size", sp.test.size()},
                          {"test_positives", positives},
                          {"order", std::move(order)},
                          {"classifiers", std::move(per)}};
    const auto dir = out_dir(cfg);
    write_json(dir / artifacts::kEvalJson, report);
    write_text(dir / artifacts::kEvalText, evaluation_table(evals));
  });
}

void sample(const PipelineConfig& cfg) {
  with_stage("sample", [&] {
    const auto ds = load_dataset(cfg);
    const auto stats = fit_marginals(ds);
    const auto vectors = generate(stats, ds.schema, cfg.n_samples, cfg.seeds().sampler, cfg.sampler);
    const auto dir = out_dir(cfg);
    write_json(dir / artifacts::kMarginals, stats.to_json());
    std::ofstream out(dir / artifacts::kSamples, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write samples");
    write_jsonl(out, ds.schema, vectors);
  });
}

void predict(const PipelineConfig& cfg, const std::optional<std::string>& model_file) {
  with_stage("predict", [&] {
    const auto schema = load_schema(cfg);
    const auto vectors = read_samples(cfg, schema);
    const auto model = read_model_file(model_file ? *model_file : model_path(cfg, analysis_model_name(cfg)).string());
    const Matrix X = prepare_features(cfg, to_feature_matrix(schema, vectors));
    const auto proba = model->predict_proba(X);
    std::string csv = "index,probability,label\n";
    for (std::size_t i = 0; i < proba.size(); ++i) {
      csv += std::to_string(i) + ',' + format_double(proba[i]) + ',' + std::to_string(decide(proba[i])) + '\n';
    }
    write_text(out_dir(cfg) / artifacts::kPredictions, csv);
  });
}

void analyze(const PipelineConfig& cfg) {
  with_stage("analyze", [&] {
    const auto ds = load_dataset(cfg);
    const auto sample_labels = load_labels(cfg, ds);
    const auto dir = out_dir(cfg);
    const auto vectors = read_samples(cfg, ds.schema);
    const auto predicted = read_prediction_labels(dir / artifacts::kPredictions);
    const auto marginals = MarginalStats::from_json(read_json(dir / artifacts::kMarginals));

    const auto shift = mean_shift_report(vectors, predicted, ds.schema, &marginals);
    const auto sample_vectors = ds.parameter_vectors();
    const auto sample_shift = mean_shift_report(sample_vectors, sample_labels, ds.schema);
    const auto agreement = direction_agreement(sample_shift, shift);
    const auto rates = boolean_rates(vectors, predicted, ds.schema);
    const auto sample_rates = boolean_rates(sample_vectors, sample_labels, ds.schema);
    const auto ranking = acp_ranking(vectors, predicted, ds.schema);
    const auto sample_ranking = acp_ranking(sample_vectors, sample_labels, ds.schema);

    std::vector<FeatureImportance> importance;
    const auto forest_file = model_path(cfg, "forest");
    if (fs::exists(forest_file)) {
      const auto model = read_model_file(forest_file.string());
      if (const auto* forest = dynamic_cast<const ForestModel*>(model.get())) {
        importance = rank_importances(ds.schema.feature_names(), forest->feature_importances());
      }
    }

    std::map<std::string, double> sample_by_name;
    for (const auto& e : sample_shift) sample_by_name[e.parameter] = e.relative_shift;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& e : shift) summary.push_back(describe_shift(e.parameter, e.relative_shift, sample_by_name[e.parameter]));

    nlohmann::json imp = nlohmann::json::array();
    for (const auto& f : importance) imp.push_back({{"feature", f.feature}, {"importance", f.importance}});

    const auto n_opt = std::count(predicted.begin(), predicted.end(), 1);
    nlohmann::json report{{"provenance", provenance(cfg)},
                          {"model", analysis_model_name(cfg)},
                          {"n_vectors", vectors.size()},
                          {"n_predicted_optimal", n_opt},
                          {"n_sample", ds.size()},
                          {"n_sample_optimal", std::count(sample_labels.begin(), sample_labels.end(), 1)},
                          {"summary", std::move(summary)},
                          {"mean_shift", to_json(std::span<const MeanShiftEntry>(shift))},
                          {"sample_mean_shift", to_json(std::span<const MeanShiftEntry>(sample_shift))},
                          {"direction_agreement", to_json(std::span<const DirectionAgreement>(agreement))},
                          {"boolean_rates", to_json(std::span<const BooleanRate>(rates))},
                          {"sample_boolean_rates", to_json(std::span<const BooleanRate>(sample_rates))},
                          {"acp_ranking", to_json(std::span<const AcpRankEntry>(ranking))},
                          {"sample_acp_ranking", to_json(std::span<const AcpRankEntry>(sample_ranking))},
                          {"feature_importance", std::move(imp)}};

    write_text(dir / artifacts::kMeanShift, render(write_mean_shift_csv, std::span<const MeanShiftEntry>(shift)));
    write_text(dir / artifacts::kSampleMeanShift,
               render(write_mean_shift_csv, std::span<const MeanShiftEntry>(sample_shift)));
    write_text(dir / artifacts::kAgreement,
               render(write_agreement_csv, std::span<const DirectionAgreement>(agreement)));
    write_text(dir / artifacts::kBooleanRates, render(write_boolean_rates_csv, std::span<const BooleanRate>(rates)));
    write_text(dir / artifacts::kAcpRanking, render(write_acp_ranking_csv, std::span<const AcpRankEntry>(ranking)));
    write_text(dir / artifacts::kImportance,
               render(write_importance_csv, std::span<const FeatureImportance>(importance)));
    write_json(dir / artifacts::kAnalysis, report);
  });
}

}  // namespace stages

void run_pipeline(const PipelineConfig& cfg) {
  with_stage("config", [&] { write_json(out_dir(cfg) / artifacts::kConfig, cfg.to_json()); });
  stages::ingest(cfg);
  stages::label(cfg);
  stages::train(cfg);
  stages::eval(cfg);
  stages::sample(cfg);
  stages::predict(cfg);
  stages::analyze(cfg);
}

std::vector<ClassifierEvaluation> read_evaluations(const fs::path& out) {
  const auto j = read_json(out / artifacts::kEvalJson);
  std::vector<ClassifierEvaluation> evals;
  for (const auto& name : j.at("order")) {
    const auto& e = j.at("classifiers").at(name.get<std::string>());
    const auto& c = e.at("confusion");
    ClassifierEvaluation ev{name.get<std::string>(),
                            {c.at("tn").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                             c.at("fn").get<std::size_t>(), c.at("tp").get<std::size_t>()},
                            0.0};
    ev.score = accuracy(ev.matrix);
    evals.push_back(std::move(ev));
  }
  return evals;
}

}  // namespace surrogate
