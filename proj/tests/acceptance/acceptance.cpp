// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "surrogate/analyzer.hpp"
#include "surrogate/eval.hpp"
#include "surrogate/forest.hpp"
#include "surrogate/lbfgs.hpp"
#include "surrogate/mlp.hpp"
#include "surrogate/parallel.hpp"
#include "surrogate/pipeline.hpp"
#include "surrogate/sampler.hpp"
#include "surrogate/svm.hpp"
#include "surrogate/target.hpp"
#include "surrogate/toyabm.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::testing::TempDir;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

template <typename Fn>
void criterion(int id, const char* title, double budget_s, Fn&& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double took = seconds_since(t0);
  if (budget_s > 0 && took > budget_s) {
    o.pass = false;
    o.detail += " [over time budget " + std::to_string(budget_s) + " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id, title, took, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome published_scores() {
  struct Row {
    ConfusionMatrix m;
    const char* score;
  };
  const Row rows[] = {{{75, 0, 1, 6}, "0.9878"}, {{75, 0, 3, 4}, "0.9634"}, {{73, 2, 3, 4}, "0.9390"},
                      {{75, 0, 2, 5}, "0.9756"}};
  const auto s = split(232, 0.65, 0);
  Outcome o;
  for (const auto& r : rows) {
    const auto got = format_score(accuracy(r.m));
    if (got != r.score) o = {false, o.detail + " score " + got + " != " + r.score};
    if (r.m.total() != s.test.size()) o = {false, o.detail + " total mismatch"};
  }
  if (s.test.size() != 82 || s.train.size() != 150) o = {false, o.detail + " split sizes wrong"};
  if (o.pass) o.detail = "4/4 scores, test size 82";
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome target_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 50), pct(1, 100), nrules(1, 4), level(0, 9), coin(0, 1);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    std::vector<OutcomeMetrics> outcomes(n);
    const bool coarse = coin(rng);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& o : outcomes) {
      auto draw = [&] { return coarse ? level(rng) / 9.0 : u(rng); };
      o = {draw(), 2.0 * draw(), draw(), draw(), 239};
    }
    std::vector<Metric> metrics(kAllMetrics.begin(), kAllMetrics.end());
    std::shuffle(metrics.begin(), metrics.end(), rng);
    metrics.resize(nrules(rng));
    std::vector<surrogate::testing::PercentRule> oracle_rules;
    std::vector<LabelRule> rules;
    for (auto m : metrics) {
      const auto dir = coin(rng) ? Direction::Top : Direction::Bottom;
      const int p = pct(rng);
      oracle_rules.push_back({m, dir, p});
      rules.push_back({m, dir, p / 100.0});
    }
    if (label(outcomes, RuleSet(rules)) != surrogate::testing::brute_force_labels(outcomes, oracle_rules)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 datasets"};
}

// 3 ------------------------------------------------------------------------
Outcome gradient_check() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> width(1, 5), depth(1, 2), rows(3, 12);
  std::normal_distribution<double> w(0.0, 0.8);
  std::uniform_real_distribution<double> u(-1.5, 1.5), a(0.0, 0.1);
  double worst = 0.0;
  for (int net = 0; net < 100; ++net) {
    std::vector<std::size_t> widths{width(rng)};
    const auto hidden = depth(rng);
    for (std::size_t h = 0; h < hidden; ++h) widths.push_back(width(rng));
    widths.push_back(1);
    auto m = MlpModel::zeros(widths);
    std::vector<double> flat(m.parameter_count());
    for (auto& v : flat) v = w(rng);
    m.set_flat_parameters(flat);
    const auto n = rows(rng);
    Matrix X(n, widths[0]);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < widths[0]; ++c) X(r, c) = u(rng);
      y[r] = u(rng) > 0;
    }
    const double alpha = a(rng);
    const auto grad = m.loss_and_grad(X, y, alpha).second;
    const auto numeric = surrogate::testing::finite_difference(
        [&](std::span<const double> p) {
          auto copy = m;
          copy.set_flat_parameters(p);
          return copy.loss_and_grad(X, y, alpha).first;
        },
        flat);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double scale = std::max({std::abs(grad[i]), std::abs(numeric[i]), 1e-6});
      worst = std::max(worst, std::abs(grad[i] - numeric[i]) / scale);
    }
  }
  return {worst < 1e-5, "max relative error " + fmt("%.3g", worst)};
}

// 4 ------------------------------------------------------------------------
Outcome lbfgs_checks() {
  LbfgsOptions quad_opts;
  quad_opts.grad_tol = 1e-12;
  const auto q = lbfgs_minimize(
      [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * x[0];
        g[1] = 2 * x[1];
        return x[0] * x[0] + x[1] * x[1];
      },
      {3.0, 4.0}, quad_opts);
  const double dist = std::hypot(q.x[0], q.x[1]);

  LbfgsOptions rosen_opts;  // default 2,000-iteration cap
  rosen_opts.grad_tol = 1e-9;
  const auto r = lbfgs_minimize(
      [](std::span<const double> x, std::span<double> g) {
        const double a = 1 - x[0], b = x[1] - x[0] * x[0];
        g[0] = -2 * a - 400 * x[0] * b;
        g[1] = 200 * b;
        return a * a + 100 * b * b;
      },
      {-1.2, 1.0}, rosen_opts);
  const bool ok = dist < 1e-8 && q.iterations <= 5 && r.f < 1e-8 && r.iterations <= 2000;
  return {ok, "quadratic |x-x*| " + fmt("%.2g", dist) + " in " + std::to_string(q.iterations) + " it; Rosenbrock f " +
                  fmt("%.2g", r.f) + " in " + std::to_string(r.iterations) + " it"};
}

// 5 ------------------------------------------------------------------------
Outcome smo_checks() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> size(10, 80);
  SvmParams p;
  p.degree = 1;  // linear kernel: the sets are linearly separable
  p.gamma = 1.0;
  p.coef0 = 0.0;
  p.c = 1000.0;
  p.record_dual_trace = true;
  int bad_box = 0, bad_balance = 0, bad_monotone = 0, bad_accuracy = 0, bad_objective = 0, unconverged = 0;
  double worst_balance = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto set = surrogate::testing::separable_2d(rng, size(rng), 0.05);
    const auto sol = smo_train(set.X, set.y_pm, p);
    unconverged += !sol.converged;
    double balance = 0.0;
    bool box = true;
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      box = box && sol.alpha[i] >= 0.0 && sol.alpha[i] <= p.c;
      balance += sol.alpha[i] * set.y_pm[i];
    }
    bad_box += !box;
    worst_balance = std::max(worst_balance, std::abs(balance));
    bad_balance += std::abs(balance) >= 1e-9;
    bool monotone = true;
    for (std::size_t k = 1; k < sol.dual_trace.size(); ++k) monotone = monotone && sol.dual_trace[k] >= sol.dual_trace[k - 1];
    bad_monotone += !monotone;
    const double direct = surrogate::testing::dual_objective(set.X, set.y_pm, sol.alpha, 1.0, 0.0, 1);
    bad_objective += std::abs(direct - sol.dual_objective) > 1e-7 * std::max(1.0, std::abs(direct));
    bool all_right = true;
    for (std::size_t i = 0; i < set.y_pm.size(); ++i) {
      double f = sol.bias;
      for (std::size_t j = 0; j < set.y_pm.size(); ++j) {
        if (sol.alpha[j] > 0) f += sol.alpha[j] * set.y_pm[j] * poly_kernel(set.X.row(j), set.X.row(i), 1.0, 0.0, 1);
      }
      all_right = all_right && (f > 0) == (set.y_pm[i] > 0);
    }
    bad_accuracy += !all_right;
  }
  const bool ok = bad_box + bad_balance + bad_monotone + bad_accuracy + bad_objective == 0;
  return {ok, "box " + std::to_string(bad_box) + ", balance " + std::to_string(bad_balance) + " (max " +
                  fmt("%.2g", worst_balance) + "), monotone " + std::to_string(bad_monotone) + ", objective " +
                  std::to_string(bad_objective) + ", accuracy " + std::to_string(bad_accuracy) +
                  " failures of 200; unconverged " + std::to_string(unconverged)};
}

// 6 ------------------------------------------------------------------------
Outcome sampler_checks() {
  ParameterSchema schema({ParameterDecl::continuous("x", 0.0, 5.0), ParameterDecl::continuous("near_zero", 0.0, 5.0),
                          ParameterDecl::boolean("b")},
                         {"A", "B"});
  MarginalStats stats;
  stats.continuous["x"] = {1.0, 0.25};
  stats.continuous["near_zero"] = {0.05, 0.5};
  stats.p_true["b"] = 0.5;
  stats.acp_counts = {{"A", 1}, {"B", 1}};
  const auto t0 = Clock::now();
  const auto draws = generate(stats, schema, 100000, 6);
  const double gen_time = seconds_since(t0);
  std::size_t non_positive = 0;
  double sum = 0.0;
  for (const auto& v : draws) {
    non_positive += v.values.at("x") <= 0.0;
    non_positive += v.values.at("near_zero") <= 0.0;
    sum += v.values.at("x");
  }
  const double mean = sum / draws.size();
  const double oracle = surrogate::testing::truncated_normal_mean(1.0, 0.5, 0.0, 5.0);
  const double se = std::sqrt(surrogate::testing::truncated_normal_variance(1.0, 0.5, 0.0, 5.0) / draws.size());
  const double z = (mean - oracle) / se;
  const bool ok = draws.size() == 100000 && non_positive == 0 && std::abs(z) < 3.0 && gen_time < 5.0;
  return {ok, std::to_string(non_positive) + " non-positive; mean " + fmt("%.5f", mean) + " vs oracle " +
                  fmt("%.5f", oracle) + " (" + fmt("%.2f", z) + " SE); generation " + fmt("%.2f", gen_time) + " s"};
}

// Shared toy corpus for 7-9 ---------------------------------------------------
struct ToyCorpus {
  std::unique_ptr<TempDir> dir;
  std::string schema_path;
};

ToyCorpus make_corpus(std::uint64_t seed) {
  ToyCorpus c{std::make_unique<TempDir>("acc-corpus"), ""};
  const auto schema = toy_schema();
  generate_corpus(ToyWorld::create(schema, 1), schema, {232, 3, seed}, c.dir->path());
  c.schema_path = (c.dir->path() / "toy_schema.json").string();
  std::ofstream(c.schema_path) << schema.to_json().dump(2);
  return c;
}

PipelineConfig toy_config(const ToyCorpus& corpus, const fs::path& out) {
  auto cfg = PipelineConfig::load(SURROGATE_CONFIG_DIR "/toy_pipeline.json");
  cfg.corpus = corpus.dir->path().string();
  cfg.schema = corpus.schema_path;
  cfg.rules = SURROGATE_CONFIG_DIR "/baseline_rules.json";
  cfg.out = out.string();
  return cfg;
}

// 7 ------------------------------------------------------------------------
Outcome speed_checks() {
  const auto corpus = make_corpus(1);
  const auto ds = ingest(corpus.dir->path(), ParameterSchema::load(corpus.schema_path));
  const auto y = label(ds, RuleSet::baseline());
  const auto vectors = generate(fit_marginals(ds), ds.schema, 100000, 7);
  const auto X = to_feature_matrix(ds.schema, vectors);

  auto timed_predict = [&](std::size_t trees) {
    ForestParams p;
    p.n_trees = trees;
    p.max_depth = 15;
    p.seed = 7;
    const auto forest = ForestModel::train(ds.X, y, p);
    const auto t0 = Clock::now();
    const auto labels = forest.predict(X);
    const double took = seconds_since(t0);
    return std::pair{took, labels.size()};
  };
  const auto [small_t, small_n] = timed_predict(500);
  const auto [big_t, big_n] = timed_predict(10000);
  const bool ok = small_n == 100000 && big_n == 100000 && small_t < 10.0 && big_t < 600.0;
  return {ok, "500 trees: " + fmt("%.2f", small_t) + " s; 10,000 trees: " + fmt("%.1f", big_t) + " s on " +
                  std::to_string(worker_count()) + " worker(s)"};
}

// 8 ------------------------------------------------------------------------
Outcome planted_signal() {
  std::vector<double> accuracies;
  int directions = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = make_corpus(seed);
    TempDir out("acc-signal");
    auto cfg = toy_config(corpus, out.path());
    cfg.seed = seed;
    cfg.classifiers = {"forest"};
    cfg.analysis_model = "forest";
    run_pipeline(cfg);
    const double acc = read_evaluations(out.path()).at(0).score;
    accuracies.push_back(acc);
    const auto analysis = nlohmann::json::parse(std::ifstream(out / artifacts::kAnalysis));
    double x1 = NAN, x2 = NAN;
    for (const auto& e : analysis.at("mean_shift")) {
      if (e.at("parameter") == "x1") x1 = e.at("relative_shift");
      if (e.at("parameter") == "x2") x2 = e.at("relative_shift");
    }
    const bool recovered = x1 > 0 && x2 < 0;
    directions += recovered;
    per_seed << " " << format_score(acc) << (recovered ? "" : "*");
  }
  auto sorted = accuracies;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[4] + sorted[5]);
  const bool ok = median >= 0.85 && directions >= 9;
  return {ok, "median accuracy " + format_score(median) + ", directions recovered " + std::to_string(directions) +
                  "/10; per seed:" + per_seed.str()};
}

// 9 ------------------------------------------------------------------------
void drop_timestamps(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("timestamp");
    for (auto& [k, v] : j.items()) drop_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) drop_timestamps(v);
  }
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    auto text = os.str();
    if (e.path().extension() == ".json") {
      auto j = nlohmann::json::parse(text);
      drop_timestamps(j);
      j.erase("out");
      text = j.dump(2);
    }
    out[fs::relative(e.path(), dir).string()] = std::move(text);
  }
  return out;
}

Outcome determinism() {
  const auto corpus = make_corpus(1);
  TempDir a("acc-det-a"), b("acc-det-b");
  run_pipeline(toy_config(corpus, a.path()));
  run_pipeline(toy_config(corpus, b.path()));
  const auto sa = snapshot(a.path()), sb = snapshot(b.path());
  std::size_t differing = sa.size() == sb.size() ? 0 : 1;
  std::string first;
  for (const auto& [name, text] : sa) {
    const auto it = sb.find(name);
    if (it == sb.end() || it->second != text) {
      ++differing;
      if (first.empty()) first = " first: " + name;
    }
  }
  return {differing == 0, std::to_string(sa.size()) + " files compared, " + std::to_string(differing) + " differ" + first};
}

}  // namespace

int main() {
  criterion(1, "published confusion-matrix accuracies", 1.0, published_scores);
  criterion(2, "target oracle, 1000 random datasets", 10.0, target_oracle);
  criterion(3, "MLP gradient check, 100 random nets", 30.0, gradient_check);
  criterion(4, "L-BFGS quadratic and Rosenbrock", 5.0, lbfgs_checks);
  criterion(5, "SMO on 200 separable 2-D sets", 60.0, smo_checks);
  criterion(6, "truncated-normal sampler, 100,000 draws", 0.0, sampler_checks);
  criterion(7, "forest classifies 100,000 vectors", 0.0, speed_checks);
  criterion(8, "planted signal over 10 seeds", 300.0, planted_signal);
  criterion(9, "pipeline rerun determinism", 0.0, determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
