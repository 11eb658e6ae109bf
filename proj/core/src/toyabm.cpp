#include "surrogate/toyabm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "surrogate/error.hpp"
#include "surrogate/format.hpp"
#include "surrogate/parallel.hpp"

namespace surrogate {

namespace fs = std::filesystem;

ToyWorld ToyWorld::create(const ParameterSchema& schema, std::uint64_t world_seed, double noise_std) {
  if (!(noise_std >= 0.0)) throw Error(ErrorCode::InvalidParams, "noise_std must be non-negative");
  ToyWorld w;
  w.noise_std = noise_std;
  const auto& acps = schema.acps();
  for (std::size_t i = 0; i < acps.size(); ++i) {
    std::mt19937_64 rng(mix_seed(world_seed, i));
    w.acp_quality[acps[i]] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  return w;
}

ParameterSchema toy_schema(std::size_t n_acps) {
  std::vector<ParameterDecl> entries;
  for (int i = 1; i <= 5; ++i) entries.push_back(ParameterDecl::continuous("x" + std::to_string(i), 0.0, 1.0));
  for (int i = 1; i <= 3; ++i) entries.push_back(ParameterDecl::boolean("b" + std::to_string(i)));
  std::vector<std::string> acps;
  for (std::size_t i = 1; i <= n_acps; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "acp_%02zu", i);
    acps.emplace_back(buf);
  }
  return ParameterSchema(std::move(entries), std::move(acps));
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double require(const ParameterVector& v, const char* name, bool boolean) {
  auto it = v.values.find(name);
  if (it == v.values.end()) throw Error(ErrorCode::InvalidVector, std::string("missing '") + name + "'");
  const double x = it->second;
  const bool ok = boolean ? (x == 0.0 || x == 1.0) : (x >= 0.0 && x <= 1.0);
  if (!ok) throw Error(ErrorCode::InvalidVector, std::string("'") + name + "' = " + format_double(x) + " out of range");
  return x;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
}

std::string metrics_row(int month, const OutcomeMetrics& m) {
  return std::to_string(month) + ',' + format_double(m.qli) + ',' + format_double(m.gdp_index) + ',' +
         format_double(m.unemployment) + ',' + format_double(m.gini) + '\n';
}

constexpr const char* kHeader = "month,qli,gdp_index,unemployment,gini\n";

}  // namespace

OutcomeMetrics simulate(const ToyWorld& world, const ParameterVector& v, std::uint64_t run_seed) {
  const double x1 = require(v, "x1", false);
  const double x2 = require(v, "x2", false);
  const double b1 = require(v, "b1", true);
  const double b2 = require(v, "b2", true);
  const double b3 = require(v, "b3", true);
  auto q_it = world.acp_quality.find(v.acp);
  if (q_it == world.acp_quality.end()) throw Error(ErrorCode::InvalidVector, "unknown ACP '" + v.acp + "'");
  const double q = q_it->second;

  std::mt19937_64 rng(run_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double e1 = world.noise_std * noise(rng);
  const double e2 = world.noise_std * noise(rng);
  const double e3 = world.noise_std * noise(rng);
  const double e4 = world.noise_std * noise(rng);

  OutcomeMetrics m;
  m.qli = clamp01(0.5 * x1 + 0.2 * b1 + 0.2 * q + 0.1 * (1.0 - x2) + e1);
  m.unemployment = clamp01(0.6 * x2 + 0.2 * (1.0 - b2) + 0.1 * (1.0 - x1) + 0.1 * (1.0 - q) + e2);
  m.gdp_index = std::max(0.0, 1.0 + x1 - 0.5 * x2 + e3);
  m.gini = clamp01(0.4 + 0.2 * x2 - 0.1 * b3 + e4);
  m.month = kFinalMonth;
  return m;
}

void generate_corpus(const ToyWorld& world, const ParameterSchema& schema, const CorpusSpec& spec,
                     const fs::path& out) {
  if (spec.runs_per_config < 1) throw Error(ErrorCode::InvalidParams, "runs_per_config must be at least 1");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out.string() + ": " + ec.message());

  parallel_for(spec.n_configs, [&](std::size_t c) {
    const std::uint64_t config_seed = mix_seed(spec.seed, c);
    std::mt19937_64 rng(config_seed);
    ParameterVector v;
    for (const auto& e : schema.entries()) {
      if (e.kind == ParamKind::Boolean) {
        v.values[e.name] = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;
      } else {
        v.values[e.name] = std::uniform_real_distribution<double>(e.lower, e.upper)(rng);
      }
    }
    if (!schema.acps().empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, schema.acps().size() - 1);
      v.acp = schema.acps()[pick(rng)];
    }

    char name[32];
    std::snprintf(name, sizeof name, "config_%04zu", c);
    const fs::path dir = out / name;
    fs::create_directories(dir);

    OutcomeMetrics mean{};
    for (std::size_t r = 0; r < spec.runs_per_config; ++r) {
      const auto m = simulate(world, v, mix_seed(config_seed, r + 1));
      const fs::path run_dir = dir / std::to_string(r);
      fs::create_directories(run_dir);
      write_text(run_dir / "results.csv", std::string(kHeader) + metrics_row(kFinalMonth, m));
      mean.qli += m.qli;
      mean.gdp_index += m.gdp_index;
      mean.unemployment += m.unemployment;
      mean.gini += m.gini;
    }
    const auto runs = static_cast<double>(spec.runs_per_config);
    mean.qli /= runs;
    mean.gdp_index /= runs;
    mean.unemployment /= runs;
    mean.gini /= runs;
    mean.month = kFinalMonth;

    // Months before the last interpolate from a neutral starting state; only
    // the final row is read back by ingest.
    const OutcomeMetrics start{0.5, 1.0, 0.5, 0.5, 0};
    std::string csv = kHeader;
    for (int t = 0; t < kFinalMonth; ++t) {
      const double w = static_cast<double>(t) / kFinalMonth;
      csv += metrics_row(t, {start.qli + (mean.qli - start.qli) * w,
                             start.gdp_index + (mean.gdp_index - start.gdp_index) * w,
                             start.unemployment + (mean.unemployment - start.unemployment) * w,
                             start.gini + (mean.gini - start.gini) * w, t});
    }
    csv += metrics_row(kFinalMonth, mean);

    write_text(dir / kConfigFile, config_to_json(schema, v).dump(2) + "\n");
    write_text(dir / kAveragesFile, csv);
  });
}

}  // namespace surrogate
