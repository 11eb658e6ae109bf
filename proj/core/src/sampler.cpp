#include "surrogate/sampler.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "surrogate/error.hpp"
#include "surrogate/parallel.hpp"

namespace surrogate {

nlohmann::json MarginalStats::to_json() const {
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [name, m] : continuous) c[name] = {{"mean", m.mean}, {"observed_std", m.observed_std}};
  return {{"continuous", std::move(c)}, {"p_true", p_true}, {"acp_counts", acp_counts}};
}

MarginalStats MarginalStats::from_json(const nlohmann::json& j) {
  try {
    MarginalStats s;
    for (const auto& [name, m] : j.at("continuous").items()) {
      s.continuous[name] = {m.at("mean").get<double>(), m.at("observed_std").get<double>()};
    }
    s.p_true = j.at("p_true").get<std::map<std::string, double>>();
    s.acp_counts = j.at("acp_counts").get<std::map<std::string, std::size_t>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidStats, e.what());
  }
}

MarginalStats fit_marginals(const Dataset& dataset) {
  if (dataset.records.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit marginals to zero records");
  const auto n = static_cast<double>(dataset.records.size());
  MarginalStats stats;
  for (const auto& e : dataset.schema.entries()) {
    double sum = 0.0;
    for (const auto& r : dataset.records) sum += r.params.values.at(e.name);
    const double mean = sum / n;
    if (e.kind == ParamKind::Boolean) {
      stats.p_true[e.name] = mean;
      continue;
    }
    double ss = 0.0;
    for (const auto& r : dataset.records) {
      const double d = r.params.values.at(e.name) - mean;
      ss += d * d;
    }
    stats.continuous[e.name] = {mean, std::sqrt(ss / n)};
  }
  for (const auto& a : dataset.schema.acps()) stats.acp_counts[a] = 0;
  for (const auto& r : dataset.records) ++stats.acp_counts[r.params.acp];
  return stats;
}

double acceptance_probability(double mean, double sd, double lower, double upper) {
  const double lo = std::max(lower, 0.0);
  if (!(lo < upper)) return 0.0;
  if (sd == 0.0) return (mean > 0.0 && mean >= lower && mean <= upper) ? 1.0 : 0.0;
  const double zlo = (lo - mean) / sd;
  const double zhi = (upper - mean) / sd;
  // Use whichever tail keeps the two terms away from 1.
  if (zlo > 0.0) return 0.5 * std::erfc(zlo / std::sqrt(2.0)) - 0.5 * std::erfc(zhi / std::sqrt(2.0));
  return 0.5 * std::erfc(-zhi / std::sqrt(2.0)) - 0.5 * std::erfc(-zlo / std::sqrt(2.0));
}

namespace {

struct Plan {
  enum class Kind { Continuous, Boolean } kind;
  const std::string* name;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double p = 0.0;
};

constexpr std::size_t kShardSize = 4096;
constexpr std::size_t kMaxRejections = 10'000'000;

}  // namespace

std::vector<ParameterVector> generate(const MarginalStats& stats, const ParameterSchema& schema, std::size_t n,
                                      std::uint64_t seed, const SamplerOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidStats, "sample count must be at least 1");
  if (!(options.sigma_scale >= 0.0)) throw Error(ErrorCode::InvalidStats, "sigma_scale must be non-negative");

  std::vector<Plan> plans;
  for (const auto& e : schema.entries()) {
    Plan plan{};
    plan.name = &e.name;
    if (e.kind == ParamKind::Continuous) {
      auto it = stats.continuous.find(e.name);
      if (it == stats.continuous.end()) throw Error(ErrorCode::InvalidStats, "no marginal for '" + e.name + "'");
      const auto& m = it->second;
      if (!std::isfinite(m.mean) || !std::isfinite(m.observed_std) || m.observed_std < 0.0) {
        throw Error(ErrorCode::InvalidStats, "marginal for '" + e.name + "' is not a finite mean/std pair");
      }
      plan.kind = Plan::Kind::Continuous;
      plan.mean = m.mean;
      plan.sd = options.sigma_scale * m.observed_std;
      plan.lower = e.lower;
      plan.upper = e.upper;
      const double accept = acceptance_probability(plan.mean, plan.sd, plan.lower, plan.upper);
      if (accept < options.min_acceptance) {
        std::ostringstream os;
        os << "'" << e.name << "' acceptance probability " << accept << " (mean " << plan.mean << ", sd " << plan.sd
           << ", bounds [" << e.lower << ", " << e.upper << "])";
        throw Error(ErrorCode::RejectionStall, os.str());
      }
    } else {
      plan.kind = Plan::Kind::Boolean;
      if (options.booleans == BooleanSampling::FairCoin) {
        plan.p = 0.5;
      } else {
        auto it = stats.p_true.find(e.name);
        if (it == stats.p_true.end()) throw Error(ErrorCode::InvalidStats, "no frequency for '" + e.name + "'");
        if (!(it->second >= 0.0 && it->second <= 1.0)) {
          throw Error(ErrorCode::InvalidStats, "p_true for '" + e.name + "' outside [0, 1]");
        }
        plan.p = it->second;
      }
    }
    plans.push_back(plan);
  }

  const auto& acps = schema.acps();
  std::vector<double> acp_weights(acps.size(), 1.0);
  if (options.acp == AcpSampling::Frequency && !acps.empty()) {
    double total = 0.0;
    for (std::size_t i = 0; i < acps.size(); ++i) {
      auto it = stats.acp_counts.find(acps[i]);
      acp_weights[i] = it == stats.acp_counts.end() ? 0.0 : static_cast<double>(it->second);
      total += acp_weights[i];
    }
    if (total <= 0.0) throw Error(ErrorCode::InvalidStats, "frequency-weighted ACP sampling with no observed ACPs");
  }

  std::vector<ParameterVector> out(n);
  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  parallel_for(shards, [&](std::size_t s) {
    std::mt19937_64 rng(mix_seed(seed, s));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::discrete_distribution<std::size_t> pick_acp(acp_weights.begin(), acp_weights.end());
    const std::size_t end = std::min(n, (s + 1) * kShardSize);
    for (std::size_t i = s * kShardSize; i < end; ++i) {
      auto& v = out[i];
      for (const auto& plan : plans) {
        double x;
        if (plan.kind == Plan::Kind::Boolean) {
          x = unit(rng) < plan.p ? 1.0 : 0.0;
        } else if (plan.sd == 0.0) {
          x = plan.mean;
        } else {
          std::size_t tries = 0;
          do {
            if (++tries > kMaxRejections) {
              throw Error(ErrorCode::RejectionStall, "rejection sampler stalled on '" + *plan.name + "'");
            }
            x = plan.mean + plan.sd * normal(rng);
          } while (!(x > 0.0 && x >= plan.lower && x <= plan.upper));
        }
        v.values.emplace(*plan.name, x);
      }
      if (!acps.empty()) v.acp = acps[pick_acp(rng)];
    }
  });
  return out;
}

void write_jsonl(std::ostream& out, const ParameterSchema& schema, const std::vector<ParameterVector>& vectors) {
  for (const auto& v : vectors) out << config_to_json(schema, v).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing JSON-lines output");
}

std::vector<ParameterVector> read_jsonl(std::istream& in, const ParameterSchema& schema) {
  std::vector<ParameterVector> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(config_from_json(schema, nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedConfig, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace surrogate
