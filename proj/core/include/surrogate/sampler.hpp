#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/corpus.hpp"
#include "surrogate/schema.hpp"

namespace surrogate {

struct ContinuousMarginal {
  double mean = 0.0;
  double observed_std = 0.0;  // population convention
};

struct MarginalStats {
  std::map<std::string, ContinuousMarginal> continuous;
  std::map<std::string, double> p_true;
  std::map<std::string, std::size_t> acp_counts;

  nlohmann::json to_json() const;
  static MarginalStats from_json(const nlohmann::json& j);
};

/// Throws EmptyDataset.
MarginalStats fit_marginals(const Dataset& dataset);

enum class AcpSampling { Uniform, Frequency };
enum class BooleanSampling { Observed, FairCoin };

struct SamplerOptions {
  double sigma_scale = 2.0;  // sampling std = sigma_scale * observed std
  AcpSampling acp = AcpSampling::Uniform;
  BooleanSampling booleans = BooleanSampling::Observed;
  double min_acceptance = 1e-4;
};

/// Draws each continuous parameter from Normal(mean, sigma_scale * std)
/// restricted to (0, inf) and to the schema bounds by rejection; booleans
/// from Bernoulli(p_true); the ACP from a categorical over the ACP group.
/// Output is generated in fixed-size shards with per-shard streams, so the
/// result depends only on (stats, schema, n, seed, options).
/// Throws RejectionStall when a parameter's acceptance probability is below
/// options.min_acceptance, InvalidStats on malformed statistics.
std::vector<ParameterVector> generate(const MarginalStats& stats, const ParameterSchema& schema, std::size_t n,
                                      std::uint64_t seed, const SamplerOptions& options = {});

/// Probability that Normal(mean, sd) lands in (lower, upper], with lower
/// already raised to at least 0.
double acceptance_probability(double mean, double sd, double lower, double upper);

void write_jsonl(std::ostream& out, const ParameterSchema& schema, const std::vector<ParameterVector>& vectors);
std::vector<ParameterVector> read_jsonl(std::istream& in, const ParameterSchema& schema);

}  // namespace surrogate
