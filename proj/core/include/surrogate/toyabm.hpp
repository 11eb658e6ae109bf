#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "surrogate/corpus.hpp"
#include "surrogate/schema.hpp"

namespace surrogate {

/// Synthetic stand-in for a real agent-based model. Responses are linear in
/// the parameters plus Gaussian noise (see README for the coefficient table):
///
///   qli          = clamp01(0.5 x1 + 0.2 b1 + 0.2 q + 0.1 (1 - x2) + e1)
///   unemployment = clamp01(0.6 x2 + 0.2 (1 - b2) + 0.1 (1 - x1) + 0.1 (1 - q) + e2)
///   gdp_index    = max(0, 1 + x1 - 0.5 x2 + e3)
///   gini         = clamp01(0.4 + 0.2 x2 - 0.1 b3 + e4)
///
/// where q is the quality of the active ACP. x3..x5 carry no signal.
struct ToyWorld {
  std::map<std::string, double> acp_quality;
  double noise_std = 0.05;

  /// Quality of ACP i drawn uniformly from [0, 1] on stream mix_seed(world_seed, i).
  static ToyWorld create(const ParameterSchema& schema, std::uint64_t world_seed, double noise_std = 0.05);
};

inline constexpr int kFinalMonth = 239;

/// x1..x5 continuous on [0, 1], b1..b3 boolean, and `n_acps` regions named acp_01, acp_02, ...
ParameterSchema toy_schema(std::size_t n_acps = 46);

/// Deterministic in (world, v, run_seed). Throws InvalidVector.
OutcomeMetrics simulate(const ToyWorld& world, const ParameterVector& v, std::uint64_t run_seed);

struct CorpusSpec {
  std::size_t n_configs = 232;
  std::size_t runs_per_config = 3;
  std::uint64_t seed = 1;
};

/// Writes n_configs directories (config_0000, ...) each holding config.json,
/// averages.csv with months 0..239 whose last row is the mean over runs, and
/// one numbered folder per run. Parameters are uniform within schema bounds.
/// Throws IoFailure.
void generate_corpus(const ToyWorld& world, const ParameterSchema& schema, const CorpusSpec& spec,
                     const std::filesystem::path& out);

}  // namespace surrogate
