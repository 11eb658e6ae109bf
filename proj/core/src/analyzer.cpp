#include "surrogate/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "surrogate/error.hpp"
#include "surrogate/format.hpp"

namespace surrogate {

namespace {

std::size_t check_inputs(const std::vector<ParameterVector>& vectors, std::span<const int> labels) {
  if (vectors.empty()) throw Error(ErrorCode::EmptyInput, "no vectors to analyze");
  if (vectors.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(vectors.size()) + " vectors but " +
                                               std::to_string(labels.size()) + " labels");
  }
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw Error(ErrorCode::NoPositives, "no vector is labeled optimal");
  return positives;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<MeanShiftEntry> mean_shift_report(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                              const ParameterSchema& schema, const MarginalStats* reference) {
  const auto positives = check_inputs(vectors, labels);
  std::vector<MeanShiftEntry> out;
  for (const auto& e : schema.entries()) {
    if (e.kind != ParamKind::Continuous) continue;
    double sum_all = 0.0;
    double sum_opt = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const double x = vectors[i].values.at(e.name);
      sum_all += x;
      if (labels[i] == 1) sum_opt += x;
    }
    MeanShiftEntry entry;
    entry.parameter = e.name;
    entry.mean_all = sum_all / static_cast<double>(vectors.size());
    entry.mean_optimal = sum_opt / static_cast<double>(positives);
    entry.shift_defined = entry.mean_all != 0.0;
    entry.relative_shift = entry.shift_defined ? (entry.mean_optimal - entry.mean_all) / std::abs(entry.mean_all) : 0.0;
    if (reference) {
      auto it = reference->continuous.find(e.name);
      if (it != reference->continuous.end()) {
        entry.sample_mean = it->second.mean;
        if (it->second.mean != 0.0) {
          entry.shift_vs_sample_mean = (entry.mean_optimal - it->second.mean) / std::abs(it->second.mean);
        }
      }
    }
    out.push_back(std::move(entry));
  }
  std::stable_sort(out.begin(), out.end(), [](const MeanShiftEntry& a, const MeanShiftEntry& b) {
    if (a.shift_defined != b.shift_defined) return a.shift_defined;
    return std::abs(a.relative_shift) > std::abs(b.relative_shift);
  });
  return out;
}

std::vector<BooleanRate> boolean_rates(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                       const ParameterSchema& schema) {
  const auto positives = check_inputs(vectors, labels);
  std::vector<BooleanRate> out;
  for (const auto& e : schema.entries()) {
    if (e.kind != ParamKind::Boolean) continue;
    std::size_t true_all = 0;
    std::size_t true_opt = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].values.at(e.name) != 1.0) continue;
      ++true_all;
      if (labels[i] == 1) ++true_opt;
    }
    out.push_back({e.name, static_cast<double>(true_all) / static_cast<double>(vectors.size()),
                   static_cast<double>(true_opt) / static_cast<double>(positives)});
  }
  return out;
}

std::vector<AcpRankEntry> acp_ranking(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                      const ParameterSchema& schema) {
  check_inputs(vectors, labels);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // samples, optimal
  for (const auto& a : schema.acps()) counts[a] = {0, 0};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& c = counts[vectors[i].acp];
    ++c.first;
    if (labels[i] == 1) ++c.second;
  }

  std::vector<AcpRankEntry> out;
  for (const auto& [acp, c] : counts) {
    AcpRankEntry e;
    e.acp = acp;
    e.sample_count = c.first;
    e.optimal_count = c.second;
    e.rate_defined = c.first > 0;
    e.optimal_rate = e.rate_defined ? static_cast<double>(c.second) / static_cast<double>(c.first) : 0.0;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const AcpRankEntry& a, const AcpRankEntry& b) {
    if (a.rate_defined != b.rate_defined) return a.rate_defined;
    if (a.optimal_rate != b.optimal_rate) return a.optimal_rate > b.optimal_rate;
    return a.acp < b.acp;
  });
  std::size_t rank = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool same = i > 0 && out[i].rate_defined == out[i - 1].rate_defined &&
                      out[i].optimal_rate == out[i - 1].optimal_rate;
    if (!same) ++rank;
    out[i].rank = rank;
  }
  return out;
}

std::string_view to_string(Agreement a) noexcept {
  switch (a) {
    case Agreement::Agree: return "agree";
    case Agreement::Disagree: return "disagree";
    case Agreement::Undefined: return "undefined";
  }
  return "undefined";
}

std::vector<DirectionAgreement> direction_agreement(std::span<const MeanShiftEntry> sample_report,
                                                    std::span<const MeanShiftEntry> predicted_report) {
  std::map<std::string, const MeanShiftEntry*> predicted;
  for (const auto& e : predicted_report) predicted[e.parameter] = &e;
  if (predicted.size() != sample_report.size()) {
    throw Error(ErrorCode::SchemaMismatch, "reports cover different parameter sets");
  }
  auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
  std::vector<DirectionAgreement> out;
  for (const auto& s : sample_report) {
    auto it = predicted.find(s.parameter);
    if (it == predicted.end()) {
      throw Error(ErrorCode::SchemaMismatch, "parameter '" + s.parameter + "' missing from predicted report");
    }
    const auto& p = *it->second;
    DirectionAgreement row{s.parameter, Agreement::Undefined, s.relative_shift, p.relative_shift};
    if (s.shift_defined && p.shift_defined) {
      row.agreement = sign(s.relative_shift) == sign(p.relative_shift) ? Agreement::Agree : Agreement::Disagree;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string percent(double fraction) {
  char buf[32];
  const double pct = fraction * 100.0;
  // One decimal unless the value is a whole percent.
  if (std::abs(pct - std::round(pct)) < 0.05) std::snprintf(buf, sizeof buf, "%+.0f%%", std::round(pct));
  else std::snprintf(buf, sizeof buf, "%+.1f%%", pct);
  return buf;
}

std::string describe_shift(const std::string& parameter, double predicted_shift, std::optional<double> sample_shift) {
  std::string s = parameter + ": " + percent(predicted_shift);
  if (sample_shift) s += " vs sample " + percent(*sample_shift);
  return s;
}

std::vector<FeatureImportance> rank_importances(const std::vector<std::string>& names,
                                                std::span<const double> importances) {
  if (names.size() != importances.size()) throw Error(ErrorCode::LengthMismatch, "feature names vs importances");
  std::vector<FeatureImportance> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], importances[i]});
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.importance > b.importance; });
  return out;
}

void write_mean_shift_csv(std::ostream& out, std::span<const MeanShiftEntry> entries) {
  out << "parameter,mean_all,mean_optimal,relative_shift,shift_defined,sample_mean,shift_vs_sample_mean\n";
  for (const auto& e : entries) {
    out << e.parameter << ',' << format_double(e.mean_all) << ',' << format_double(e.mean_optimal) << ','
        << (e.shift_defined ? format_double(e.relative_shift) : std::string()) << ','
        << (e.shift_defined ? "true" : "false") << ',' << optional_number(e.sample_mean) << ','
        << optional_number(e.shift_vs_sample_mean) << '\n';
  }
}

void write_boolean_rates_csv(std::ostream& out, std::span<const BooleanRate> rates) {
  out << "parameter,p_true_all,p_true_optimal\n";
  for (const auto& r : rates) {
    out << r.parameter << ',' << format_double(r.p_true_all) << ',' << format_double(r.p_true_optimal) << '\n';
  }
}

void write_acp_ranking_csv(std::ostream& out, std::span<const AcpRankEntry> ranking) {
  out << "rank,acp,optimal_rate,optimal_count,sample_count,rate_defined\n";
  for (const auto& r : ranking) {
    out << r.rank << ',' << r.acp << ',' << (r.rate_defined ? format_double(r.optimal_rate) : std::string()) << ','
        << r.optimal_count << ',' << r.sample_count << ',' << (r.rate_defined ? "true" : "false") << '\n';
  }
}

void write_agreement_csv(std::ostream& out, std::span<const DirectionAgreement> rows) {
  out << "parameter,sample_shift,predicted_shift,agreement\n";
  for (const auto& r : rows) {
    out << r.parameter << ',' << format_double(r.sample_shift) << ',' << format_double(r.predicted_shift) << ','
        << to_string(r.agreement) << '\n';
  }
}

void write_importance_csv(std::ostream& out, std::span<const FeatureImportance> rows) {
  out << "feature,importance\n";
  for (const auto& r : rows) out << r.feature << ',' << format_double(r.importance) << '\n';
}

nlohmann::json to_json(std::span<const MeanShiftEntry> entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j{{"parameter", e.parameter},
                     {"mean_all", e.mean_all},
                     {"mean_optimal", e.mean_optimal},
                     {"shift_defined", e.shift_defined}};
    j["relative_shift"] = e.shift_defined ? nlohmann::json(e.relative_shift) : nlohmann::json(nullptr);
    j["sample_mean"] = e.sample_mean ? nlohmann::json(*e.sample_mean) : nlohmann::json(nullptr);
    j["shift_vs_sample_mean"] =
        e.shift_vs_sample_mean ? nlohmann::json(*e.shift_vs_sample_mean) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::json to_json(std::span<const BooleanRate> rates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rates) {
    arr.push_back({{"parameter", r.parameter}, {"p_true_all", r.p_true_all}, {"p_true_optimal", r.p_true_optimal}});
  }
  return arr;
}

nlohmann::json to_json(std::span<const AcpRankEntry> ranking) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : ranking) {
    nlohmann::json j{{"rank", r.rank},
                     {"acp", r.acp},
                     {"optimal_count", r.optimal_count},
                     {"sample_count", r.sample_count},
                     {"rate_defined", r.rate_defined}};
    j["optimal_rate"] = r.rate_defined ? nlohmann::json(r.optimal_rate) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

nlohmann::json to_json(std::span<const DirectionAgreement> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"parameter", r.parameter},
                   {"sample_shift", r.sample_shift},
                   {"predicted_shift", r.predicted_shift},
                   {"agreement", to_string(r.agreement)}});
  }
  return arr;
}

}  // namespace surrogate
