#include "surrogate/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "surrogate/error.hpp"

namespace surrogate {

namespace fs = std::filesystem;

std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::Qli: return "qli";
    case Metric::GdpIndex: return "gdp_index";
    case Metric::Unemployment: return "unemployment";
    case Metric::Gini: return "gini";
  }
  return "";
}

Metric metric_from_name(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidRule, "unknown metric '" + std::string(name) + "'");
}

double OutcomeMetrics::get(Metric m) const noexcept {
  switch (m) {
    case Metric::Qli: return qli;
    case Metric::GdpIndex: return gdp_index;
    case Metric::Unemployment: return unemployment;
    case Metric::Gini: return gini;
  }
  return 0.0;
}

void validate_outcome(const OutcomeMetrics& m) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  std::ostringstream os;
  if (!unit(m.qli)) os << "qli=" << m.qli << " outside [0, 1]";
  else if (!unit(m.unemployment)) os << "unemployment=" << m.unemployment << " outside [0, 1]";
  else if (!unit(m.gini)) os << "gini=" << m.gini << " outside [0, 1]";
  else if (!(m.gdp_index >= 0.0) || !std::isfinite(m.gdp_index)) os << "gdp_index=" << m.gdp_index << " negative";
  else if (m.month < 0) os << "month=" << m.month << " negative";
  else return;
  throw Error(ErrorCode::ValidationFailed, os.str());
}

std::vector<double> Dataset::metric_column(Metric m) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.outcome.get(m));
  return out;
}

std::vector<ParameterVector> Dataset::parameter_vectors() const {
  std::vector<ParameterVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.params);
  return out;
}

nlohmann::json Dataset::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"config_id", r.config_id},
                    {"config", config_to_json(schema, r.params)},
                    {"outcome",
                     {{"month", r.outcome.month},
                      {"qli", r.outcome.qli},
                      {"gdp_index", r.outcome.gdp_index},
                      {"unemployment", r.outcome.unemployment},
                      {"gini", r.outcome.gini}}}});
  }
  return {{"schema", schema.to_json()}, {"records", std::move(recs)}, {"skipped", skipped}};
}

Dataset Dataset::from_json(const nlohmann::json& j) {
  try {
    auto schema = ParameterSchema::from_json(j.at("schema"));
    std::vector<RunRecord> records;
    for (const auto& r : j.at("records")) {
      RunRecord rec;
      rec.config_id = r.at("config_id").get<std::string>();
      rec.params = config_from_json(schema, r.at("config"));
      const auto& o = r.at("outcome");
      rec.outcome = {o.at("qli").get<double>(), o.at("gdp_index").get<double>(),
                     o.at("unemployment").get<double>(), o.at("gini").get<double>(), o.at("month").get<int>()};
      validate_outcome(rec.outcome);
      records.push_back(std::move(rec));
    }
    auto ds = make_dataset(std::move(schema), std::move(records));
    if (j.contains("skipped")) ds.skipped = j.at("skipped").get<std::vector<std::string>>();
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedConfig, std::string("dataset file: ") + e.what());
  }
}

Dataset make_dataset(ParameterSchema schema, std::vector<RunRecord> records) {
  Dataset ds;
  ds.schema = std::move(schema);
  ds.records = std::move(records);
  ds.X = Matrix(ds.records.size(), ds.schema.feature_count());
  ds.metrics = Matrix(ds.records.size(), kAllMetrics.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    auto f = vectorize(ds.schema, ds.records[i].params);
    std::copy(f.begin(), f.end(), ds.X.row(i).begin());
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) ds.metrics(i, m) = ds.records[i].outcome.get(kAllMetrics[m]);
  }
  return ds;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

AveragesTable parse_averages(std::string_view text) {
  AveragesTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::MalformedAverages, "line " + std::to_string(line_no) + " has " +
                                                    std::to_string(fields.size()) + " fields, header has " +
                                                    std::to_string(table.header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[i]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::MalformedAverages, "line " + std::to_string(line_no) + " column '" +
                                                      table.header[i] + "': cannot parse '" + std::string(f) + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

OutcomeMetrics final_month(const AveragesTable& table) {
  auto column = [&](std::string_view name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const auto month = column("month");
  const auto qli = column("qli");
  const auto gdp = column("gdp_index");
  const auto unemployment = column("unemployment");
  const auto gini = column("gini");
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, "averages table has no data rows");

  std::size_t best = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i][month] > table.rows[best][month]) best = i;
  }
  const auto& r = table.rows[best];
  if (r[month] != std::floor(r[month])) {
    throw Error(ErrorCode::ValidationFailed, "month " + std::to_string(r[month]) + " is not an integer");
  }
  return {r[qli], r[gdp], r[unemployment], r[gini], static_cast<int>(r[month])};
}

Dataset ingest(const fs::path& root, const ParameterSchema& schema) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::RootNotFound, root.string());

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  std::vector<RunRecord> records;
  std::vector<std::string> skipped;
  for (const auto& dir : dirs) {
    const auto config_path = dir / kConfigFile;
    const auto averages_path = dir / kAveragesFile;
    const bool has_config = fs::is_regular_file(config_path);
    const bool has_averages = fs::is_regular_file(averages_path);
    if (!has_config || !has_averages) {
      skipped.push_back(dir.filename().string() + ": missing " +
                        (has_config ? std::string(kAveragesFile) : std::string(kConfigFile)));
      continue;
    }

    RunRecord rec;
    rec.config_id = dir.filename().string();

    nlohmann::json config;
    try {
      config = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedConfig, config_path.string() + ": " + e.what());
    }
    try {
      rec.params = config_from_json(schema, config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedConfig) {
        throw Error(ErrorCode::MalformedConfig, config_path.string() + ": " + e.what());
      }
      throw Error(ErrorCode::ValidationFailed, config_path.string() + ": " + e.what());
    }

    try {
      rec.outcome = final_month(parse_averages(read_file(averages_path)));
      validate_outcome(rec.outcome);
    } catch (const Error& e) {
      const auto code = e.code() == ErrorCode::ValidationFailed ? ErrorCode::ValidationFailed
                                                                : ErrorCode::MalformedAverages;
      throw Error(code, averages_path.string() + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }

  auto ds = make_dataset(schema, std::move(records));
  ds.skipped = std::move(skipped);
  return ds;
}

}  // namespace surrogate
