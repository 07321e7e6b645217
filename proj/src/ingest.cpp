#include "drkit/ingest.hpp"

#include "drkit/error.hpp"
#include "drkit/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace drkit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// Linear interpolation between order statistics (sorted input).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // Strip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A lone empty field on a blank line is not a record.
    if (!(record.size() == 1 && record[0].empty() && !field_started)) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::parse_error, "unterminated quoted field near line " + std::to_string(line));
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::parse_error, "empty CSV: header row required");
  CsvTable table;
  table.header = std::move(records.front());
  for (auto& h : table.header) h = std::string(trim(h));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw Error(ErrorCode::parse_error, "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                              " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open input file '" + path.string() + "'");
  return parse_csv(in);
}

LoadedData load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  return load_csv(read_csv_file(path), schema);
}

LoadedData load_csv(const CsvTable& table, const CsvSchema& schema) {
  if (schema.select.empty()) throw Error(ErrorCode::bad_config, "no columns selected");
  if (schema.label_column &&
      std::find(schema.select.begin(), schema.select.end(), *schema.label_column) != schema.select.end()) {
    throw Error(ErrorCode::bad_config, "label column '" + *schema.label_column + "' is also selected as a feature");
  }
  auto column_of = [&](const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error(ErrorCode::missing_column, "column '" + name + "' not found");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  std::vector<std::size_t> cols;
  for (const auto& name : schema.select) cols.push_back(column_of(name));

  auto is_missing_token = [&](const std::string& cell) {
    const std::string_view t = trim(cell);
    return std::any_of(schema.missing_tokens.begin(), schema.missing_tokens.end(),
                       [&](const std::string& tok) { return t == tok; });
  };

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(cols.size());
  Matrix values(n, p);
  MissingMask mask = MissingMask::Constant(n, p, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p; ++j) {
      const std::string& cell = row[cols[static_cast<std::size_t>(j)]];
      if (is_missing_token(cell)) {
        values(i, j) = std::numeric_limits<double>::quiet_NaN();
        mask(i, j) = true;
        continue;
      }
      auto v = parse_real(cell);
      if (!v) {
        throw Error(ErrorCode::parse_error, "row " + std::to_string(i + 1) + ", column '" +
                                                schema.select[static_cast<std::size_t>(j)] + "': cannot parse '" +
                                                cell + "'");
      }
      if (std::find(schema.sentinel_values.begin(), schema.sentinel_values.end(), *v) !=
          schema.sentinel_values.end()) {
        values(i, j) = std::numeric_limits<double>::quiet_NaN();
        mask(i, j) = true;
      } else {
        values(i, j) = *v;
      }
    }
  }

  LoadedData out{DataMatrix(std::move(values), schema.select, std::move(mask)), std::nullopt, {}};
  if (!schema.label_column) return out;

  const std::size_t lc = column_of(*schema.label_column);
  std::vector<int> ids(static_cast<std::size_t>(n), -1);
  bool all_int = true;
  int max_id = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string& cell = table.rows[static_cast<std::size_t>(i)][lc];
    if (is_missing_token(cell)) continue;
    auto v = parse_real(cell);
    if (!v || *v != std::floor(*v) || *v < 0 || *v > 1e6) {
      all_int = false;
      break;
    }
    ids[static_cast<std::size_t>(i)] = static_cast<int>(*v);
    max_id = std::max(max_id, static_cast<int>(*v));
  }
  if (all_int) {
    for (int id = 0; id <= max_id; ++id) out.label_names.push_back(std::to_string(id));
  } else {
    std::map<std::string, int> seen;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string& cell = table.rows[static_cast<std::size_t>(i)][lc];
      if (is_missing_token(cell)) {
        ids[static_cast<std::size_t>(i)] = -1;
        continue;
      }
      const std::string key(trim(cell));
      auto [it, inserted] = seen.emplace(key, static_cast<int>(out.label_names.size()));
      if (inserted) out.label_names.push_back(key);
      ids[static_cast<std::size_t>(i)] = it->second;
    }
  }
  out.labels = std::move(ids);
  return out;
}

SummaryTable summarize(const DataMatrix& data) {
  SummaryTable table;
  const Eigen::Index n = data.rows();
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    FeatureSummary s;
    s.name = data.feature_names[static_cast<std::size_t>(j)];
    std::vector<double> obs;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (data.missing.size() == 0 || !data.missing(i, j)) obs.push_back(data.values(i, j));
    }
    s.complete_pct = n > 0 ? 100.0 * static_cast<double>(obs.size()) / static_cast<double>(n) : 0.0;
    if (obs.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.mean = s.sd = s.min = s.q2 = s.median = s.q3 = s.max = nan;
      table.push_back(s);
      continue;
    }
    s.defined = true;
    std::sort(obs.begin(), obs.end());
    const double m = std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(obs.size());
    double ss = 0.0;
    for (double v : obs) ss += (v - m) * (v - m);
    s.mean = m;
    s.sd = obs.size() > 1 ? std::sqrt(ss / static_cast<double>(obs.size() - 1))
                          : std::numeric_limits<double>::quiet_NaN();
    s.min = obs.front();
    s.max = obs.back();
    s.q2 = quantile_sorted(obs, 0.25);
    s.median = quantile_sorted(obs, 0.5);
    s.q3 = quantile_sorted(obs, 0.75);
    table.push_back(s);
  }
  return table;
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << "feature,complete,mean,sd,min,q2,median,q3,max\n";
  for (const auto& s : table) {
    out << csv_escape(s.name) << ',' << format_fixed(s.complete_pct, 1) << ',' << format_number(s.mean) << ','
        << format_number(s.sd) << ',' << format_number(s.min) << ',' << format_number(s.q2) << ','
        << format_number(s.median) << ',' << format_number(s.q3) << ',' << format_number(s.max) << '\n';
  }
}

DataMatrix knn_impute(const DataMatrix& data, const ImputeConfig& cfg, std::vector<std::string>* warnings) {
  if (cfg.k < 1) throw Error(ErrorCode::bad_config, "imputation k must be >= 1");
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  MissingMask miss = data.missing.size() ? data.missing : MissingMask::Constant(n, p, false);

  // Observed-only standardization per feature.
  Vector center(p), scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!miss(i, j)) {
        sum += data.values(i, j);
        ++count;
      }
    }
    if (count == 0) {
      throw Error(ErrorCode::all_missing_feature, "feature '" + data.feature_names[static_cast<std::size_t>(j)] +
                                                      "' has no observed values");
    }
    const double m = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!miss(i, j)) ss += (data.values(i, j) - m) * (data.values(i, j) - m);
    }
    const double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
    center[j] = m;
    scale[j] = sd > 0.0 ? sd : 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (miss.row(i).all()) throw Error(ErrorCode::all_missing_row, "row " + std::to_string(i) + " is entirely missing");
  }
  Matrix z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = miss(i, j) ? 0.0 : (data.values(i, j) - center[j]) / scale[j];
  }

  DataMatrix out(data.values, data.feature_names, MissingMask::Constant(n, p, false));
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<int> order;
  bool warned_small_pool = false;

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!miss.row(i).any()) continue;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == i) {
        dist[static_cast<std::size_t>(r)] = inf;
        continue;
      }
      double acc = 0.0;
      int shared = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (miss(i, j) || miss(r, j)) continue;
        const double d = z(i, j) - z(r, j);
        acc += cfg.distance == DistanceKind::euclidean ? d * d : std::abs(d);
        ++shared;
      }
      if (shared == 0) {
        dist[static_cast<std::size_t>(r)] = inf;
        continue;
      }
      acc *= static_cast<double>(p) / static_cast<double>(shared);
      dist[static_cast<std::size_t>(r)] = cfg.distance == DistanceKind::euclidean ? std::sqrt(acc) : acc;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!miss(i, j)) continue;
      order.clear();
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r != i && !miss(r, j)) order.push_back(static_cast<int>(r));
      }
      const auto k = static_cast<std::ptrdiff_t>(std::min<std::size_t>(static_cast<std::size_t>(cfg.k), order.size()));
      if (k < cfg.k && warnings && !warned_small_pool) {
        warnings->push_back("donor pool for feature '" + data.feature_names[static_cast<std::size_t>(j)] +
                            "' is smaller than k; using " + std::to_string(k));
        warned_small_pool = true;
      }
      std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        const double da = dist[static_cast<std::size_t>(a)];
        const double db = dist[static_cast<std::size_t>(b)];
        return da < db || (da == db && a < b);
      });
      double sum = 0.0;
      for (std::ptrdiff_t m = 0; m < k; ++m) sum += data.values(order[static_cast<std::size_t>(m)], j);
      out.values(i, j) = sum / static_cast<double>(k);
    }
  }
  return out;
}

}  // namespace drkit
