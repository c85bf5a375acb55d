#pragma once

// Flat-file formats and the JSON run configuration.
//
//   migrations   period,from,to,count      (1-based periods, rating labels)
//   factors      period,factor_index,value (1-based periods and indices)
//   study        scenario,parameter,estimate plus a summary table

#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transcal/calibrate.hpp"
#include "transcal/domain.hpp"
#include "transcal/gpr.hpp"
#include "transcal/models.hpp"

namespace transcal {

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline long long parse_integer(const std::string& s, std::size_t line, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": " + what + " must be an integer, got '" + s + "'");
  }
}

inline double parse_real(const std::string& s, std::size_t line, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": " + what + " must be a number, got '" + s + "'");
  }
}

inline bool skip_line(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\r' && c != '\t') return false;
  }
  return true;
}

inline void expect_header(std::istream& is, const std::string& expected, std::size_t& line_no) {
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::string clean = line;
    while (!clean.empty() && clean.back() == '\r') clean.pop_back();
    if (clean != expected) throw ConfigError("line " + std::to_string(line_no) + ": expected header '" + expected + "'");
    return;
  }
  throw ConfigError("file is empty; expected header '" + expected + "'");
}

}  // namespace detail

struct MigrationRecord {
  std::size_t period;  // 1-based
  std::string from;
  std::string to;
  std::int64_t count;
};

inline std::vector<MigrationRecord> read_migration_records(std::istream& is) {
  std::size_t line_no = 0;
  detail::expect_header(is, "period,from,to,count", line_no);
  std::vector<MigrationRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    auto f = detail::split_csv(line);
    if (f.size() != 4) throw ConfigError("line " + std::to_string(line_no) + ": expected 4 fields");
    const long long period = detail::parse_integer(f[0], line_no, "period");
    if (period < 1) throw ConfigError("line " + std::to_string(line_no) + ": periods are 1-based");
    out.push_back({static_cast<std::size_t>(period), f[1], f[2], detail::parse_integer(f[3], line_no, "count")});
  }
  return out;
}

/// Scheme implied by a migration file: performing labels in order of first
/// appearance as origins, then the single label never used as an origin.
inline RatingScheme infer_scheme(const std::vector<MigrationRecord>& records) {
  std::vector<std::string> from;
  for (const auto& r : records)
    if (std::find(from.begin(), from.end(), r.from) == from.end()) from.push_back(r.from);
  std::vector<std::string> absorbing;
  for (const auto& r : records)
    if (std::find(from.begin(), from.end(), r.to) == from.end() &&
        std::find(absorbing.begin(), absorbing.end(), r.to) == absorbing.end())
      absorbing.push_back(r.to);
  if (absorbing.size() != 1)
    throw ConfigError("cannot infer the default rating: expected exactly one label that never appears as an origin");
  from.push_back(absorbing.front());
  return RatingScheme(std::move(from));
}

inline MigrationSeries series_from_records(const std::vector<MigrationRecord>& records, const RatingScheme& scheme) {
  const int r = scheme.rating_count();
  std::size_t n = 0;
  for (const auto& rec : records) n = std::max(n, rec.period);
  std::vector<CountMatrix> counts(n, CountMatrix::Zero(r - 1, r));
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> seen(
      n, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(r - 1, r, false));
  for (const auto& rec : records) {
    const int i = scheme.index_of(rec.from);
    const int j = scheme.index_of(rec.to);
    if (i < 0 || j < 0) throw ConfigError("unknown rating label in record for period " + std::to_string(rec.period));
    if (i == scheme.default_index()) throw ConfigError("transitions out of the default rating are not modelled");
    if (seen[rec.period - 1](i, j))
      throw ConfigError("duplicate record for (" + rec.from + "," + rec.to + ") in period " + std::to_string(rec.period));
    seen[rec.period - 1](i, j) = true;
    counts[rec.period - 1](i, j) = rec.count;
  }
  return MigrationSeries::from_counts(r, std::move(counts));
}

inline MigrationSeries read_migrations(const std::string& path, const RatingScheme* scheme = nullptr) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open migration file '" + path + "'");
  auto records = read_migration_records(is);
  if (scheme) return series_from_records(records, *scheme);
  return series_from_records(records, infer_scheme(records));
}

inline void write_migrations(std::ostream& os, const MigrationSeries& series, const RatingScheme& scheme) {
  os << "period,from,to,count\n";
  const auto& labels = scheme.labels();
  for (std::size_t k = 0; k < series.period_count(); ++k)
    for (int i = 0; i < series.performing_count(); ++i)
      for (int j = 0; j < series.ratings; ++j)
        os << (k + 1) << ',' << labels[static_cast<std::size_t>(i)] << ',' << labels[static_cast<std::size_t>(j)] << ','
           << series.counts[k](i, j) << '\n';
}

/// Writes vectors per period in the `period,factor_index,value` layout.
inline void write_factor_file(std::ostream& os, const std::vector<Vector>& values) {
  os << "period,factor_index,value\n";
  os << std::setprecision(15);
  for (std::size_t k = 0; k < values.size(); ++k)
    for (Eigen::Index m = 0; m < values[k].size(); ++m) os << (k + 1) << ',' << (m + 1) << ',' << values[k](m) << '\n';
}

inline ObservedFactors read_factor_file(std::istream& is) {
  std::size_t line_no = 0;
  detail::expect_header(is, "period,factor_index,value", line_no);
  std::map<std::pair<long long, long long>, double> entries;
  long long n = 0, l = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    auto f = detail::split_csv(line);
    if (f.size() != 3) throw ConfigError("line " + std::to_string(line_no) + ": expected 3 fields");
    const long long k = detail::parse_integer(f[0], line_no, "period");
    const long long m = detail::parse_integer(f[1], line_no, "factor_index");
    if (k < 1 || m < 1) throw ConfigError("line " + std::to_string(line_no) + ": indices are 1-based");
    if (!entries.emplace(std::make_pair(k, m), detail::parse_real(f[2], line_no, "value")).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate entry");
    n = std::max(n, k);
    l = std::max(l, m);
  }
  ObservedFactors u = ObservedFactors::zeros(static_cast<std::size_t>(n), static_cast<Eigen::Index>(l));
  for (const auto& [key, v] : entries) u.u[static_cast<std::size_t>(key.first - 1)](key.second - 1) = v;
  return u;
}

inline void write_profile(std::ostream& os, const ProfileTable& table, std::uint64_t seed,
                          const std::optional<Vector>& fitted = std::nullopt) {
  os << "# axis=" << table.axis << " method=" << to_string(table.method);
  if (table.method != ProfileMethod::Laplace) os << " particles=" << table.particles << " seed=" << seed;
  os << '\n';
  os << (fitted ? "value,loglik,fitted\n" : "value,loglik\n");
  os << std::setprecision(12);
  for (Eigen::Index i = 0; i < table.values.size(); ++i) {
    os << table.values(i) << ',';
    if (std::isnan(table.loglik(i))) os << "nan"; else os << table.loglik(i);
    if (fitted) os << ',' << (*fitted)(i);
    os << '\n';
  }
}

inline void write_study_estimates(std::ostream& os, const StudyResult& res) {
  os << "scenario,parameter,estimate\n";
  os << std::setprecision(10);
  for (Eigen::Index s = 0; s < res.estimates.rows(); ++s)
    for (Eigen::Index p = 0; p < res.estimates.cols(); ++p) {
      os << (s + 1) << ',' << res.names[static_cast<std::size_t>(p)] << ',';
      if (std::isnan(res.estimates(s, p))) os << "nan"; else os << res.estimates(s, p);
      os << '\n';
    }
}

/// Summary in the layout of a results table: one column per parameter.
inline void write_study_summary(std::ostream& os, const StudyResult& res) {
  os << std::left << std::setw(10) << "";
  for (const auto& n : res.names) os << std::right << std::setw(10) << n;
  os << '\n' << std::left << std::setw(10) << "average" << std::right << std::fixed << std::setprecision(4);
  for (Eigen::Index p = 0; p < res.mean.size(); ++p) os << std::setw(10) << res.mean(p);
  os << '\n' << std::left << std::setw(10) << "std" << std::right;
  for (Eigen::Index p = 0; p < res.std.size(); ++p) os << std::setw(10) << res.std(p);
  os << '\n';
  os.unsetf(std::ios::fixed);
  os << "scenarios: " << res.estimates.rows() << ", calibrated: " << res.successes
     << ", failed: " << (static_cast<std::size_t>(res.estimates.rows()) - res.successes) << '\n';
  for (const auto& w : res.warnings) os << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// JSON configuration.

struct RunConfig {
  nlohmann::json raw;
  ModelFamily family;
  RatingScheme scheme = RatingScheme::with_count(2);
  std::optional<ModelParameters> truth;
  std::optional<LongRunAverages> truth_averages;
  std::optional<Eigen::VectorXi> populations;
  std::string method = "laplace";
  LaplaceOptions laplace;
  std::optional<Vector> start;
  std::size_t particles = 1000;
  bool systematic = false;
  PFGridSpec grid;
  std::size_t scenarios = 1000;
  std::size_t periods = 150;
  bool renormalize = false;
  std::uint64_t seed = 1;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key '" + where + key + "'");
  return j.at(key);
}

template <class T>
T value_or(const nlohmann::json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + where + key + "' has the wrong type");
  }
}

inline Vector json_vector(const nlohmann::json& j, const std::string& name) {
  try {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + name + "' must be a number or a list of numbers");
  }
}

inline Matrix json_matrix(const nlohmann::json& j, const std::string& name) {
  try {
    auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw ConfigError("key '" + name + "' has ragged rows");
      for (std::size_t c = 0; c < rows[i].size(); ++c)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
    return m;
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + name + "' must be a list of numeric rows");
  }
}

}  // namespace detail

/// Truth parameters from target averages (moment-matched levels).
inline ModelParameters truth_from_targets(const ModelFamily& family, const LongRunAverages& avg, const Vector& a,
                                          const Vector& k, double rho) {
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit:
    case FamilyKind::PerformingProbit:
      return parameters_from_free(family, avg, Vector{{a(0), k(0)}});
    case FamilyKind::TwoFactorProbit: {
      if (a.size() != 2 || k.size() != 2) throw ConfigError("two-factor truth needs a = [a_d, a_p] and k = [k_d, k_p]");
      return parameters_from_free(family, avg, Vector{{a(0), a(1), k(0), k(1), rho}});
    }
    case FamilyKind::MultiFactorLogistic: break;
  }
  throw ConfigError("configuration files cover the probit families");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.raw = j;
  const auto& model = detail::require(j, "model", "");
  const std::string family = detail::value_or<std::string>(model, "family", "default-only-probit", "model.");
  if (model.contains("labels")) {
    cfg.scheme = RatingScheme(detail::value_or<std::vector<std::string>>(model, "labels", {}, "model."));
  } else {
    cfg.scheme = RatingScheme::with_count(detail::value_or<int>(model, "ratings", 4, "model."));
  }
  const int r = cfg.scheme.rating_count();
  switch (family_kind_from_string(family)) {
    case FamilyKind::DefaultOnlyProbit: cfg.family = ModelFamily::default_only(r); break;
    case FamilyKind::TwoFactorProbit: cfg.family = ModelFamily::two_factor(r); break;
    case FamilyKind::PerformingProbit: cfg.family = ModelFamily::performing(r); break;
    case FamilyKind::MultiFactorLogistic:
      throw ConfigError("model.family: the logistic family is available through the library only");
  }

  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    Vector pd = detail::json_vector(detail::require(t, "pd", "truth."), "truth.pd");
    if (pd.size() != r - 1) throw ConfigError("truth.pd needs one entry per performing rating");
    Matrix nd;
    if (cfg.family.kind != FamilyKind::DefaultOnlyProbit)
      nd = detail::json_matrix(detail::require(t, "nd_matrix", "truth."), "truth.nd_matrix");
    cfg.truth_averages = averages_from_targets(pd, nd);
    Vector a = detail::json_vector(detail::require(t, "a", "truth."), "truth.a");
    Vector k = detail::json_vector(detail::require(t, "k", "truth."), "truth.k");
    cfg.truth = truth_from_targets(cfg.family, *cfg.truth_averages, a, k, detail::value_or<double>(t, "rho", 0.0, "truth."));
  }
  if (j.contains("populations")) {
    auto pops = detail::value_or<std::vector<int>>(j, "populations", {}, "");
    if (static_cast<int>(pops.size()) != r - 1) throw ConfigError("populations needs one entry per performing rating");
    cfg.populations = Eigen::Map<Eigen::VectorXi>(pops.data(), static_cast<Eigen::Index>(pops.size()));
  }
  if (j.contains("calibration")) {
    const auto& c = j.at("calibration");
    cfg.method = detail::value_or<std::string>(c, "method", cfg.method, "calibration.");
    cfg.laplace.tol = detail::value_or<double>(c, "tol", cfg.laplace.tol, "calibration.");
    cfg.laplace.max_iter = detail::value_or<int>(c, "max_iter", cfg.laplace.max_iter, "calibration.");
    if (c.contains("start")) cfg.start = detail::json_vector(c.at("start"), "calibration.start");
  }
  if (j.contains("pf")) {
    const auto& p = j.at("pf");
    cfg.particles = detail::value_or<std::size_t>(p, "particles", cfg.particles, "pf.");
    cfg.systematic = detail::value_or<bool>(p, "systematic", cfg.systematic, "pf.");
  }
  cfg.grid.particles = cfg.particles;
  cfg.grid.pf.systematic_resampling = cfg.systematic;
  if (j.contains("gpr")) {
    const auto& g = j.at("gpr");
    const int pts = detail::value_or<int>(g, "points_per_axis", 20, "gpr.");
    const double lo = detail::value_or<double>(g, "lower", 0.1, "gpr.");
    const double hi = detail::value_or<double>(g, "upper", 0.9, "gpr.");
    cfg.grid.grid = CartesianGrid::uniform(Vector::Constant(2, lo), Vector::Constant(2, hi), pts);
    cfg.grid.lattice = detail::value_or<int>(g, "lattice", cfg.grid.lattice, "gpr.");
    cfg.grid.optimize_kernel = detail::value_or<bool>(g, "optimize", cfg.grid.optimize_kernel, "gpr.");
  }
  if (j.contains("study")) {
    const auto& s = j.at("study");
    cfg.scenarios = detail::value_or<std::size_t>(s, "scenarios", cfg.scenarios, "study.");
    cfg.periods = detail::value_or<std::size_t>(s, "periods", cfg.periods, "study.");
    cfg.renormalize = detail::value_or<bool>(s, "renormalize", cfg.renormalize, "study.");
    cfg.seed = detail::value_or<std::uint64_t>(s, "seed", cfg.seed, "study.");
  }
  return cfg;
}

/// Reads a JSON configuration; parse errors report the line number.
inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(path + ": line " + std::to_string(line) + ": invalid JSON");
  }
  return parse_config(j);
}

}  // namespace transcal
