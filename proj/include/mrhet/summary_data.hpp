#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mrhet/errors.hpp"

namespace mrhet {

// One genetic variant: associations with d exposures and one outcome.
struct SnpRecord {
  std::string snp_id;
  std::vector<double> beta_exposure;  // length d
  std::vector<double> se_exposure;    // length d, strictly positive
  double beta_outcome = 0.0;
  double se_outcome = 0.0;            // strictly positive
};

// Validated, immutable collection of SnpRecords. Safe to share across
// threads. Optional per-SNP exposure covariance matrices carry the
// cross-exposure covariances; when absent they are treated as zero.
class SummaryDataset {
public:
  SummaryDataset(std::vector<SnpRecord> records, int n_exposures,
                 std::optional<std::vector<Eigen::MatrixXd>> exposure_cov = std::nullopt)
      : records_(std::move(records)), n_exposures_(n_exposures), exposure_cov_(std::move(exposure_cov)) {
    validate();
  }

  int n() const { return static_cast<int>(records_.size()); }
  int n_exposures() const { return n_exposures_; }
  const std::vector<SnpRecord>& records() const { return records_; }
  const SnpRecord& record(int i) const { return records_.at(static_cast<std::size_t>(i)); }
  bool has_exposure_cov() const { return exposure_cov_.has_value(); }

  // sigma_x covariance between exposures j and k for SNP i; zero when no
  // covariance matrices were supplied.
  double exposure_cov(int i, int j, int k) const {
    if (!exposure_cov_) return 0.0;
    return (*exposure_cov_)[static_cast<std::size_t>(i)](j, k);
  }

  const Eigen::MatrixXd& exposure_cov_matrix(int i) const {
    return (*exposure_cov_)[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd exposure_matrix() const {
    Eigen::MatrixXd X(n(), n_exposures_);
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n_exposures_; ++j) X(i, j) = records_[static_cast<std::size_t>(i)].beta_exposure[static_cast<std::size_t>(j)];
    return X;
  }

  Eigen::VectorXd outcome_betas() const {
    Eigen::VectorXd y(n());
    for (int i = 0; i < n(); ++i) y(i) = records_[static_cast<std::size_t>(i)].beta_outcome;
    return y;
  }

  Eigen::VectorXd outcome_ses() const {
    Eigen::VectorXd s(n());
    for (int i = 0; i < n(); ++i) s(i) = records_[static_cast<std::size_t>(i)].se_outcome;
    return s;
  }

  std::vector<std::string> snp_ids() const {
    std::vector<std::string> ids;
    ids.reserve(records_.size());
    for (const auto& r : records_) ids.push_back(r.snp_id);
    return ids;
  }

  bool contains(const std::string& id) const {
    for (const auto& r : records_)
      if (r.snp_id == id) return true;
    return false;
  }

private:
  void validate() const {
    if (n_exposures_ < 1) throw InvalidArgument("n_exposures must be >= 1");
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
      if (r.snp_id.empty()) throw InvalidArgument("empty snp id");
      if (!seen.insert(r.snp_id).second) throw DuplicateSnp(r.snp_id);
      const auto d = static_cast<std::size_t>(n_exposures_);
      if (r.beta_exposure.size() != d || r.se_exposure.size() != d)
        throw InvalidArgument("snp " + r.snp_id + ": expected " + std::to_string(n_exposures_) + " exposure entries");
      for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(r.beta_exposure[j]))
          throw InvalidArgument("snp " + r.snp_id + ": non-finite exposure beta");
        if (!(r.se_exposure[j] > 0.0) || !std::isfinite(r.se_exposure[j]))
          throw NonPositiveSE("snp " + r.snp_id + ", column se_x_" + std::to_string(j + 1));
      }
      if (!std::isfinite(r.beta_outcome)) throw InvalidArgument("snp " + r.snp_id + ": non-finite outcome beta");
      if (!(r.se_outcome > 0.0) || !std::isfinite(r.se_outcome))
        throw NonPositiveSE("snp " + r.snp_id + ", column se_y");
    }
    if (n() <= n_exposures_)
      throw TooFewSnps("need more SNPs than exposures (n=" + std::to_string(n()) + ", d=" + std::to_string(n_exposures_) + ")");
    if (exposure_cov_) {
      if (exposure_cov_->size() != records_.size())
        throw InvalidArgument("expected one covariance matrix per SNP");
      constexpr double rel_tol = 1e-8;
      for (std::size_t i = 0; i < records_.size(); ++i) {
        const Eigen::MatrixXd& m = (*exposure_cov_)[i];
        const auto& r = records_[i];
        if (m.rows() != n_exposures_ || m.cols() != n_exposures_)
          throw InvalidArgument("snp " + r.snp_id + ": covariance matrix is not d x d");
        for (int j = 0; j < n_exposures_; ++j) {
          const double want = r.se_exposure[static_cast<std::size_t>(j)] * r.se_exposure[static_cast<std::size_t>(j)];
          if (std::abs(m(j, j) - want) > rel_tol * std::max(std::abs(want), 1e-300))
            throw InvalidArgument("snp " + r.snp_id + ": covariance diagonal does not match se_exposure^2");
          for (int k = j + 1; k < n_exposures_; ++k) {
            const double scale = std::max({std::abs(m(j, k)), std::abs(m(k, j)), 1e-300});
            if (std::abs(m(j, k) - m(k, j)) > rel_tol * scale)
              throw InvalidArgument("snp " + r.snp_id + ": covariance matrix is not symmetric");
          }
        }
      }
    }
  }

  std::vector<SnpRecord> records_;
  int n_exposures_;
  std::optional<std::vector<Eigen::MatrixXd>> exposure_cov_;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

// Locale-independent 64-bit float parse; the whole token must be consumed.
inline double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(where + ": cannot parse '" + token + "' as a number");
  if (!std::isfinite(value)) throw ParseError(where + ": non-finite value '" + token + "'");
  return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("FileNotFound", "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();  // CRLF input
    lines.push_back(line);
  }
  // strip a UTF-8 BOM if present
  if (!lines.empty() && lines[0].size() >= 3 && lines[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
    lines[0].erase(0, 3);
  return lines;
}

inline std::vector<std::string> expected_header(int d) {
  std::vector<std::string> h;
  h.emplace_back("snp");
  for (int j = 1; j <= d; ++j) h.push_back("beta_x_" + std::to_string(j));
  for (int j = 1; j <= d; ++j) h.push_back("se_x_" + std::to_string(j));
  h.emplace_back("beta_y");
  h.emplace_back("se_y");
  return h;
}

inline std::string shortest_repr(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Loads the tab-separated summary-statistics format:
//   snp  beta_x_1..beta_x_d  se_x_1..se_x_d  beta_y  se_y
// Row order is preserved; malformed or invalid rows are rejected outright.
inline SummaryDataset load_dataset(const std::filesystem::path& path, int n_exposures) {
  if (n_exposures < 1) throw InvalidArgument("n_exposures must be >= 1");
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw MissingColumn("empty file " + path.string());
  const auto header = detail::split_tabs(lines[0]);
  const auto expected = detail::expected_header(n_exposures);
  if (header.size() != expected.size()) {
    throw MissingColumn("expected " + std::to_string(expected.size()) + " columns for d=" +
                        std::to_string(n_exposures) + ", found " + std::to_string(header.size()));
  }
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (header[c] != expected[c])
      throw MissingColumn("expected column '" + expected[c] + "' at position " + std::to_string(c + 1) +
                          ", found '" + header[c] + "'");
  }

  std::vector<SnpRecord> records;
  std::unordered_set<std::string> seen;
  const std::size_t d = static_cast<std::size_t>(n_exposures);
  int row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;  // tolerate blank lines (trailing newline etc)
    ++row;
    const std::string where = "row " + std::to_string(row);
    const auto tokens = detail::split_tabs(lines[li]);
    if (tokens.size() != expected.size())
      throw ParseError(where + ": expected " + std::to_string(expected.size()) + " fields, found " +
                       std::to_string(tokens.size()));
    SnpRecord rec;
    rec.snp_id = tokens[0];
    if (rec.snp_id.empty()) throw ParseError(where + ": empty snp id");
    if (!seen.insert(rec.snp_id).second) throw DuplicateSnp(rec.snp_id + " (" + where + ")");
    for (std::size_t j = 0; j < d; ++j)
      rec.beta_exposure.push_back(detail::parse_double(tokens[1 + j], where + ", column " + expected[1 + j]));
    for (std::size_t j = 0; j < d; ++j) {
      const std::string col = expected[1 + d + j];
      const double se = detail::parse_double(tokens[1 + d + j], where + ", column " + col);
      if (!(se > 0.0)) throw NonPositiveSE(where + ", column " + col);
      rec.se_exposure.push_back(se);
    }
    rec.beta_outcome = detail::parse_double(tokens[1 + 2 * d], where + ", column beta_y");
    rec.se_outcome = detail::parse_double(tokens[2 + 2 * d], where + ", column se_y");
    if (!(rec.se_outcome > 0.0)) throw NonPositiveSE(where + ", column se_y");
    records.push_back(std::move(rec));
  }
  return SummaryDataset(std::move(records), n_exposures);
}

// Writes the same TSV format with shortest round-trip float formatting, so
// load(write(dataset)) reproduces every value bit-identically.
inline void write_dataset(const SummaryDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("FileNotFound", "cannot write " + path.string());
  const auto header = detail::expected_header(data.n_exposures());
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "\t" : "") << header[c];
  out << '\n';
  for (const auto& r : data.records()) {
    out << r.snp_id;
    for (double v : r.beta_exposure) out << '\t' << detail::shortest_repr(v);
    for (double v : r.se_exposure) out << '\t' << detail::shortest_repr(v);
    out << '\t' << detail::shortest_repr(r.beta_outcome) << '\t' << detail::shortest_repr(r.se_outcome) << '\n';
  }
}

// Companion covariance file: one row per SNP, row-major d*d entries.
//   snp  c_1_1  c_1_2 ... c_d_d
// Every SNP in the dataset must appear exactly once (any order).
inline SummaryDataset with_exposure_cov(const SummaryDataset& data, const std::filesystem::path& path) {
  const int d = data.n_exposures();
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw MissingColumn("empty covariance file " + path.string());
  const auto header = detail::split_tabs(lines[0]);
  std::vector<std::string> expected;
  expected.emplace_back("snp");
  for (int j = 1; j <= d; ++j)
    for (int k = 1; k <= d; ++k) expected.push_back("c_" + std::to_string(j) + "_" + std::to_string(k));
  if (header.size() != expected.size())
    throw MissingColumn("covariance file: expected " + std::to_string(expected.size()) + " columns, found " +
                        std::to_string(header.size()));
  for (std::size_t c = 0; c < expected.size(); ++c)
    if (header[c] != expected[c])
      throw MissingColumn("covariance file: expected column '" + expected[c] + "' at position " +
                          std::to_string(c + 1) + ", found '" + header[c] + "'");

  std::unordered_map<std::string, Eigen::MatrixXd> by_id;
  int row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    ++row;
    const std::string where = "covariance row " + std::to_string(row);
    const auto tokens = detail::split_tabs(lines[li]);
    if (tokens.size() != expected.size())
      throw ParseError(where + ": expected " + std::to_string(expected.size()) + " fields");
    const std::string& id = tokens[0];
    if (!data.contains(id)) throw UnknownSnp(id + " in covariance file");
    if (by_id.count(id)) throw DuplicateSnp(id + " in covariance file");
    Eigen::MatrixXd m(d, d);
    std::size_t t = 1;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) m(j, k) = detail::parse_double(tokens[t++], where);
    by_id.emplace(id, std::move(m));
  }
  std::vector<Eigen::MatrixXd> cov;
  cov.reserve(static_cast<std::size_t>(data.n()));
  for (const auto& r : data.records()) {
    const auto it = by_id.find(r.snp_id);
    if (it == by_id.end()) throw InvalidArgument("covariance file is missing snp " + r.snp_id);
    cov.push_back(it->second);
  }
  return SummaryDataset(data.records(), d, std::move(cov));
}

// Removes the given SNPs, preserving the original order of the rest.
inline SummaryDataset drop_snps(const SummaryDataset& data, const std::set<std::string>& ids) {
  for (const auto& id : ids)
    if (!data.contains(id)) throw UnknownSnp(id);
  std::vector<SnpRecord> kept;
  std::optional<std::vector<Eigen::MatrixXd>> cov;
  if (data.has_exposure_cov()) cov.emplace();
  for (int i = 0; i < data.n(); ++i) {
    if (ids.count(data.record(i).snp_id)) continue;
    kept.push_back(data.record(i));
    if (cov) cov->push_back(data.exposure_cov_matrix(i));
  }
  if (static_cast<int>(kept.size()) <= data.n_exposures())
    throw TooFewSnps("removal leaves n=" + std::to_string(kept.size()) + " <= d=" + std::to_string(data.n_exposures()));
  return SummaryDataset(std::move(kept), data.n_exposures(), std::move(cov));
}

}  // namespace mrhet
