#include "smoothchol/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smoothchol/errors.hpp"

namespace smoothchol {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": not a number: '" << t << "'";
    throw IoError(msg.str());
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Matrix read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && options.header) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_number(field, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << rows.front().size() << " fields, got " << row.size();
      throw IoError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (options.transpose) return m.transpose();
  return m;
}

void write_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (!header.empty()) out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_triplets(const std::filesystem::path& path, const Matrix& lower) {
  auto out = open_out(path);
  out << "row,col,value\n";
  for (Eigen::Index c = 0; c < lower.cols(); ++c) {
    for (Eigen::Index r = c; r < lower.rows(); ++r) {
      if (lower(r, c) != 0.0) out << r + 1 << ',' << c + 1 << ',' << format_double(lower(r, c)) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_triplets(const std::filesystem::path& path, int p) {
  const Matrix t = read_csv(path, CsvOptions{.header = true});
  if (t.cols() != 3) throw IoError(path.string() + ": triplet files have three columns");
  Matrix m = Matrix::Zero(p, p);
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double r = t(k, 0), c = t(k, 1);
    if (r != std::floor(r) || c != std::floor(c) || r < 1 || c < 1 || r > p || c > p) {
      throw IoError(path.string() + ": triplet index out of range");
    }
    m(static_cast<Eigen::Index>(r) - 1, static_cast<Eigen::Index>(c) - 1) = t(k, 2);
  }
  return m;
}

const std::string& Manifest::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw IoError("manifest has no key '" + key + "'");
  return it->second;
}

void Manifest::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(path.string() + ": malformed line '" + line + "'");
    m.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return m;
}

}  // namespace smoothchol
