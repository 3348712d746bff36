#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "smoothchol/covmodel.hpp"

namespace smoothchol {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

struct CsvOptions {
  bool header = false;     // skip the first line
  bool transpose = false;  // file rows are variables
};

// Numeric CSV, rows = observations. Throws IoError (unreadable, ragged or
// non-numeric content).
Matrix read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header = {});

// Nonzero entries of a lower-triangular matrix as 1-based (row, col, value).
void write_triplets(const std::filesystem::path& path, const Matrix& lower);
Matrix read_triplets(const std::filesystem::path& path, int p);

// key=value text file, one entry per line, keys kept sorted.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value) { entries_[key] = format_double(value); }
  void set(const std::string& key, long long value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, const char* value) { entries_[key] = value; }

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace smoothchol
