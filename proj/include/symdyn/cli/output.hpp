#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace symdyn::cli {

/// Shortest text that round-trips the double; "inf"/"-inf"/"nan" for non-finite.
std::string format_number(double v);

/// Tab-separated table with a header row and '\n' line endings. Comment lines
/// (prefixed with '#') precede the header.
class Tsv {
 public:
  explicit Tsv(std::vector<std::string> header) : header_(std::move(header)) {}
  void comment(const std::string& line) { comments_.push_back(line); }
  void row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

/// Files of one run, written together at the end.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  std::vector<std::string> names() const;
  /// Each file goes to a temporary sibling first and is renamed into place.
  void write(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace symdyn::cli
