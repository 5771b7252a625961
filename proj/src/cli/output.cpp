#include "symdyn/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <unistd.h>

#include "symdyn/error.hpp"

namespace symdyn::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Tsv::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw Error(ErrorKind::Precondition, "row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string Tsv::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += '\t';
      out += cells[i];
    }
    out += '\n';
  };
  for (const auto& c : comments_) out += "# " + c + "\n";
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<std::string> OutputSet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : files_) out.push_back(name);
  return out;
}

void OutputSet::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files_) write_atomic(dir / name, content);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Precondition, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Precondition, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace symdyn::cli
