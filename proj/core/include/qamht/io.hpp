#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qamht::io {

/// Reads a whole file. Throws InputError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal representation, independent of the locale.
std::string format_number(double value);

/// Minimal CSV builder: header row first, fields are numbers or plain tokens.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& add(double value);
  CsvWriter& add(long long value);
  CsvWriter& add(std::string_view token);
  void end_row();

  [[nodiscard]] const std::string& str() const { return out_; }

 private:
  void separator();

  std::string out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace qamht::io
