#include "qamht/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qamht/errors.hpp"

namespace qamht::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot write '" + tmp.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw InputError("short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw NumericalError("number formatting failed");
  }
  return {buf.data(), end};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::separator() {
  if (in_row_ == columns_) {
    throw InputError("CSV row has more fields than header columns");
  }
  if (in_row_++) out_ += ',';
}

CsvWriter& CsvWriter::add(double value) {
  separator();
  out_ += format_number(value);
  return *this;
}

CsvWriter& CsvWriter::add(long long value) {
  separator();
  out_ += std::to_string(value);
  return *this;
}

CsvWriter& CsvWriter::add(std::string_view token) {
  separator();
  out_ += token;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw InputError("CSV row has fewer fields than header columns");
  }
  out_ += '\n';
  in_row_ = 0;
}

}  // namespace qamht::io
