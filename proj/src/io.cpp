#include "cpvsoil/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "cpvsoil/error.hpp"

namespace cpvsoil {

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FileNotFound,
                fmt::format("cannot open {}", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorKind::IoError,
                  fmt::format("cannot create {}: {}", path.parent_path().string(),
                              ec.message()));
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::IoError,
                  fmt::format("cannot write {}", tmp.string()));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorKind::IoError, fmt::format("short write to {}", tmp.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorKind::IoError,
                fmt::format("cannot rename {} to {}: {}", tmp.string(),
                            path.string(), ec.message()));
  }
}

std::string format_number(double value) { return fmt::format("{}", value); }

}  // namespace cpvsoil
