#include <cctype>
#include <cmath>
#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "cli.hpp"

namespace signtest::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [end, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc{} && end == token.data() + token.size();
}

bool parse_int(std::string_view token, int& value) {
  const auto [end, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc{} && end == token.data() + token.size();
}

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

Observations parse_observations(std::istream& in, const std::string& source) {
  Observations obs;
  std::string raw;
  int line = 0;
  bool seen_content = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const bool first_content = !seen_content;
    seen_content = true;

    if (text.find(',') != std::string_view::npos) {
      throw ParseError(where(source, line) +
                       "expected one value per field; found a multi-column "
                       "CSV row '" + std::string(text) + "'");
    }
    std::istringstream fields{std::string(text)};
    std::string token;
    std::size_t before = obs.values.size();
    while (fields >> token) {
      std::string_view field = token;
      double value = 0.0;
      if (!parse_double(field, value)) {
        // A non-numeric first line is a CSV header.
        if (first_content && obs.values.size() == before &&
            text.find_first_of(" \t") == std::string_view::npos) {
          break;
        }
        throw ParseError(where(source, line) + "cannot parse '" + token +
                         "' as a number");
      }
      if (!std::isfinite(value)) {
        throw ParseError(where(source, line) + "non-finite value '" + token +
                         "'");
      }
      obs.values.push_back(value);
      obs.lines.push_back(line);
    }
  }
  if (in.bad()) throw IoError(source + ": read failed");
  if (obs.values.empty()) {
    throw ParseError(source + ": no observations found");
  }
  return obs;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ec == std::errc{} ? end : buffer);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    const std::string_view field = trim(item);
    const auto dots = field.find("..");
    int lo = 0;
    int hi = 0;
    if (dots == std::string_view::npos) {
      if (!parse_int(field, lo)) {
        throw ParseError("cannot parse '" + std::string(field) +
                         "' as an integer");
      }
      out.push_back(lo);
      continue;
    }
    if (!parse_int(trim(field.substr(0, dots)), lo) ||
        !parse_int(trim(field.substr(dots + 2)), hi) || hi < lo) {
      throw ParseError("cannot parse '" + std::string(field) +
                       "' as an integer range lo..hi");
    }
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty integer list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    double v = 0.0;
    if (!parse_double(trim(item), v) || !std::isfinite(v)) {
      throw ParseError("cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

}  // namespace signtest::cli
