#include "rmg/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace rmg {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf.data(), end);
}

std::string format_complex(cplx z) {
  std::string out = format_double(z.real());
  const double im = z.imag();
  if (std::signbit(im) && !std::isnan(im)) {
    out += format_double(im);
  } else {
    out += "+";
    out += format_double(im);
  }
  out += "i";
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.empty()) throw ConfigError("empty " + std::string(what));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  return v;
}

namespace {

// Coefficient text preceding 'i': "" or "+" -> 1, "-" -> -1.
double imag_coefficient(const std::string& t, std::string_view what) {
  if (t.empty() || t == "+") return 1.0;
  if (t == "-") return -1.0;
  return parse_double(t, what);
}

}  // namespace

cplx parse_complex(std::string_view text, std::string_view what) {
  std::string s;
  for (char c : trim(text)) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) throw ConfigError("empty " + std::string(what));
  if (s.back() != 'i' && s.back() != 'j') return {parse_double(s, what), 0.0};
  s.pop_back();
  // Split at the last sign that is not the leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, imag_coefficient(s, what)};
  return {parse_double(s.substr(0, split), what), imag_coefficient(s.substr(split), what)};
}

}  // namespace rmg
