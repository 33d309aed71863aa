#include "monoslicer/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace monoslicer {

namespace {

using boost::multiprecision::cpp_int;

cpp_int floor_div(const cpp_int& a, const cpp_int& b) {
  cpp_int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

cpp_int pow10(int n) {
  cpp_int r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::string to_fixed(const Rational& value, int places) {
  if (places < 0) throw std::invalid_argument("negative decimal places");
  const cpp_int num = boost::multiprecision::numerator(value);
  const cpp_int den = boost::multiprecision::denominator(value);
  const cpp_int scale = pow10(places);
  // floor(value * scale + 1/2)
  cpp_int scaled = floor_div(2 * num * scale + den, 2 * den);

  std::string sign;
  if (scaled < 0) {
    sign = "-";
    scaled = -scaled;
  }
  std::string digits = scaled.str();
  if (places == 0) return sign + digits;
  if (digits.size() <= static_cast<std::size_t>(places))
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  return sign + digits;
}

std::string to_exact(const Rational& value) {
  const cpp_int num = boost::multiprecision::numerator(value);
  const cpp_int den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool is_integer(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw fail();

  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto n = s.substr(0, slash);
    auto d = s.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d)) throw fail();
    cpp_int den{std::string(d)};
    if (den == 0) throw fail();
    out = Rational(cpp_int(std::string(n)), den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw fail();
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp))) throw fail();
    cpp_int whole = ip.empty() ? cpp_int(0) : cpp_int(std::string(ip));
    cpp_int frac = fp.empty() ? cpp_int(0) : cpp_int(std::string(fp));
    const cpp_int scale = pow10(static_cast<int>(fp.size()));
    out = Rational(whole * scale + frac, scale);
  } else {
    if (!all_digits(s)) throw fail();
    out = Rational(cpp_int(std::string(s)));
  }
  return negative ? Rational(-out) : out;
}

}  // namespace monoslicer
