#include "nuspec/digit_code.hpp"

#include <cmath>
#include <stdexcept>

namespace nuspec {

DigitCode::DigitCode(int base, std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> cycle)
    : base_(base), prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (base_ < 2 || base_ > 16) throw std::invalid_argument("digit base out of range");
  if (cycle_.empty()) cycle_.push_back(0);
}

DigitCode DigitCode::from_double(double x, int base, std::size_t digits) {
  x = wrap_unit(x);
  std::vector<std::uint8_t> out;
  out.reserve(digits);
  if (x > 0.0) {
    int e = 0;
    double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1), e <= 0
    auto mant = static_cast<unsigned __int128>(std::ldexp(m, 53));
    int k = 53 - e;
    if (k > 120) {
      mant >>= (k - 120);
      k = 120;
    }
    const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << k) - 1;
    unsigned __int128 num = mant;
    for (std::size_t i = 0; i < digits && num != 0; ++i) {
      num *= static_cast<unsigned>(base);
      out.push_back(static_cast<std::uint8_t>(num >> k));
      num &= mask;
    }
  }
  return DigitCode(base, std::move(out));
}

DigitCode DigitCode::periodic(int base, std::vector<std::uint8_t> word) {
  return DigitCode(base, {}, std::move(word));
}

DigitCode DigitCode::random(int base, std::size_t digits, Rng& rng) {
  std::vector<std::uint8_t> out(digits);
  if (base == 2) {
    for (std::size_t i = 0; i < digits; i += 64) {
      std::uint64_t bits = rng();
      for (std::size_t j = 0; j < 64 && i + j < digits; ++j) out[i + j] = (bits >> j) & 1u;
    }
  } else {
    for (auto& d : out) d = static_cast<std::uint8_t>(rng() % static_cast<unsigned>(base));
  }
  return DigitCode(base, std::move(out));
}

int DigitCode::window_digits(int base) {
  // Largest W with base^W <= 2^63, so sums of two windows never overflow.
  int w = 0;
  unsigned __int128 p = 1;
  while (p * static_cast<unsigned>(base) <= (static_cast<unsigned __int128>(1) << 63)) {
    p *= static_cast<unsigned>(base);
    ++w;
  }
  return w;
}

std::uint64_t DigitCode::window_modulus(int base) {
  std::uint64_t p = 1;
  for (int i = 0; i < window_digits(base); ++i) p *= static_cast<std::uint64_t>(base);
  return p;
}

std::uint64_t DigitCode::window(std::size_t shift) const {
  const int w = window_digits(base_);
  std::uint64_t v = 0;
  for (int i = 0; i < w; ++i) v = v * static_cast<std::uint64_t>(base_) + digit(shift + i);
  return v;
}

double DigitCode::value(std::size_t shift) const {
  return wrap_unit(static_cast<double>(window(shift)) / static_cast<double>(window_modulus(base_)));
}

double window_distance(int base, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t mod = DigitCode::window_modulus(base);
  std::uint64_t d = a >= b ? a - b : b - a;
  d = std::min(d, mod - d);
  return static_cast<double>(d) / static_cast<double>(mod);
}

WindowCursor::WindowCursor(const DigitCode& code) : code_(&code) {
  width_ = DigitCode::window_digits(code.base());
  for (int i = 1; i < width_; ++i) top_ *= static_cast<std::uint64_t>(code.base());
  value_ = code.window(0);
}

void WindowCursor::advance() {
  const auto b = static_cast<std::uint64_t>(code_->base());
  value_ = (value_ - code_->digit(shift_) * top_) * b + code_->digit(shift_ + width_);
  ++shift_;
}

}  // namespace nuspec
