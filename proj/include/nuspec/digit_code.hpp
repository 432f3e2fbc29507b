#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nuspec/geometry.hpp"

namespace nuspec {

// Base-b expansion of a point of [0,1): finite prefix followed by a repeating cycle.
// Orbits of x -> b x mod 1 are digit shifts, so iterates are exact at any depth.
class DigitCode {
 public:
  DigitCode() = default;
  DigitCode(int base, std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> cycle = {0});

  // Exact expansion of a double (a dyadic rational). Digits past `digits` are dropped.
  static DigitCode from_double(double x, int base, std::size_t digits);
  // Purely periodic point with the given repeating word.
  static DigitCode periodic(int base, std::vector<std::uint8_t> word);
  static DigitCode random(int base, std::size_t digits, Rng& rng);

  int base() const { return base_; }
  std::uint8_t digit(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : cycle_[(i - prefix_.size()) % cycle_.size()];
  }
  const std::vector<std::uint8_t>& prefix() const { return prefix_; }
  const std::vector<std::uint8_t>& cycle() const { return cycle_; }

  // Integer value of digits [shift, shift + window_digits) and the real point it encodes.
  std::uint64_t window(std::size_t shift) const;
  double value(std::size_t shift = 0) const;

  static int window_digits(int base);
  static std::uint64_t window_modulus(int base);

 private:
  int base_ = 2;
  std::vector<std::uint8_t> prefix_;
  std::vector<std::uint8_t> cycle_{0};
};

// Circle distance between two windows of the same base, resolution base^-window_digits.
double window_distance(int base, std::uint64_t a, std::uint64_t b);

// Rolling window over the shifts 0, 1, 2, ... of a code.
class WindowCursor {
 public:
  explicit WindowCursor(const DigitCode& code);
  std::uint64_t value() const { return value_; }
  void advance();

 private:
  const DigitCode* code_;
  std::size_t shift_ = 0;
  std::uint64_t value_ = 0;
  std::uint64_t top_ = 1;
  int width_ = 0;
};

// One code per coordinate (one on the circle, two on the torus).
struct CodedPoint {
  std::vector<DigitCode> coords;

  Point value(std::size_t shift = 0) const {
    Point p;
    for (std::size_t i = 0; i < coords.size(); ++i) p[static_cast<int>(i)] = coords[i].value(shift);
    return p;
  }
};

}  // namespace nuspec
