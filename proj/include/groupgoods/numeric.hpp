// Copyright 2026 The groupgoods Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupgoods {

/// A numerical routine met a state that the closed forms rule out (for
/// example a bracket without a sign change). Indicates a bug, not bad input.
class InternalInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace numeric {

/// x^k by repeated multiplication (k >= 0).
template <class T>
constexpr T ipow(T x, int k) {
  T out(1);
  for (int i = 0; i < k; ++i) out = out * x;
  return out;
}

/// 1 + x + ... + x^(k-1); zero for k <= 0.
template <class T>
constexpr T geometric_sum(T x, int k) {
  T sum(0);
  T term(1);
  for (int j = 0; j < k; ++j) {
    sum = sum + term;
    term = term * x;
  }
  return sum;
}

/// `count` equally spaced points from lo to hi with both endpoints exact.
inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("linspace needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = lo + step * i;
  xs.back() = hi;
  return xs;
}

struct BisectionResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs (or one
/// of them be zero). Runs until the bracket cannot shrink further, f hits
/// zero exactly, or max_iterations; returns the endpoint with smaller |f|.
template <class F>
BisectionResult bisect(F&& f, double lo, double hi, int max_iterations) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  BisectionResult out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  if (f_lo == 0.0) {
    out.root = lo;
    return out;
  }
  if (f_hi == 0.0) {
    out.root = hi;
    return out;
  }
  if ((f_lo < 0.0) == (f_hi < 0.0))
    throw InternalInconsistency("bisection bracket [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] has no sign change");
  for (; out.iterations < max_iterations; ++out.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      out.root = mid;
      return out;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  if (std::abs(f_lo) <= std::abs(f_hi)) {
    out.root = lo;
    out.value = f_lo;
  } else {
    out.root = hi;
    out.value = f_hi;
  }
  return out;
}

struct GoldenResult {
  double argmax = 0.0;
  double max = 0.0;
  int iterations = 0;
};

/// Golden-section search for the maximum of a function unimodal on [lo, hi].
template <class F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double tolerance,
                                     int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  GoldenResult out;
  while (hi - lo > tolerance && out.iterations < max_iterations) {
    ++out.iterations;
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  if (f1 >= f2) {
    out.argmax = x1;
    out.max = f1;
  } else {
    out.argmax = x2;
    out.max = f2;
  }
  return out;
}

}  // namespace numeric
}  // namespace groupgoods
