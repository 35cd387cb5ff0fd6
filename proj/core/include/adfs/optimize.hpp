#pragma once

#include <cmath>
#include <vector>

namespace adfs {

/// n points log-spaced from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? hi : std::exp(a + (b - a) * i / (n - 1));
  if (n > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

struct ScalarMax {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
template <class F>
ScalarMax golden_section_max(F&& f, double a, double b, double tol = 1e-10, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

}  // namespace adfs
