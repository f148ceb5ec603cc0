#ifndef ODYN_FIT_HPP
#define ODYN_FIT_HPP

#include <cmath>
#include <cstddef>
#include <span>

namespace odyn {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = a + b x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  f.n = x.size();
  if (f.n < 2) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / f.n, my = sy / f.n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = (syy > 0) ? 1.0 - ss_res / syy : 1.0;
  if (f.n > 2 && sxx > 0) f.slope_stderr = std::sqrt(ss_res / ((f.n - 2) * sxx));
  return f;
}

}  // namespace odyn

#endif
