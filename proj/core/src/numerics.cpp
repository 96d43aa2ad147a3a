#include "pharmonic/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pharmonic {

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    throw std::invalid_argument("least_squares_line: need two matched samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

double theil_sen_slope(std::span<const double> x, std::span<const double> y,
                       std::size_t max_points) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    throw std::invalid_argument("theil_sen_slope: need two matched samples");
  std::vector<std::size_t> idx;
  if (n <= max_points) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  } else {
    idx.reserve(max_points);
    for (std::size_t k = 0; k < max_points; ++k)
      idx.push_back(k * (n - 1) / (max_points - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  }
  std::vector<double> slopes;
  slopes.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const double dx = x[idx[j]] - x[idx[i]];
      if (dx != 0.0) slopes.push_back((y[idx[j]] - y[idx[i]]) / dx);
    }
  if (slopes.empty())
    throw std::invalid_argument("theil_sen_slope: all abscissae equal");
  const std::size_t mid = slopes.size() / 2;
  std::nth_element(slopes.begin(), slopes.begin() + mid, slopes.end());
  if (slopes.size() % 2 == 1) return slopes[mid];
  const double hi = slopes[mid];
  const double lo = *std::max_element(slopes.begin(), slopes.begin() + mid);
  return 0.5 * (lo + hi);
}

bool solve_linear(std::size_t n, double* a, double* b) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    if (a[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[row * n + k] -= factor * a[col * n + k];
      b[row] -= factor * b[col];
    }
  }
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (std::size_t k = row + 1; k < n; ++k) acc -= a[row * n + k] * b[k];
    b[row] = acc / a[row * n + row];
  }
  return true;
}

double poly5_second_derivative(const std::array<double, 5>& x,
                               const std::array<double, 5>& y, double xc) {
  // Shift to xc and scale by the spread so the Vandermonde system stays
  // well conditioned, then read the quadratic coefficient.
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi - xc));
  if (scale == 0.0) throw std::invalid_argument("poly5_second_derivative: identical abscissae");
  double a[25], b[5];
  for (int i = 0; i < 5; ++i) {
    const double t = (x[i] - xc) / scale;
    double pw = 1.0;
    for (int j = 0; j < 5; ++j) {
      a[i * 5 + j] = pw;
      pw *= t;
    }
    b[i] = y[i];
  }
  if (!solve_linear(5, a, b))
    throw std::invalid_argument("poly5_second_derivative: degenerate abscissae");
  return 2.0 * b[2] / (scale * scale);
}

}  // namespace pharmonic
