#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace pharmonic {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

// Median of pairwise slopes.  Robust to a few corrupted nodes; pairs are
// subsampled evenly when the point count would make the all-pairs set large.
double theil_sen_slope(std::span<const double> x, std::span<const double> y,
                       std::size_t max_points = 201);

// Second derivative at xc of the degree-4 interpolant through 5 abscissae.
// The points need not be equally spaced; xc is usually one of them.
double poly5_second_derivative(const std::array<double, 5>& x,
                               const std::array<double, 5>& y, double xc);

// Gauss-Legendre 4-point rule on [-1, 1].
inline constexpr std::array<double, 4> gl4_nodes = {
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
    0.8611363115940526};
inline constexpr std::array<double, 4> gl4_weights = {
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
    0.3478548451374538};

// Solves a dense linear system in place by partial-pivot elimination.
// a is row-major n x n.  Returns false when a pivot degenerates.
bool solve_linear(std::size_t n, double* a, double* b);

}  // namespace pharmonic
