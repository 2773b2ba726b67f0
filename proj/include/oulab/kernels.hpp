#pragma once

// Line resampling kernels: evaluate the periodic trigonometric interpolant
// of every grid line along one axis at affinely shifted, uniformly spaced
// points. These are the building blocks of the drift flow f(e^{tB} x).
//
// The fast kernels use Bluestein's chirp-z transform per line and run the
// lines in parallel with OpenMP. The `reference` namespace holds the direct
// O(M^2)-per-line serial sums they are tested and benchmarked against.

#include <span>
#include <vector>

#include "oulab/grid.hpp"

namespace oulab::kernels {

/// Output sample at multi-index idx takes the input line through idx along
/// `axis`, evaluated at y = sum_i coeffs[i] * x(idx_i). Points with y outside
/// [-L, L) evaluate to zero.
struct LinePass {
  int axis = 0;
  std::vector<double> coeffs;
};

void resample_lines(const GridSpec& grid, const LinePass& pass,
                    std::span<const double> in, std::span<double> out);

/// Exact transpose of resample_lines with respect to the Euclidean inner
/// product on grid values.
void resample_lines_adjoint(const GridSpec& grid, const LinePass& pass,
                            std::span<const double> in, std::span<double> out);

namespace reference {

void resample_lines(const GridSpec& grid, const LinePass& pass,
                    std::span<const double> in, std::span<double> out);

void resample_lines_adjoint(const GridSpec& grid, const LinePass& pass,
                            std::span<const double> in, std::span<double> out);

}  // namespace reference

}  // namespace oulab::kernels
