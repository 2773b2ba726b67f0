#pragma once

#include <cstddef>
#include <vector>

#include "oulab/errors.hpp"
#include "oulab/grid.hpp"
#include "oulab/kernels.hpp"

namespace oulab::kernels::detail {

/// Enumerates the M^{N-1} grid lines along one axis.
struct LineLayout {
  LineLayout(const GridSpec& grid, int axis) : grid(grid), axis(axis) {
    if (axis < 0 || axis >= grid.dim()) throw InvalidInput("line pass axis out of range");
    stride = 1;
    for (int i = axis + 1; i < grid.dim(); ++i) stride *= grid.points();
    lines = grid.size() / grid.points();
  }

  /// Flat offset of the first sample of line `line`.
  std::size_t base(std::size_t line) const {
    const std::size_t outer = line / stride;
    const std::size_t inner = line % stride;
    return outer * stride * grid.points() + inner;
  }

  /// Affine shift beta = sum_{i != axis} coeffs[i] x(idx_i) for the line.
  double shift(std::size_t line, const LinePass& pass) const {
    int index[3] = {0, 0, 0};
    grid.unflatten(base(line), index);
    double beta = 0.0;
    for (int i = 0; i < grid.dim(); ++i) {
      if (i != axis) beta += pass.coeffs[i] * grid.coordinate(index[i]);
    }
    return beta;
  }

  const GridSpec& grid;
  int axis;
  std::size_t stride;
  std::size_t lines;
};

inline void check_pass(const GridSpec& grid, const LinePass& pass,
                       std::size_t in_size, std::size_t out_size) {
  if (static_cast<int>(pass.coeffs.size()) != grid.dim()) {
    throw InvalidInput("line pass needs one coefficient per axis");
  }
  if (in_size != grid.size() || out_size != grid.size()) {
    throw InvalidInput("line pass buffers do not match the grid");
  }
}

}  // namespace oulab::kernels::detail
