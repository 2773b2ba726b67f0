#pragma once

#include <cstddef>
#include <vector>

namespace oulab {

/// Uniform cell-centered grid on the box [-L, L)^N with M points per axis.
/// Sample j along an axis sits at x_j = -L + (j + 1/2) h with h = 2L/M.
/// Values are stored row-major with axis 0 varying slowest.
class GridSpec {
 public:
  GridSpec(int dim, double half_width, int points);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / points_; }
  double cell_volume() const;
  std::size_t size() const;
  std::vector<int> dims() const { return std::vector<int>(dim_, points_); }

  double coordinate(int j) const { return -half_width_ + (j + 0.5) * spacing(); }
  /// Angular frequency of FFT index k (natural order), in (pi/L) * [-M/2, M/2).
  double frequency(int k) const;
  /// Signed lattice index in [-M/2, M/2) of FFT index k.
  int centered_index(int k) const { return k < points_ / 2 ? k : k - points_; }

  /// Multi-index of flat position `flat`.
  void unflatten(std::size_t flat, int* index) const;

  bool operator==(const GridSpec& other) const = default;

 private:
  int dim_;
  double half_width_;
  int points_;
};

}  // namespace oulab
