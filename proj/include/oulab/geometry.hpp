#pragma once

// Observation regions: thick sets, the interior-ball condition, grid masks
// and masked norms.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oulab/field.hpp"
#include "oulab/grid.hpp"

namespace oulab {

/// Half-open axis-aligned box [lo, hi). Bounds may be infinite.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const double* x) const;
};

/// An observation set omega with its thickness parameters (gamma, a).
class ThickSet {
 public:
  enum class Kind { kBoxes, kPeriodic, kIndicator };

  /// Finite union of boxes.
  static ThickSet boxes(int dim, std::vector<Box> boxes);
  /// Union over k in Z^N of cell_boxes translated by (k_i * period_i).
  static ThickSet periodic(std::vector<double> period, std::vector<Box> cell_boxes);
  /// Union of the grid cells whose flag is set.
  static ThickSet indicator(GridSpec grid, std::vector<std::uint8_t> cells);
  static ThickSet full(int dim);
  static ThickSet empty(int dim);

  /// Sets (gamma, a); gamma in (0, 1], a_j > 0.
  ThickSet& with_thickness(double gamma, std::vector<double> cube);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& cube() const { return cube_; }
  const std::vector<Box>& box_list() const { return boxes_; }
  const std::vector<double>& period() const { return period_; }
  const std::optional<GridSpec>& grid() const { return grid_; }

  bool contains(const double* x) const;

  /// |omega cap box|, exact for box and periodic representations.
  double intersection_measure(const Box& region) const;

 private:
  ThickSet(int dim, Kind kind) : dim_(dim), kind_(kind) {}

  int dim_;
  Kind kind_;
  double gamma_ = 1.0;
  std::vector<double> cube_;
  std::vector<Box> boxes_;
  std::vector<double> period_;
  std::optional<GridSpec> grid_;
  std::vector<std::uint8_t> cells_;
};

/// Text format, one directive per line ('#' starts a comment):
///   periodic p_1 [p_2 ...]        the boxes below form one period cell
///   box lo_1 hi_1 [lo_2 hi_2 ...]  a half-open box; bounds may be inf/-inf
///   full | empty                   the whole space / no box
///   thickness gamma a_1 [a_2 ...]  thickness parameters
ThickSet parse_thick_set(std::istream& in, int dim_hint = 0);
ThickSet parse_thick_set(const std::string& text, int dim_hint = 0);
std::string to_text(const ThickSet& set);

struct ThicknessReport {
  bool passed = false;
  double min_ratio = 0.0;
  std::vector<double> witness;
  double tolerance = 0.0;
  long samples = 0;
  bool exact = false;
};

/// Minimum of |omega cap (x + C)| / prod a_j over a translation grid with
/// spacing min_j a_j / resolution. Periodic sets are scanned over one period;
/// other sets over all x with x + C inside the window.
ThicknessReport thickness_check(const ThickSet& set, const Box& window, int resolution);

struct GeometricReport {
  bool passed = false;
  /// Largest distance from a tested y to the nearest admissible ball center.
  double worst_distance = 0.0;
  std::vector<double> worst_point;
  long samples = 0;
};

/// Tests: for every y on a grid over the window there is y' with
/// B(y', r) in omega and |y - y'| < delta.
GeometricReport geometric_condition_check(const ThickSet& set, double delta, double r,
                                          const Box& window, int samples_per_axis = 256);

/// Cell indicator: a cell belongs to omega when its center does.
struct Mask {
  GridSpec spec;
  std::vector<std::uint8_t> cells;

  std::size_t count() const;
  bool full() const { return count() == cells.size(); }
};

Mask mask(const ThickSet& set, const GridSpec& spec);

/// sqrt(h^N sum_{mask} v^2).
double masked_l2_norm(const GridState& state, const Mask& mask);

/// The state with every value outside the mask set to zero.
GridState restrict_to(const GridState& state, const Mask& mask);

}  // namespace oulab
