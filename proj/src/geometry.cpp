#include "oulab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>

#include "oulab/errors.hpp"

namespace oulab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_box(const Box& b, int dim) {
  if (b.dim() != dim || static_cast<int>(b.hi.size()) != dim) {
    throw InvalidInput("box dimension does not match the set dimension");
  }
  for (int i = 0; i < dim; ++i) {
    if (std::isnan(b.lo[i]) || std::isnan(b.hi[i]) || b.lo[i] > b.hi[i]) {
      throw InvalidInput("box bounds must satisfy lo <= hi");
    }
  }
}

std::optional<Box> clip(const Box& b, const Box& region) {
  Box out = b;
  for (int i = 0; i < b.dim(); ++i) {
    out.lo[i] = std::max(b.lo[i], region.lo[i]);
    out.hi[i] = std::min(b.hi[i], region.hi[i]);
    if (!(out.lo[i] < out.hi[i])) return std::nullopt;
  }
  return out;
}

// Exact Lebesgue measure of a union of finite boxes by coordinate compression.
double union_measure(const std::vector<Box>& boxes, int dim) {
  if (boxes.empty()) return 0.0;
  std::vector<std::vector<double>> cuts(dim);
  for (const auto& b : boxes) {
    for (int i = 0; i < dim; ++i) {
      cuts[i].push_back(b.lo[i]);
      cuts[i].push_back(b.hi[i]);
    }
  }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  double total = 0.0;
  std::vector<std::size_t> cell(dim, 0);
  std::vector<double> mid(dim);
  std::function<void(int, double)> walk = [&](int axis, double volume) {
    if (axis == dim) {
      for (const auto& b : boxes) {
        if (b.contains(mid.data())) {
          total += volume;
          return;
        }
      }
      return;
    }
    for (std::size_t k = 0; k + 1 < cuts[axis].size(); ++k) {
      mid[axis] = 0.5 * (cuts[axis][k] + cuts[axis][k + 1]);
      walk(axis + 1, volume * (cuts[axis][k + 1] - cuts[axis][k]));
    }
  };
  walk(0, 1.0);
  return total;
}

}  // namespace

bool Box::contains(const double* x) const {
  for (int i = 0; i < dim(); ++i) {
    if (!(x[i] >= lo[i] && x[i] < hi[i])) return false;
  }
  return true;
}

ThickSet ThickSet::boxes(int dim, std::vector<Box> boxes) {
  if (dim < 1) throw InvalidInput("thick set dimension must be >= 1");
  for (const auto& b : boxes) validate_box(b, dim);
  ThickSet s(dim, Kind::kBoxes);
  s.boxes_ = std::move(boxes);
  s.cube_.assign(dim, 1.0);
  return s;
}

ThickSet ThickSet::periodic(std::vector<double> period, std::vector<Box> cell_boxes) {
  const int dim = static_cast<int>(period.size());
  if (dim < 1) throw InvalidInput("periodic set needs a period vector");
  for (double p : period) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("periods must be positive");
  }
  for (const auto& b : cell_boxes) {
    validate_box(b, dim);
    for (int i = 0; i < dim; ++i) {
      if (!std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i])) {
        throw InvalidInput("periodic cell boxes must be bounded");
      }
    }
  }
  ThickSet s(dim, Kind::kPeriodic);
  s.period_ = std::move(period);
  s.boxes_ = std::move(cell_boxes);
  s.cube_.assign(dim, 1.0);
  return s;
}

ThickSet ThickSet::indicator(GridSpec grid, std::vector<std::uint8_t> cells) {
  if (cells.size() != grid.size()) throw InvalidInput("indicator size does not match grid");
  ThickSet s(grid.dim(), Kind::kIndicator);
  s.grid_ = grid;
  s.cells_ = std::move(cells);
  s.cube_.assign(grid.dim(), 1.0);
  return s;
}

ThickSet ThickSet::full(int dim) {
  return boxes(dim, {Box{std::vector<double>(dim, -kInf), std::vector<double>(dim, kInf)}});
}

ThickSet ThickSet::empty(int dim) { return boxes(dim, {}); }

ThickSet& ThickSet::with_thickness(double gamma, std::vector<double> cube) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in (0, 1]");
  if (static_cast<int>(cube.size()) != dim_) {
    throw InvalidInput("cube side vector must have one entry per dimension");
  }
  for (double a : cube) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("cube sides must be positive");
  }
  gamma_ = gamma;
  cube_ = std::move(cube);
  return *this;
}

bool ThickSet::contains(const double* x) const {
  switch (kind_) {
    case Kind::kBoxes:
      return std::any_of(boxes_.begin(), boxes_.end(),
                         [x](const Box& b) { return b.contains(x); });
    case Kind::kPeriodic:
      for (const auto& b : boxes_) {
        bool inside = true;
        for (int i = 0; i < dim_ && inside; ++i) {
          const double k = std::floor((x[i] - b.lo[i]) / period_[i]);
          const double reduced = x[i] - k * period_[i];
          inside = reduced < b.hi[i];
        }
        if (inside) return true;
      }
      return false;
    case Kind::kIndicator: {
      const auto& g = *grid_;
      std::size_t flat = 0;
      for (int i = 0; i < dim_; ++i) {
        const double j = std::floor((x[i] + g.half_width()) / g.spacing());
        if (j < 0 || j >= g.points()) return false;
        flat = flat * g.points() + static_cast<std::size_t>(j);
      }
      return cells_[flat] != 0;
    }
  }
  return false;
}

double ThickSet::intersection_measure(const Box& region) const {
  validate_box(region, dim_);
  std::vector<Box> clipped;
  switch (kind_) {
    case Kind::kBoxes:
      for (const auto& b : boxes_) {
        if (auto c = clip(b, region)) clipped.push_back(*c);
      }
      return union_measure(clipped, dim_);
    case Kind::kPeriodic: {
      for (const auto& b : boxes_) {
        std::vector<long> first(dim_), last(dim_);
        for (int i = 0; i < dim_; ++i) {
          first[i] = static_cast<long>(std::floor((region.lo[i] - b.hi[i]) / period_[i]));
          last[i] = static_cast<long>(std::ceil((region.hi[i] - b.lo[i]) / period_[i]));
        }
        std::vector<long> k = first;
        while (true) {
          Box shifted = b;
          for (int i = 0; i < dim_; ++i) {
            shifted.lo[i] += k[i] * period_[i];
            shifted.hi[i] += k[i] * period_[i];
          }
          if (auto c = clip(shifted, region)) clipped.push_back(*c);
          int axis = 0;
          while (axis < dim_ && ++k[axis] > last[axis]) {
            k[axis] = first[axis];
            ++axis;
          }
          if (axis == dim_) break;
        }
      }
      return union_measure(clipped, dim_);
    }
    case Kind::kIndicator: {
      const auto& g = *grid_;
      int index[3] = {0, 0, 0};
      double x[3] = {0.0, 0.0, 0.0};
      std::size_t count = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!cells_[i]) continue;
        g.unflatten(i, index);
        for (int d = 0; d < dim_; ++d) x[d] = g.coordinate(index[d]);
        if (region.contains(x)) ++count;
      }
      return static_cast<double>(count) * g.cell_volume();
    }
  }
  return 0.0;
}

// ---- text format ------------------------------------------------------------

namespace {

std::vector<double> parse_numbers(std::istringstream& line, int line_no) {
  std::vector<double> out;
  std::string token;
  while (line >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      throw InvalidInput("thick set line " + std::to_string(line_no) +
                         ": not a number: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

ThickSet parse_thick_set(std::istream& in, int dim_hint) {
  std::vector<double> period;
  std::vector<Box> boxes;
  std::optional<std::pair<double, std::vector<double>>> thickness;
  bool full = false;
  int dim = dim_hint;
  auto set_dim = [&dim](int d, int line_no) {
    if (dim != 0 && dim != d) {
      throw InvalidInput("thick set line " + std::to_string(line_no) +
                         ": inconsistent dimension " + std::to_string(d) +
                         " (expected " + std::to_string(dim) + ")");
    }
    dim = d;
  };
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string keyword;
    if (!(line >> keyword)) continue;
    if (keyword == "periodic") {
      period = parse_numbers(line, line_no);
      if (period.empty()) {
        throw InvalidInput("thick set line " + std::to_string(line_no) +
                           ": periodic needs a period vector");
      }
      set_dim(static_cast<int>(period.size()), line_no);
    } else if (keyword == "box") {
      const auto v = parse_numbers(line, line_no);
      if (v.empty() || v.size() % 2 != 0) {
        throw InvalidInput("thick set line " + std::to_string(line_no) +
                           ": box needs lo/hi pairs");
      }
      const int d = static_cast<int>(v.size() / 2);
      set_dim(d, line_no);
      Box b;
      for (int i = 0; i < d; ++i) {
        b.lo.push_back(v[2 * i]);
        b.hi.push_back(v[2 * i + 1]);
      }
      boxes.push_back(std::move(b));
    } else if (keyword == "full") {
      full = true;
    } else if (keyword == "empty") {
      // no boxes
    } else if (keyword == "thickness") {
      auto v = parse_numbers(line, line_no);
      if (v.size() < 2) {
        throw InvalidInput("thick set line " + std::to_string(line_no) +
                           ": thickness needs gamma and cube sides");
      }
      set_dim(static_cast<int>(v.size() - 1), line_no);
      thickness.emplace(v[0], std::vector<double>(v.begin() + 1, v.end()));
    } else {
      throw InvalidInput("thick set line " + std::to_string(line_no) +
                         ": unknown directive '" + keyword + "'");
    }
  }
  if (dim == 0) throw InvalidInput("thick set: cannot infer the dimension");
  ThickSet set = full               ? ThickSet::full(dim)
                 : !period.empty()  ? ThickSet::periodic(period, boxes)
                                    : ThickSet::boxes(dim, boxes);
  if (full && (!period.empty() || !boxes.empty())) {
    throw InvalidInput("thick set: 'full' cannot be combined with boxes");
  }
  if (thickness) set.with_thickness(thickness->first, thickness->second);
  return set;
}

ThickSet parse_thick_set(const std::string& text, int dim_hint) {
  std::istringstream in(text);
  return parse_thick_set(in, dim_hint);
}

std::string to_text(const ThickSet& set) {
  std::ostringstream out;
  out.precision(17);
  if (set.kind() == ThickSet::Kind::kIndicator) {
    throw InvalidInput("indicator sets have no text form");
  }
  if (set.kind() == ThickSet::Kind::kPeriodic) {
    out << "periodic";
    for (double p : set.period()) out << ' ' << p;
    out << '\n';
  }
  if (set.kind() == ThickSet::Kind::kBoxes && set.box_list().empty()) out << "empty\n";
  for (const auto& b : set.box_list()) {
    out << "box";
    for (int i = 0; i < b.dim(); ++i) out << ' ' << b.lo[i] << ' ' << b.hi[i];
    out << '\n';
  }
  out << "thickness " << set.gamma();
  for (double a : set.cube()) out << ' ' << a;
  out << '\n';
  return out.str();
}

// ---- thickness --------------------------------------------------------------

ThicknessReport thickness_check(const ThickSet& set, const Box& window, int resolution) {
  const int dim = set.dim();
  if (window.dim() != dim || static_cast<int>(window.hi.size()) != dim) {
    throw InvalidInput("thickness_check: window dimension does not match the set");
  }
  if (resolution < 64) throw InvalidInput("thickness_check: resolution must be >= 64");
  const auto& a = set.cube();
  const double step = *std::min_element(a.begin(), a.end()) / resolution;
  double cube_volume = 1.0;
  for (double s : a) cube_volume *= s;

  // Translation samples per axis.
  std::vector<std::vector<double>> axes(dim);
  for (int i = 0; i < dim; ++i) {
    if (set.kind() == ThickSet::Kind::kPeriodic) {
      const long count = static_cast<long>(std::ceil(set.period()[i] / step));
      for (long j = 0; j < count; ++j) axes[i].push_back(j * step);
      continue;
    }
    const double lo = window.lo[i];
    const double hi = window.hi[i] - a[i];
    if (!std::isfinite(window.lo[i]) || !std::isfinite(window.hi[i]) || hi < lo) {
      throw InvalidInput("thickness_check: window must be finite and wider than the cube");
    }
    const long count = static_cast<long>(std::floor((hi - lo) / step)) + 1;
    for (long j = 0; j < count; ++j) axes[i].push_back(lo + j * step);
    if (axes[i].back() < hi) axes[i].push_back(hi);
  }
  if (set.kind() == ThickSet::Kind::kIndicator) {
    // Outside its grid an indicator set is empty, which would read as thin.
    const double half = set.grid()->half_width();
    for (int i = 0; i < dim; ++i) {
      if (window.lo[i] < -half || window.hi[i] > half) {
        throw InvalidInput("thickness_check: window leaves the indicator grid");
      }
    }
  }

  ThicknessReport report;
  report.exact = set.kind() != ThickSet::Kind::kIndicator;
  report.tolerance = 2.0 / resolution;
  report.min_ratio = kInf;
  std::vector<std::size_t> k(dim, 0);
  Box cell{std::vector<double>(dim), std::vector<double>(dim)};
  while (true) {
    for (int i = 0; i < dim; ++i) {
      cell.lo[i] = axes[i][k[i]];
      cell.hi[i] = axes[i][k[i]] + a[i];
    }
    const double ratio = set.intersection_measure(cell) / cube_volume;
    ++report.samples;
    if (ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.witness = cell.lo;
    }
    int axis = 0;
    while (axis < dim && ++k[axis] == axes[axis].size()) {
      k[axis] = 0;
      ++axis;
    }
    if (axis == dim) break;
  }
  report.passed = report.min_ratio >= set.gamma() - report.tolerance;
  return report;
}

// ---- interior-ball condition ------------------------------------------------

namespace {

// Distance from y to the interval [lo, hi] (empty if lo > hi).
double interval_distance(double y, double lo, double hi) {
  if (y < lo) return lo - y;
  if (y > hi) return y - hi;
  return 0.0;
}

}  // namespace

GeometricReport geometric_condition_check(const ThickSet& set, double delta, double r,
                                          const Box& window, int samples_per_axis) {
  const int dim = set.dim();
  if (!(delta > 0.0) || !(r > 0.0)) {
    throw InvalidInput("geometric_condition_check: delta and r must be positive");
  }
  if (window.dim() != dim || samples_per_axis < 2) {
    throw InvalidInput("geometric_condition_check: bad window or sample count");
  }
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(window.lo[i]) || !std::isfinite(window.hi[i]) ||
        window.hi[i] <= window.lo[i]) {
      throw InvalidInput("geometric_condition_check: window must be a finite box");
    }
  }

  // Admissible centers: boxes shrunk by r (box and periodic representations),
  // or eroded cells of the indicator grid.
  std::vector<Box> centers;
  std::vector<std::vector<double>> center_points;
  if (set.kind() != ThickSet::Kind::kIndicator) {
    for (const auto& b : set.box_list()) {
      Box s = b;
      bool ok = true;
      for (int i = 0; i < dim; ++i) {
        s.lo[i] = b.lo[i] + r;
        s.hi[i] = b.hi[i] - r;
        ok = ok && s.lo[i] <= s.hi[i];
      }
      if (ok) centers.push_back(std::move(s));
    }
  } else {
    // Erode on a sampling lattice: a candidate center qualifies when every
    // sample of the closed r-ball lies in omega.
    const double h = std::min(r / 4.0, (window.hi[0] - window.lo[0]) / samples_per_axis);
    const int reach = static_cast<int>(std::ceil(r / h));
    std::vector<std::vector<double>> offsets;
    std::vector<int> o(dim, -reach);
    while (true) {
      double norm2 = 0.0;
      for (int i = 0; i < dim; ++i) norm2 += (o[i] * h) * (o[i] * h);
      if (norm2 <= r * r) {
        std::vector<double> off(dim);
        for (int i = 0; i < dim; ++i) off[i] = o[i] * h;
        offsets.push_back(std::move(off));
      }
      int axis = 0;
      while (axis < dim && ++o[axis] > reach) {
        o[axis] = -reach;
        ++axis;
      }
      if (axis == dim) break;
    }
    std::vector<long> counts(dim);
    for (int i = 0; i < dim; ++i) {
      counts[i] = static_cast<long>(std::floor((window.hi[i] - window.lo[i] + 2 * delta) / h)) + 1;
    }
    std::vector<long> c(dim, 0);
    std::vector<double> p(dim), q(dim);
    while (true) {
      for (int i = 0; i < dim; ++i) p[i] = window.lo[i] - delta + c[i] * h;
      bool ok = true;
      for (const auto& off : offsets) {
        for (int i = 0; i < dim; ++i) q[i] = p[i] + off[i];
        if (!set.contains(q.data())) {
          ok = false;
          break;
        }
      }
      if (ok) center_points.push_back(p);
      int axis = 0;
      while (axis < dim && ++c[axis] == counts[axis]) {
        c[axis] = 0;
        ++axis;
      }
      if (axis == dim) break;
    }
  }

  auto distance_to_centers = [&](const std::vector<double>& y) {
    double best = kInf;
    for (const auto& s : centers) {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        double d = 0.0;
        if (set.kind() == ThickSet::Kind::kPeriodic) {
          const double p = set.period()[i];
          // Nearest translate of [lo, hi] along this axis.
          const double k = std::round((y[i] - 0.5 * (s.lo[i] + s.hi[i])) / p);
          d = kInf;
          for (double kk = k - 1; kk <= k + 1; kk += 1.0) {
            d = std::min(d, interval_distance(y[i], s.lo[i] + kk * p, s.hi[i] + kk * p));
          }
        } else {
          d = interval_distance(y[i], s.lo[i], s.hi[i]);
        }
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
    for (const auto& cp : center_points) {
      double d2 = 0.0;
      for (int i = 0; i < dim; ++i) d2 += (y[i] - cp[i]) * (y[i] - cp[i]);
      best = std::min(best, std::sqrt(d2));
    }
    return best;
  };

  GeometricReport report;
  std::vector<int> k(dim, 0);
  std::vector<double> y(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) {
      y[i] = window.lo[i] + (window.hi[i] - window.lo[i]) * k[i] / (samples_per_axis - 1);
    }
    const double d = distance_to_centers(y);
    ++report.samples;
    if (d > report.worst_distance || report.worst_point.empty()) {
      report.worst_distance = d;
      report.worst_point = y;
    }
    int axis = 0;
    while (axis < dim && ++k[axis] == samples_per_axis) {
      k[axis] = 0;
      ++axis;
    }
    if (axis == dim) break;
  }
  report.passed = report.worst_distance < delta;
  return report;
}

// ---- masks ------------------------------------------------------------------

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

Mask mask(const ThickSet& set, const GridSpec& spec) {
  if (set.dim() != spec.dim()) throw InvalidInput("mask: set and grid dimensions differ");
  Mask m{spec, std::vector<std::uint8_t>(spec.size(), 0)};
  int index[3] = {0, 0, 0};
  double x[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.unflatten(i, index);
    for (int d = 0; d < spec.dim(); ++d) x[d] = spec.coordinate(index[d]);
    m.cells[i] = set.contains(x) ? 1 : 0;
  }
  return m;
}

double masked_l2_norm(const GridState& state, const Mask& mask) {
  if (!(state.spec() == mask.spec)) throw InvalidInput("masked_l2_norm: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mask.cells.size(); ++i) {
    if (mask.cells[i]) s += state[i] * state[i];
  }
  return std::sqrt(state.spec().cell_volume() * s);
}

GridState restrict_to(const GridState& state, const Mask& mask) {
  if (!(state.spec() == mask.spec)) throw InvalidInput("restrict_to: grid mismatch");
  GridState out = state;
  for (std::size_t i = 0; i < mask.cells.size(); ++i) {
    if (!mask.cells[i]) out[i] = 0.0;
  }
  return out;
}

}  // namespace oulab
