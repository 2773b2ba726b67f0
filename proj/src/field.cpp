#include "oulab/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fft.hpp"
#include "oulab/errors.hpp"

namespace oulab {

using Complex = std::complex<double>;

// ---- GridSpec -------------------------------------------------------------

GridSpec::GridSpec(int dim, double half_width, int points)
    : dim_(dim), half_width_(half_width), points_(points) {
  if (dim < 1 || dim > 3) throw InvalidInput("grid dimension must be 1, 2 or 3");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidInput("grid half width must be positive and finite");
  }
  if (points < 16 || points % 2 != 0) {
    throw InvalidInput("grid points per axis must be even and >= 16");
  }
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int d = 0; d < dim_; ++d) n *= static_cast<std::size_t>(points_);
  return n;
}

double GridSpec::frequency(int k) const {
  return std::numbers::pi * centered_index(k) / half_width_;
}

void GridSpec::unflatten(std::size_t flat, int* index) const {
  for (int d = dim_ - 1; d >= 0; --d) {
    index[d] = static_cast<int>(flat % points_);
    flat /= points_;
  }
}

// ---- GridState ------------------------------------------------------------

GridState::GridState(GridSpec spec) : spec_(spec), values_(spec.size(), 0.0) {}

GridState::GridState(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size()) {
    throw InvalidInput("grid state has " + std::to_string(values_.size()) +
                       " values, grid needs " + std::to_string(spec_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("grid state has non-finite values");
  }
}

namespace {

void require_same_grid(const GridState& a, const GridState& b) {
  if (!(a.spec() == b.spec())) throw InvalidInput("grid states live on different grids");
}

}  // namespace

GridState& GridState::operator+=(const GridState& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridState& GridState::operator-=(const GridState& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridState& GridState::operator*=(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

GridState operator+(GridState a, const GridState& b) { return a += b; }
GridState operator-(GridState a, const GridState& b) { return a -= b; }
GridState operator*(double alpha, GridState a) { return a *= alpha; }

// ---- spectral -------------------------------------------------------------

SpectralState::SpectralState(GridSpec spec, std::vector<Complex> coefficients)
    : spec_(spec), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != spec_.size()) {
    throw InvalidInput("spectral state size does not match its grid");
  }
}

double SpectralState::frequency_norm2(std::size_t k) const {
  int index[3] = {0, 0, 0};
  spec_.unflatten(k, index);
  double s = 0.0;
  for (int d = 0; d < spec_.dim(); ++d) {
    const double xi = spec_.frequency(index[d]);
    s += xi * xi;
  }
  return s;
}

namespace {

// Per-coefficient factor (h^N/M^N)^{1/2} e^{-i xi_k . x0}.
std::vector<Complex> unitary_factors(const GridSpec& spec) {
  const int m = spec.points();
  const double x0 = spec.coordinate(0);
  std::vector<Complex> axis(m);
  const double scale = std::sqrt(spec.spacing() / m);
  for (int k = 0; k < m; ++k) axis[k] = scale * std::polar(1.0, -spec.frequency(k) * x0);
  std::vector<Complex> out(spec.size());
  int index[3] = {0, 0, 0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    spec.unflatten(i, index);
    Complex f = 1.0;
    for (int d = 0; d < spec.dim(); ++d) f *= axis[index[d]];
    out[i] = f;
  }
  return out;
}

std::vector<Complex> raw_forward(const GridState& state) {
  std::vector<Complex> data(state.values().begin(), state.values().end());
  fft::forward(data, state.spec().dims());
  return data;
}

std::vector<double> raw_backward_real(std::vector<Complex> data, const GridSpec& spec) {
  fft::backward(data, spec.dims());
  const double inv = 1.0 / static_cast<double>(spec.size());
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * inv;
  return out;
}

}  // namespace

SpectralState transform(const GridState& state) {
  auto data = raw_forward(state);
  const auto factors = unitary_factors(state.spec());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factors[i];
  return SpectralState(state.spec(), std::move(data));
}

GridState inverse_transform(const SpectralState& spectrum) {
  auto data = spectrum.coefficients();
  const auto factors = unitary_factors(spectrum.spec());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] /= factors[i];
  return GridState(spectrum.spec(), raw_backward_real(std::move(data), spectrum.spec()));
}

double l2_norm(const GridState& state) {
  double s = 0.0;
  for (double v : state.values()) s += v * v;
  return std::sqrt(state.spec().cell_volume() * s);
}

double inner_product(const GridState& u, const GridState& v) {
  require_same_grid(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.values().size(); ++i) s += u[i] * v[i];
  return u.spec().cell_volume() * s;
}

double l2_norm(const SpectralState& spectrum) {
  double s = 0.0;
  for (const auto& c : spectrum.coefficients()) s += std::norm(c);
  return std::sqrt(s);
}

double sobolev_norm(const GridState& state, double order, SobolevWeight weight) {
  if (!(order >= 0.0) || !std::isfinite(order)) {
    throw InvalidInput("sobolev_norm: order must be a finite nonnegative number");
  }
  const auto spectrum = transform(state);
  double s = 0.0;
  for (std::size_t k = 0; k < spectrum.coefficients().size(); ++k) {
    const double xi2 = spectrum.frequency_norm2(k);
    double w = 1.0;
    if (order > 0.0) {
      w = weight == SobolevWeight::kInhomogeneous ? std::pow(1.0 + xi2, order)
                                                  : std::pow(xi2, order);
    }
    s += w * std::norm(spectrum.coefficients()[k]);
  }
  return std::sqrt(s);
}

// ---- boundary guard ---------------------------------------------------------

double boundary_mass_fraction(const GridState& state) {
  const auto& spec = state.spec();
  const double edge = 0.9 * spec.half_width();
  const int m = spec.points();
  std::vector<char> outer(m);
  for (int j = 0; j < m; ++j) outer[j] = std::abs(spec.coordinate(j)) >= edge;
  // Row-major: the last axis varies fastest.
  const std::size_t rows = spec.size() / m;
  double total = 0.0;
  double shell = 0.0;
  int index[3] = {0, 0, 0};
  for (std::size_t r = 0; r < rows; ++r) {
    spec.unflatten(r * m, index);
    bool row_outer = false;
    for (int d = 0; d + 1 < spec.dim(); ++d) row_outer = row_outer || outer[index[d]];
    const double* v = state.values().data() + r * m;
    for (int j = 0; j < m; ++j) {
      const double v2 = v[j] * v[j];
      total += v2;
      if (row_outer || outer[j]) shell += v2;
    }
  }
  return total > 0.0 ? shell / total : 0.0;
}

void check_decay(const GridState& state, double threshold, const std::string& context) {
  const double fraction = boundary_mass_fraction(state);
  if (fraction > threshold) {
    std::ostringstream msg;
    msg << context << " is not decayed inside the box: boundary mass fraction "
        << fraction << " exceeds " << threshold;
    throw DomainTruncation(msg.str());
  }
}

// ---- generator ------------------------------------------------------------

GridState apply_generator(const GridState& state, const DriftMatrix& b, DecayGuard guard) {
  const auto& spec = state.spec();
  if (b.dim() != spec.dim()) {
    throw InvalidInput("apply_generator: drift dimension does not match grid");
  }
  if (guard == DecayGuard::kCheck) check_decay(state, kDefaultDecayThreshold, "apply_generator input");
  const int n = spec.dim();
  const int m = spec.points();
  const auto c = raw_forward(state);

  std::vector<Complex> work(c.size());
  int index[3] = {0, 0, 0};
  for (std::size_t k = 0; k < c.size(); ++k) {
    spec.unflatten(k, index);
    double xi2 = 0.0;
    for (int d = 0; d < n; ++d) xi2 += spec.frequency(index[d]) * spec.frequency(index[d]);
    work[k] = -xi2 * c[k];
  }
  std::vector<double> out = raw_backward_real(work, spec);

  if (!b.matrix().isZero(0.0)) {
    std::vector<std::vector<double>> grad(n);
    for (int axis = 0; axis < n; ++axis) {
      for (std::size_t k = 0; k < c.size(); ++k) {
        spec.unflatten(k, index);
        // The Nyquist mode has no consistent real derivative.
        const double xi = index[axis] == m / 2 ? 0.0 : spec.frequency(index[axis]);
        work[k] = Complex(0.0, xi) * c[k];
      }
      grad[axis] = raw_backward_real(work, spec);
    }
    const Matrix& bm = b.matrix();
    double x[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < out.size(); ++i) {
      spec.unflatten(i, index);
      for (int d = 0; d < n; ++d) x[d] = spec.coordinate(index[d]);
      for (int r = 0; r < n; ++r) {
        double bx = 0.0;
        for (int col = 0; col < n; ++col) bx += bm(r, col) * x[col];
        out[i] += bx * grad[r][i];
      }
    }
  }
  return GridState(spec, std::move(out));
}

double graph_norm(const GridState& state, const DriftMatrix& b) {
  const double u = l2_norm(state);
  const double au = l2_norm(apply_generator(state, b));
  return std::sqrt(u * u + au * au);
}

// ---- OUGS1 files ------------------------------------------------------------

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void write_state(std::ostream& out, const GridState& state) {
  const auto& spec = state.spec();
  char header[128];
  std::snprintf(header, sizeof header, "OUGS1 %d %d %.17g\n", spec.dim(),
                spec.points(), spec.half_width());
  out << header;
  for (double v : state.values()) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw InvalidInput("failed to write OUGS1 state");
}

GridState read_state(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("OUGS1: missing header");
  std::istringstream header(line);
  std::string magic;
  int n = 0;
  int m = 0;
  double big_l = 0.0;
  if (!(header >> magic >> n >> m >> big_l) || magic != "OUGS1") {
    throw InvalidInput("OUGS1: malformed header '" + line + "'");
  }
  const GridSpec spec(n, big_l, m);
  std::vector<double> values(spec.size());
  for (double& v : values) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw InvalidInput("OUGS1: truncated payload");
    }
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  return GridState(spec, std::move(values));
}

void save_state(const std::string& path, const GridState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write_state(out, state);
}

GridState load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_state(in);
}

}  // namespace oulab
