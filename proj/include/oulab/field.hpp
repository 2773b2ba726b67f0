#pragma once

// Functions in L^2(R^N) discretized on a truncated, periodized box.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "oulab/grid.hpp"
#include "oulab/linops.hpp"

namespace oulab {

/// Default fraction of squared mass allowed in the outer shell of the box.
inline constexpr double kDefaultDecayThreshold = 1e-6;

/// A real function sampled at the cell centers of a GridSpec.
class GridState {
 public:
  explicit GridState(GridSpec spec);  // zero state
  GridState(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  GridState& operator+=(const GridState& other);
  GridState& operator-=(const GridState& other);
  GridState& operator*=(double alpha);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

GridState operator+(GridState a, const GridState& b);
GridState operator-(GridState a, const GridState& b);
GridState operator*(double alpha, GridState a);

/// Samples f at every cell center; f receives a pointer to N coordinates.
template <typename F>
GridState sample(const GridSpec& spec, F&& f) {
  GridState out(spec);
  int index[3] = {0, 0, 0};
  double x[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.unflatten(i, index);
    for (int d = 0; d < spec.dim(); ++d) x[d] = spec.coordinate(index[d]);
    out[i] = f(static_cast<const double*>(x));
  }
  return out;
}

/// Discrete Fourier coefficients in the unitary convention:
///   fhat_k = (h^N / M^N)^{1/2} e^{-i xi_k . x_0} sum_j f_j e^{-2 pi i j.k / M},
/// so that sum_k |fhat_k|^2 = h^N sum_j f_j^2 and fhat_k approximates
/// (pi/L)^{N/2} times the continuous unitary transform at xi_k. Coefficients
/// are stored in natural FFT order; GridSpec::frequency maps an index to xi.
class SpectralState {
 public:
  SpectralState(GridSpec spec, std::vector<std::complex<double>> coefficients);

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::complex<double>>& coefficients() const { return coeffs_; }
  std::vector<std::complex<double>>& coefficients() { return coeffs_; }

  /// |xi_k|^2 for flat coefficient index k.
  double frequency_norm2(std::size_t k) const;

 private:
  GridSpec spec_;
  std::vector<std::complex<double>> coeffs_;
};

SpectralState transform(const GridState& state);
GridState inverse_transform(const SpectralState& spectrum);

/// sqrt(h^N sum v^2).
double l2_norm(const GridState& state);
/// h^N sum u v.
double inner_product(const GridState& u, const GridState& v);
/// sqrt(sum_k |fhat_k|^2).
double l2_norm(const SpectralState& spectrum);

enum class SobolevWeight {
  kInhomogeneous,  // (1 + |xi|^2)^sigma
  kHomogeneous,    // |xi|^{2 sigma}
};

double sobolev_norm(const GridState& state, double order,
                    SobolevWeight weight = SobolevWeight::kInhomogeneous);

/// Fraction of the squared mass carried by cells with max_i |x_i| >= 0.9 L.
double boundary_mass_fraction(const GridState& state);

/// Whether an operation checks the boundary-decay guard on its input.
/// Solvers skip it for search directions and error states, which are not
/// expected to decay.
enum class DecayGuard { kCheck, kSkip };

/// Throws DomainTruncation if the boundary mass fraction exceeds `threshold`.
void check_decay(const GridState& state, double threshold = kDefaultDecayThreshold,
                 const std::string& context = "state");

/// A u = Delta u + B x . grad u, computed pseudospectrally.
GridState apply_generator(const GridState& state, const DriftMatrix& b,
                          DecayGuard guard = DecayGuard::kCheck);

/// sqrt(||u||^2 + ||A u||^2).
double graph_norm(const GridState& state, const DriftMatrix& b);

/// OUGS1 state files: ASCII header `OUGS1 N M L\n` then M^N little-endian
/// IEEE doubles, row-major.
void write_state(std::ostream& out, const GridState& state);
GridState read_state(std::istream& in);
void save_state(const std::string& path, const GridState& state);
GridState load_state(const std::string& path);

}  // namespace oulab
