#include "oulab/kernels.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fft.hpp"
#include "line_layout.hpp"

namespace oulab::kernels {

namespace {

using Complex = std::complex<double>;
using Real = long double;

constexpr Real kTwoPi = 2 * std::numbers::pi_v<Real>;

Complex unit(Real angle) {
  return std::polar(1.0, static_cast<double>(std::fmod(angle, kTwoPi)));
}

int convolution_length(int m_count) {
  int n = 1;
  while (n < 2 * m_count - 1) n *= 2;
  return n;
}

// e^{i m phi} for m = 0..M-1 from two short tables of directly evaluated
// exponentials, m = kBlock a + b.
constexpr int kBlock = 32;

class PhaseRamp {
 public:
  explicit PhaseRamp(int m_count) : low_(kBlock), high_((m_count + kBlock - 1) / kBlock) {}

  void reset(Real phi) {
    for (int b = 0; b < kBlock; ++b) low_[b] = unit(b * phi);
    for (std::size_t a = 0; a < high_.size(); ++a) high_[a] = unit(static_cast<Real>(a) * kBlock * phi);
  }

  Complex operator[](int m) const { return high_[m / kBlock] * low_[m % kBlock]; }

 private:
  std::vector<Complex> low_;
  std::vector<Complex> high_;
};

// Shared per-pass data for Bluestein's algorithm. With Delta = 2 pi alpha / M,
// the chirp is w(n) = e^{i Delta n^2 / 2} and sum_m a_m e^{i m j Delta} equals
// w(j) * [ (a w) (*) conj(w) ]_j as a linear convolution.
struct ChirpPlan {
  ChirpPlan(const GridSpec& grid, double alpha)
      : m_count(grid.points()),
        n_fft(convolution_length(grid.points())),
        line_fft({grid.points()}),
        conv_fft({convolution_length(grid.points())}) {
    const Real delta = kTwoPi * alpha / m_count;
    const int half = m_count / 2;
    chirp.resize(m_count);
    output.resize(m_count);
    for (int n = 0; n < m_count; ++n) {
      chirp[n] = unit(delta * (static_cast<Real>(n) * n) / 2);
      output[n] = chirp[n] * unit(-half * (n * delta)) / static_cast<double>(m_count);
    }
    kernel_hat.assign(n_fft, Complex(0.0));
    kernel_hat[0] = std::conj(chirp[0]);
    for (int n = 1; n < m_count; ++n) {
      kernel_hat[n] = std::conj(chirp[n]);
      kernel_hat[n_fft - n] = std::conj(chirp[n]);
    }
    conv_fft.forward(kernel_hat);
    const double scale = 1.0 / n_fft;
    for (auto& k : kernel_hat) k *= scale;
  }

  /// buffer[0..M) holds the pre-chirped sequence; on return buffer[0..M)
  /// holds the convolution with conj(w), before the output chirp.
  void convolve(std::vector<Complex>& buffer) const {
    std::fill(buffer.begin() + m_count, buffer.end(), Complex(0.0));
    conv_fft.forward(buffer);
    for (int i = 0; i < n_fft; ++i) buffer[i] *= kernel_hat[i];
    conv_fft.backward(buffer);
  }

  int m_count;
  int n_fft;
  fft::Plan line_fft;
  fft::Plan conv_fft;
  std::vector<Complex> chirp;
  // w(j) e^{-i (M/2) j Delta} / M.
  std::vector<Complex> output;
  std::vector<Complex> kernel_hat;
};

// Phase data for one line: phi_j = phi0 + j Delta with
// phi(y) = pi (y - x0) / L.
struct LinePhase {
  Real phi0;
  Real delta;
};

LinePhase line_phase(const GridSpec& grid, double alpha, double beta) {
  const Real x0 = grid.coordinate(0);
  const Real big_l = grid.half_width();
  const Real phi0 = std::numbers::pi_v<Real> * (alpha * x0 + beta - x0) / big_l;
  return {phi0, kTwoPi * alpha / grid.points()};
}

bool target_inside(const GridSpec& grid, double alpha, double beta, int j) {
  const double y = alpha * grid.coordinate(j) + beta;
  return y >= -grid.half_width() && y < grid.half_width();
}

}  // namespace

void resample_lines(const GridSpec& grid, const LinePass& pass,
                    std::span<const double> in, std::span<double> out) {
  detail::check_pass(grid, pass, in.size(), out.size());
  const detail::LineLayout layout(grid, pass.axis);
  const int m_count = grid.points();
  const int half = m_count / 2;
  const double alpha = pass.coeffs[pass.axis];
  const ChirpPlan plan(grid, alpha);
  const auto lines = static_cast<long>(layout.lines);

#pragma omp parallel
  {
    std::vector<Complex> line(m_count);
    std::vector<Complex> buffer(plan.n_fft);
    PhaseRamp ramp(m_count);
#pragma omp for schedule(static)
    for (long ln = 0; ln < lines; ++ln) {
      const std::size_t base = layout.base(ln);
      const double beta = layout.shift(ln, pass);
      const LinePhase phase = line_phase(grid, alpha, beta);
      for (int l = 0; l < m_count; ++l) line[l] = in[base + l * layout.stride];
      plan.line_fft.forward(line);
      // a_{m'} = c_{m'-M/2} e^{i m' phi0} w(m'), m' = 0..M-1.
      ramp.reset(phase.phi0);
      for (int mp = 0; mp < m_count; ++mp) {
        const int natural = mp < half ? mp + half : mp - half;
        buffer[mp] = line[natural] * ramp[mp] * plan.chirp[mp];
      }
      plan.convolve(buffer);
      const Complex shift = unit(-half * phase.phi0);
      for (int j = 0; j < m_count; ++j) {
        double value = 0.0;
        if (target_inside(grid, alpha, beta, j)) {
          value = (shift * plan.output[j] * buffer[j]).real();
        }
        out[base + j * layout.stride] = value;
      }
    }
  }
}

void resample_lines_adjoint(const GridSpec& grid, const LinePass& pass,
                            std::span<const double> in, std::span<double> out) {
  detail::check_pass(grid, pass, in.size(), out.size());
  const detail::LineLayout layout(grid, pass.axis);
  const int m_count = grid.points();
  const int half = m_count / 2;
  const double alpha = pass.coeffs[pass.axis];
  const ChirpPlan plan(grid, alpha);
  const auto lines = static_cast<long>(layout.lines);

#pragma omp parallel
  {
    std::vector<Complex> line(m_count);
    std::vector<Complex> buffer(plan.n_fft);
    PhaseRamp ramp(m_count);
#pragma omp for schedule(static)
    for (long ln = 0; ln < lines; ++ln) {
      const std::size_t base = layout.base(ln);
      const double beta = layout.shift(ln, pass);
      const LinePhase phase = line_phase(grid, alpha, beta);
      // G_j = g_j e^{-i (M/2) phi_j} w(j) on targets inside the box.
      const Complex shift = unit(-half * phase.phi0) * static_cast<double>(m_count);
      for (int j = 0; j < m_count; ++j) {
        buffer[j] = target_inside(grid, alpha, beta, j)
                        ? in[base + j * layout.stride] * shift * plan.output[j]
                        : Complex(0.0);
      }
      plan.convolve(buffer);
      // b_{m'-M/2} = (1/M) e^{i m' phi0} w(m') conv_{m'}.
      ramp.reset(phase.phi0);
      for (int mp = 0; mp < m_count; ++mp) {
        const int natural = mp < half ? mp + half : mp - half;
        line[natural] = ramp[mp] * plan.chirp[mp] * buffer[mp] / static_cast<double>(m_count);
      }
      plan.line_fft.forward(line);
      for (int l = 0; l < m_count; ++l) out[base + l * layout.stride] = line[l].real();
    }
  }
}

}  // namespace oulab::kernels
