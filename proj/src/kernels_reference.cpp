#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "line_layout.hpp"
#include "oulab/kernels.hpp"

namespace oulab::kernels::reference {

namespace {

using Complex = std::complex<double>;

// Direct DFT coefficients c_m = sum_l v_l e^{-2 pi i l m / M}, natural order.
std::vector<Complex> direct_dft(const std::vector<double>& v) {
  const int m_count = static_cast<int>(v.size());
  std::vector<Complex> c(m_count);
  for (int m = 0; m < m_count; ++m) {
    Complex acc = 0.0;
    for (int l = 0; l < m_count; ++l) {
      const long long lm = (static_cast<long long>(l) * m) % m_count;
      acc += v[l] * std::polar(1.0, -2.0 * std::numbers::pi * lm / m_count);
    }
    c[m] = acc;
  }
  return c;
}

}  // namespace

void resample_lines(const GridSpec& grid, const LinePass& pass,
                    std::span<const double> in, std::span<double> out) {
  detail::check_pass(grid, pass, in.size(), out.size());
  const detail::LineLayout layout(grid, pass.axis);
  const int m_count = grid.points();
  const double big_l = grid.half_width();
  const double x0 = grid.coordinate(0);
  const double alpha = pass.coeffs[pass.axis];
  std::vector<double> line(m_count);
  for (std::size_t ln = 0; ln < layout.lines; ++ln) {
    const std::size_t base = layout.base(ln);
    const double beta = layout.shift(ln, pass);
    for (int l = 0; l < m_count; ++l) line[l] = in[base + l * layout.stride];
    const auto c = direct_dft(line);
    for (int j = 0; j < m_count; ++j) {
      const double y = alpha * grid.coordinate(j) + beta;
      double value = 0.0;
      if (y >= -big_l && y < big_l) {
        const long double phi = std::numbers::pi_v<long double> * (y - x0) / big_l;
        Complex acc = 0.0;
        for (int m = 0; m < m_count; ++m) {
          const int mc = grid.centered_index(m);
          acc += c[m] * std::polar(1.0, static_cast<double>(std::fmod(
                                            mc * phi, 2 * std::numbers::pi_v<long double>)));
        }
        value = acc.real() / m_count;
      }
      out[base + j * layout.stride] = value;
    }
  }
}

void resample_lines_adjoint(const GridSpec& grid, const LinePass& pass,
                            std::span<const double> in, std::span<double> out) {
  detail::check_pass(grid, pass, in.size(), out.size());
  const detail::LineLayout layout(grid, pass.axis);
  const int m_count = grid.points();
  const double big_l = grid.half_width();
  const double x0 = grid.coordinate(0);
  const double alpha = pass.coeffs[pass.axis];
  std::vector<Complex> a(m_count);
  for (std::size_t ln = 0; ln < layout.lines; ++ln) {
    const std::size_t base = layout.base(ln);
    const double beta = layout.shift(ln, pass);
    std::fill(a.begin(), a.end(), Complex(0.0));
    for (int j = 0; j < m_count; ++j) {
      const double y = alpha * grid.coordinate(j) + beta;
      if (!(y >= -big_l && y < big_l)) continue;
      const double g = in[base + j * layout.stride];
      const long double phi = std::numbers::pi_v<long double> * (y - x0) / big_l;
      for (int m = 0; m < m_count; ++m) {
        const int mc = grid.centered_index(m);
        a[m] += g * std::polar(1.0, static_cast<double>(std::fmod(
                                        mc * phi, 2 * std::numbers::pi_v<long double>)));
      }
    }
    for (int l = 0; l < m_count; ++l) {
      Complex acc = 0.0;
      for (int m = 0; m < m_count; ++m) {
        const long long lm = (static_cast<long long>(l) * m) % m_count;
        acc += a[m] * std::polar(1.0, -2.0 * std::numbers::pi * lm / m_count);
      }
      out[base + l * layout.stride] = acc.real() / m_count;
    }
  }
}

}  // namespace oulab::kernels::reference
