#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace torpass {

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes). Used by the
/// custom-table nonlinearities; preserves monotonicity of the data.
class MonotoneCubic {
public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("MonotoneCubic: abscissae must increase");

    std::vector<double> d(n - 1);  // secant slopes
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    m_.resize(n);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;

    // Fritsch-Carlson limiter.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / d[i];
      const double b = m_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double t = 3.0 / std::sqrt(s);
        m_[i] = t * a * d[i];
        m_[i + 1] = t * b * d[i];
      }
    }
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  /// Value at x, clamped to the table range.
  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

  /// Integral of the interpolant from x_min to x (clamped above at x_max;
  /// constant extension below x_min contributes y_front * (x - x_min) < 0
  /// only when x < x_min, which callers avoid).
  double integral_from_min(double x) const {
    if (x <= x_.front()) return y_.front() * (x - x_.front());
    double acc = 0.0;
    const double xe = std::min(x, x_.back());
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      if (x_[i] >= xe) break;
      const double h = x_[i + 1] - x_[i];
      const double t = std::clamp((xe - x_[i]) / h, 0.0, 1.0);
      acc += h * segment_integral(i, t);
    }
    if (x > x_.back()) acc += y_.back() * (x - x_.back());
    return acc;
  }

private:
  std::size_t segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, x_.size() - 2);
  }

  // Integral of the Hermite basis combination over [0, t], scaled by h.
  double segment_integral(std::size_t i, double t) const {
    const double h = x_[i + 1] - x_[i];
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double H00 = 0.5 * t4 - t3 + t;
    const double H10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
    const double H01 = -0.5 * t4 + t3;
    const double H11 = 0.25 * t4 - t3 / 3.0;
    return H00 * y_[i] + H10 * h * m_[i] + H01 * y_[i + 1] + H11 * h * m_[i + 1];
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace torpass
