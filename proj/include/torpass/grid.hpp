#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torpass/errors.hpp"
#include "torpass/reduce.hpp"
#include "torpass/spectral.hpp"

namespace torpass {

/// Discrete closed flat torus T^N = prod R/(L_i Z), optionally rescaled by a
/// conformal factor g = e^{2 phi_c} * delta. Immutable after construction;
/// all operations on it are pure.
///
/// Nodes live at x_i = i * L/n per axis; the linear index is row-major with
/// the last axis fastest.
struct ManifoldGrid {
  int dim = 0;
  std::vector<int> points_per_axis;
  std::vector<double> lengths;
  std::vector<double> conformal_log_factor;  // empty == flat metric
  std::vector<double> volume_weights;        // cell volume x metric density
  double total_volume = 0.0;
  std::shared_ptr<const SpectralEngine> spectral;  // set for every grid

  bool flat() const { return conformal_log_factor.empty(); }

  std::size_t node_count() const { return volume_weights.size(); }

  double axis_spacing(int axis) const {
    return lengths[axis] / points_per_axis[axis];
  }

  /// Flat cell volume prod(L_i / n_i).
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= axis_spacing(a);
    return v;
  }

  void to_multi_index(std::size_t lin, std::vector<int>& idx) const {
    idx.resize(dim);
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(lin % points_per_axis[a]);
      lin /= points_per_axis[a];
    }
  }

  std::size_t to_linear(const std::vector<int>& idx) const {
    std::size_t lin = 0;
    for (int a = 0; a < dim; ++a)
      lin = lin * points_per_axis[a] + static_cast<std::size_t>(idx[a]);
    return lin;
  }

  /// Coordinate of node `lin` along `axis`.
  double coordinate(std::size_t lin, int axis) const {
    std::size_t stride = 1;
    for (int a = dim - 1; a > axis; --a) stride *= points_per_axis[a];
    const std::size_t i = (lin / stride) % points_per_axis[axis];
    return static_cast<double>(i) * axis_spacing(axis);
  }
};

/// Real-valued function sampled on a ManifoldGrid.
struct Field {
  const ManifoldGrid* grid = nullptr;
  std::vector<double> values;
};

inline Field make_field(const ManifoldGrid& grid, double fill = 0.0) {
  return Field{&grid, std::vector<double>(grid.node_count(), fill)};
}

inline Field make_field(const ManifoldGrid& grid, std::vector<double> values) {
  if (values.size() != grid.node_count())
    throw std::invalid_argument("Field: value count does not match grid");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("Field: values must be finite");
  return Field{&grid, std::move(values)};
}

template <class F>
Field make_field_from(const ManifoldGrid& grid, const F& fn) {
  Field u = make_field(grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = fn(i);
  return u;
}

inline void require_on_grid(const ManifoldGrid& grid, const Field& u,
                            const char* op) {
  if (u.grid != &grid || u.values.size() != grid.node_count())
    throw std::invalid_argument(std::string(op) + ": field/grid mismatch");
}

/// Build a discrete torus. `conformal_log_factor`, when given, holds
/// phi_c per node (row-major) and the metric is g = e^{2 phi_c} * delta:
/// volume weights become cell volume x e^{N phi_c} (midpoint quadrature,
/// second-order accurate).
inline ManifoldGrid build_torus(
    int dim, const std::vector<int>& points_per_axis,
    const std::vector<double>& lengths,
    const std::optional<std::vector<double>>& conformal_log_factor =
        std::nullopt) {
  if (dim < 3)
    throw std::invalid_argument(
        "build_torus: dimension must be >= 3 (critical exponent 2N/(N-2) "
        "must be finite)");
  if (static_cast<int>(points_per_axis.size()) != dim ||
      static_cast<int>(lengths.size()) != dim)
    throw std::invalid_argument(
        "build_torus: points_per_axis and lengths must have `dim` entries");
  for (int c : points_per_axis) {
    if (c < 4)
      throw std::invalid_argument("build_torus: need >= 4 nodes per axis");
    if (c % 2 != 0)
      throw std::invalid_argument(
          "build_torus: node count per axis must be even (spectral Nyquist "
          "handling)");
  }
  for (double l : lengths)
    if (!(l > 0.0))
      throw std::domain_error("build_torus: torus periods must be positive");

  ManifoldGrid g;
  g.dim = dim;
  g.points_per_axis = points_per_axis;
  g.lengths = lengths;

  std::size_t count = 1;
  for (int c : points_per_axis) count *= static_cast<std::size_t>(c);

  const double cell = [&] {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= lengths[a] / points_per_axis[a];
    return v;
  }();

  if (conformal_log_factor) {
    if (conformal_log_factor->size() != count)
      throw std::invalid_argument(
          "build_torus: conformal_log_factor size does not match node count");
    for (double p : *conformal_log_factor)
      if (!std::isfinite(p))
        throw std::invalid_argument(
            "build_torus: conformal_log_factor must be finite");
    g.conformal_log_factor = *conformal_log_factor;
    g.volume_weights.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      g.volume_weights[i] = cell * std::exp(dim * g.conformal_log_factor[i]);
  } else {
    g.volume_weights.assign(count, cell);
  }
  g.total_volume = pairwise_sum(g.volume_weights);
  g.spectral = std::make_shared<SpectralEngine>(points_per_axis, lengths);
  return g;
}

/// Integral over (M, g): sum of values x volume weights, pairwise-summed.
inline double integrate(const ManifoldGrid& grid, const Field& u) {
  require_on_grid(grid, u, "integrate");
  return pairwise_sum(grid.node_count(), [&](std::size_t i) {
    return u.values[i] * grid.volume_weights[i];
  });
}

namespace detail {

/// Flat-torus Laplacian: exact Fourier multiplier -|k|^2.
inline void laplacian_flat(const ManifoldGrid& grid,
                           const std::vector<double>& in,
                           std::vector<double>& out) {
  const auto& k2 = grid.spectral->k_squared();
  std::vector<double> mult(k2.size());
  for (std::size_t j = 0; j < k2.size(); ++j) mult[j] = -k2[j];
  out.resize(in.size());
  grid.spectral->apply_multiplier(in.data(), out.data(), mult.data());
}

/// Conformal-metric Laplace-Beltrami in flux form,
///   Delta_g u = e^{-N phi} div( e^{(N-2) phi} grad u ),
/// discretized with centered fluxes and face coefficients
/// e^{(N-2)(phi_i+phi_j)/2}. Equals e^{-2phi}(Delta u + (N-2) grad phi .
/// grad u) to second order and is exactly self-adjoint in L^2(dv_g).
inline void laplacian_conformal(const ManifoldGrid& grid,
                                const std::vector<double>& in,
                                std::vector<double>& out) {
  const int dim = grid.dim;
  const std::size_t n = grid.node_count();
  const auto& phi = grid.conformal_log_factor;
  out.assign(n, 0.0);

  std::vector<std::size_t> stride(dim);
  {
    std::size_t s = 1;
    for (int a = dim - 1; a >= 0; --a) {
      stride[a] = s;
      s *= grid.points_per_axis[a];
    }
  }

  std::vector<int> idx(dim);
  for (std::size_t i = 0; i < n; ++i) {
    grid.to_multi_index(i, idx);
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const int na = grid.points_per_axis[a];
      const double inv_h2 = 1.0 / (grid.axis_spacing(a) * grid.axis_spacing(a));
      const std::size_t up =
          (idx[a] + 1 < na) ? i + stride[a] : i + stride[a] - stride[a] * na;
      const std::size_t dn =
          (idx[a] > 0) ? i - stride[a] : i - stride[a] + stride[a] * na;
      const double c = (dim - 2) * 0.5;
      const double a_up = std::exp(c * (phi[i] + phi[up]));
      const double a_dn = std::exp(c * (phi[i] + phi[dn]));
      acc += (a_up * (in[up] - in[i]) - a_dn * (in[i] - in[dn])) * inv_h2;
    }
    out[i] = acc * std::exp(-dim * phi[i]);
  }
}

}  // namespace detail

/// Laplace-Beltrami operator. Flat grids use the trigonometric-spectral
/// multiplier (plane waves are exact eigenfunctions); conformal grids use the
/// second-order flux stencil.
inline Field laplace_beltrami(const ManifoldGrid& grid, const Field& u) {
  require_on_grid(grid, u, "laplace_beltrami");
  Field out = make_field(grid);
  if (grid.flat())
    detail::laplacian_flat(grid, u.values, out.values);
  else
    detail::laplacian_conformal(grid, u.values, out.values);
  return out;
}

/// H^1 inner product <u, v> = int grad u . grad v + V u v dv_g, with the
/// gradient pairing realized as -int u Delta_g v dv_g (exact under both
/// discretizations).
inline double h1_inner(const ManifoldGrid& grid, const Field& V,
                       const Field& u, const Field& v) {
  require_on_grid(grid, V, "h1_inner");
  require_on_grid(grid, u, "h1_inner");
  require_on_grid(grid, v, "h1_inner");
  const Field lap_v = laplace_beltrami(grid, v);
  return pairwise_sum(grid.node_count(), [&](std::size_t i) {
    return (-lap_v.values[i] + V.values[i] * v.values[i]) * u.values[i] *
           grid.volume_weights[i];
  });
}

/// Squared H^1 norm, int |grad u|^2 + V u^2 dv_g. Requires hypothesis (V)
/// (positivity of -Delta_g + V); a negative value beyond round-off reports a
/// (V) violation on this grid.
inline double h1_norm_sq(const ManifoldGrid& grid, const Field& V,
                         const Field& u) {
  const double s = h1_inner(grid, V, u, u);
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.node_count(); ++i)
    scale = std::max(scale, std::abs(u.values[i]));
  if (s < -1e-12 * (1.0 + scale * scale) * (1.0 + grid.total_volume))
    throw NumericalError(
        "h1_norm_sq: negative norm; hypothesis (V) violated on this grid");
  return std::max(s, 0.0);
}

inline double h1_norm(const ManifoldGrid& grid, const Field& V,
                      const Field& u) {
  return std::sqrt(h1_norm_sq(grid, V, u));
}

/// L^p(dv_g) norm, p >= 1.
inline double lp_norm(const ManifoldGrid& grid, const Field& u, double p) {
  require_on_grid(grid, u, "lp_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: need p >= 1");
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  // Scale out the max to keep the p-th powers in range for large p.
  const double s = pairwise_sum(grid.node_count(), [&](std::size_t i) {
    return std::pow(std::abs(u.values[i]) / m, p) * grid.volume_weights[i];
  });
  return m * std::pow(s, 1.0 / p);
}

/// L^2(dv_g) inner product.
inline double l2_inner(const ManifoldGrid& grid, const Field& u,
                       const Field& v) {
  require_on_grid(grid, u, "l2_inner");
  require_on_grid(grid, v, "l2_inner");
  return pairwise_sum(grid.node_count(), [&](std::size_t i) {
    return u.values[i] * v.values[i] * grid.volume_weights[i];
  });
}

/// Critical Sobolev exponent 2N/(N-2).
inline double critical_exponent(int dim) {
  return 2.0 * dim / (dim - 2.0);
}

// -- small field arithmetic helpers used throughout the solvers -------------

inline Field axpy(double a, const Field& x, const Field& y) {
  Field r{x.grid, y.values};
  for (std::size_t i = 0; i < r.values.size(); ++i)
    r.values[i] += a * x.values[i];
  return r;
}

inline void scale_in_place(Field& u, double a) {
  for (double& v : u.values) v *= a;
}

inline Field scaled(const Field& u, double a) {
  Field r = u;
  scale_in_place(r, a);
  return r;
}

}  // namespace torpass
