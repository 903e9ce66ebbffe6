#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>
#include <numbers>
#include <vector>

namespace torpass {

/// Rank-N real FFT pair on a periodic grid, used to apply Fourier multipliers
/// (the flat-torus Laplacian and constant-coefficient Helmholtz inverses).
///
/// Plans are created once with FFTW_ESTIMATE on owned buffers; execution
/// copies through those buffers under a mutex, which keeps the engine
/// shareable between threads and the transforms deterministic.
class SpectralEngine {
public:
  SpectralEngine(const std::vector<int>& points_per_axis,
                 const std::vector<double>& lengths)
      : n_(points_per_axis) {
    const int rank = static_cast<int>(n_.size());
    nreal_ = 1;
    for (int c : n_) nreal_ *= static_cast<std::size_t>(c);
    nspec_ = nreal_ / static_cast<std::size_t>(n_.back()) *
             static_cast<std::size_t>(n_.back() / 2 + 1);

    rbuf_ = fftw_alloc_real(nreal_);
    cbuf_ = fftw_alloc_complex(nspec_);
    fwd_ = fftw_plan_dft_r2c(rank, n_.data(), rbuf_, cbuf_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(rank, n_.data(), cbuf_, rbuf_, FFTW_ESTIMATE);

    // |k|^2 over the half-complex spectrum, with k_i = 2*pi*m_i / L_i and
    // m_i the signed integer frequency.
    k2_.resize(nspec_);
    std::vector<int> idx(n_.size(), 0);
    const int last = rank - 1;
    for (std::size_t j = 0; j < nspec_; ++j) {
      double k2 = 0.0;
      for (int a = 0; a < rank; ++a) {
        int m = idx[a];
        if (m > n_[a] / 2) m -= n_[a];
        const double k = 2.0 * std::numbers::pi * m / lengths[a];
        k2 += k * k;
      }
      k2_[j] = k2;
      for (int a = last; a >= 0; --a) {
        const int limit = (a == last) ? n_[a] / 2 + 1 : n_[a];
        if (++idx[a] < limit) break;
        idx[a] = 0;
      }
    }
  }

  ~SpectralEngine() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(rbuf_);
    fftw_free(cbuf_);
  }

  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  std::size_t real_size() const { return nreal_; }
  std::size_t spectrum_size() const { return nspec_; }

  /// Squared wavenumber per spectrum bin.
  const std::vector<double>& k_squared() const { return k2_; }

  /// out = F^{-1}[ mult .* F[in] ]; mult indexes the half-complex spectrum.
  /// in and out may alias.
  void apply_multiplier(const double* in, double* out,
                        const double* mult) const {
    std::lock_guard<std::mutex> lock(mu_);
    const double inv_n = 1.0 / static_cast<double>(nreal_);
    for (std::size_t i = 0; i < nreal_; ++i) rbuf_[i] = in[i];
    fftw_execute(fwd_);
    for (std::size_t j = 0; j < nspec_; ++j) {
      const double m = mult[j] * inv_n;
      cbuf_[j][0] *= m;
      cbuf_[j][1] *= m;
    }
    fftw_execute(bwd_);
    for (std::size_t i = 0; i < nreal_; ++i) out[i] = rbuf_[i];
  }

private:
  std::vector<int> n_;
  std::size_t nreal_ = 0;
  std::size_t nspec_ = 0;
  double* rbuf_ = nullptr;
  fftw_complex* cbuf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::vector<double> k2_;
  mutable std::mutex mu_;
};

}  // namespace torpass
