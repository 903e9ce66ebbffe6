#pragma once

#include <cstddef>
#include <span>

namespace torpass {

namespace detail {

template <class F>
double pairwise_sum_fn(std::size_t begin, std::size_t end, const F& term) {
  if (end - begin <= 32) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum_fn(begin, mid, term) + pairwise_sum_fn(mid, end, term);
}

}  // namespace detail

/// Deterministic pairwise reduction of term(0..n-1). The summation tree is a
/// fixed function of n, so results are bit-identical regardless of thread
/// count or call site.
template <class F>
double pairwise_sum(std::size_t n, const F& term) {
  if (n == 0) return 0.0;
  return detail::pairwise_sum_fn(0, n, term);
}

inline double pairwise_sum(std::span<const double> x) {
  return pairwise_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

}  // namespace torpass
