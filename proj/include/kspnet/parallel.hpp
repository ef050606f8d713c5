#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace kspnet {

/// Runs body(i) for i in [0, n) on up to `threads` workers with a static
/// round-robin assignment. The first exception thrown is rethrown.
template <typename Body>
void ParallelFor(std::ptrdiff_t n, int threads, Body &&body)
{
  int const workers = int(std::clamp<std::ptrdiff_t>(threads, 1, std::max<std::ptrdiff_t>(n, 1)));
  if (workers == 1) {
    for (std::ptrdiff_t i = 0; i < n; i++) {
      body(i);
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; w++) {
    pool.emplace_back([&, w] {
      try {
        for (std::ptrdiff_t i = w; i < n; i += workers) {
          body(i);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) {
    std::rethrow_exception(error);
  }
}

/// Elementwise sum of equally sized vectors by a fixed pairwise tree, so the
/// result does not depend on how the terms were produced.
inline std::vector<double> PairwiseSum(std::vector<std::vector<double>> terms)
{
  if (terms.empty()) {
    return {};
  }
  for (size_t stride = 1; stride < terms.size(); stride *= 2) {
    for (size_t i = 0; i + stride < terms.size(); i += 2 * stride) {
      auto &dst = terms[i];
      auto const &src = terms[i + stride];
      for (size_t j = 0; j < dst.size(); j++) {
        dst[j] += src[j];
      }
    }
  }
  return std::move(terms.front());
}

inline double PairwiseSum(std::span<double const> v)
{
  if (v.empty()) {
    return 0.0;
  }
  if (v.size() == 1) {
    return v[0];
  }
  size_t const half = v.size() / 2;
  return PairwiseSum(v.first(half)) + PairwiseSum(v.subspan(half));
}

} // namespace kspnet
