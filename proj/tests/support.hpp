#pragma once

#include "kspnet/ctensor.hpp"
#include "kspnet/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

namespace kspnet::testing {

inline ComplexTensor RandomTensor(Dims4 d, Domain domain, std::uint64_t seed)
{
  Rng rng(seed);
  std::normal_distribution<double> g;
  ComplexTensor t(d, domain);
  for (auto &z : t.data()) {
    double const re = g(rng);
    z = Cx(re, g(rng));
  }
  return t;
}

inline double MaxAbsDiff(std::span<Cx const> a, std::span<Cx const> b)
{
  double m = 0.0;
  for (size_t i = 0; i < a.size(); i++) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

inline double RelativeError(std::span<Cx const> estimate, std::span<Cx const> truth)
{
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < truth.size(); i++) {
    num += std::norm(estimate[i] - truth[i]);
    den += std::norm(truth[i]);
  }
  return std::sqrt(num / den);
}

// Direct centered DFT of one plane: X[k] = sum_y x[y] exp(-+2 pi i (k - c)(y - c) / N) / sqrt(HW).
inline std::vector<Cx> DirectDft(std::span<Cx const> x, Index h, Index w, bool inverse)
{
  double const sign = inverse ? 1.0 : -1.0;
  Index const ch = h / 2, cw = w / 2;
  std::vector<Cx> out(size_t(h * w));
  for (Index ky = 0; ky < h; ky++) {
    for (Index kx = 0; kx < w; kx++) {
      Cx acc = 0.0;
      for (Index y = 0; y < h; y++) {
        for (Index xx = 0; xx < w; xx++) {
          double const ang = sign * 2.0 * std::numbers::pi *
            (double((ky - ch) * (y - ch)) / double(h) + double((kx - cw) * (xx - cw)) / double(w));
          acc += x[size_t(y * w + xx)] * Cx(std::cos(ang), std::sin(ang));
        }
      }
      out[size_t(ky * w + kx)] = acc / std::sqrt(double(h * w));
    }
  }
  return out;
}

// Eigenvalues (descending) of a Hermitian matrix via cyclic Jacobi on its real
// 2n x 2n embedding [[Re, -Im], [Im, Re]], whose spectrum is each eigenvalue twice.
inline std::vector<double> HermitianEigenvalues(std::vector<Cx> const &g, Index n)
{
  Index const m = 2 * n;
  std::vector<double> a(size_t(m * m));
  auto A = [&](Index i, Index j) -> double & { return a[size_t(i * m + j)]; };
  for (Index i = 0; i < n; i++) {
    for (Index j = 0; j < n; j++) {
      Cx const z = g[size_t(i * n + j)];
      A(i, j) = z.real();
      A(i + n, j + n) = z.real();
      A(i, j + n) = -z.imag();
      A(i + n, j) = z.imag();
    }
  }
  for (int sweep = 0; sweep < 100; sweep++) {
    double off = 0.0, diag = 0.0;
    for (Index i = 0; i < m; i++) {
      diag += A(i, i) * A(i, i);
      for (Index j = 0; j < m; j++) {
        if (i != j) {
          off += A(i, j) * A(i, j);
        }
      }
    }
    if (off <= 1e-32 * diag) {
      break;
    }
    for (Index p = 0; p < m; p++) {
      for (Index q = p + 1; q < m; q++) {
        if (A(p, q) == 0.0) {
          continue;
        }
        double const theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double const t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double const c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Index k = 0; k < m; k++) {
          double const akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < m; k++) {
          double const apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev;
  for (Index i = 0; i < m; i++) {
    ev.push_back(A(i, i));
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  std::vector<double> out;
  for (Index i = 0; i < m; i += 2) {
    out.push_back(ev[size_t(i)]);
  }
  return out;
}

// Gram matrix M^H M of the (H*W) x coil sample matrix of a single-average tensor.
inline std::vector<Cx> CoilGram(ComplexTensor const &k)
{
  Index const nc = k.n_coil();
  std::vector<Cx> g(size_t(nc * nc));
  for (Index i = 0; i < nc; i++) {
    for (Index j = 0; j < nc; j++) {
      Cx acc = 0.0;
      auto const a = k.plane(0, i), b = k.plane(0, j);
      for (size_t p = 0; p < a.size(); p++) {
        acc += std::conj(a[p]) * b[p];
      }
      g[size_t(i * nc + j)] = acc;
    }
  }
  return g;
}

// Pairwise AUROC: (2 #{s+ > s-} + #{s+ = s-}) / (2 P N).
inline double PairwiseAuroc(std::vector<double> const &s, std::vector<int> const &l)
{
  long long twice = 0, pos = 0, neg = 0;
  for (size_t i = 0; i < s.size(); i++) {
    (l[i] ? pos : neg)++;
    for (size_t j = 0; j < s.size(); j++) {
      if (l[i] == 1 && l[j] == 0) {
        twice += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
      }
    }
  }
  return double(twice) / (2.0 * double(pos) * double(neg));
}

// Average precision by enumerating every distinct threshold and recounting.
inline double EnumeratedAuprc(std::vector<double> const &s, std::vector<int> const &l)
{
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  long long pos = std::count(l.begin(), l.end(), 1);
  double ap = 0.0;
  long long prev_tp = 0;
  for (double t : thresholds) {
    long long tp = 0, fp = 0;
    for (size_t i = 0; i < s.size(); i++) {
      if (s[i] >= t) {
        (l[i] ? tp : fp)++;
      }
    }
    ap += (double(tp - prev_tp) / double(pos)) * (double(tp) / double(tp + fp));
    prev_tp = tp;
  }
  return ap;
}

// Multi-coil k-space obeying an exact GRAPPA relation: coil c is a unitary mix of
// eight copies of one random field, copy q shifted down q rows and b_q in {-1,0,1}
// columns. Every row block of eight consecutive rows is then a linear function of
// any other, so an exact interpolation kernel exists for R <= 4 with 4x5 taps.
// The field is zero in a border so zero-filled neighbors are exact.
inline ComplexTensor PlantedKSpace(Index n, Index n_coil, std::uint64_t seed)
{
  Index const copies = 8;
  Rng rng(seed);
  std::normal_distribution<double> g;
  auto gauss = [&] {
    double const re = g(rng);
    return Cx(re, g(rng));
  };
  std::vector<Cx> field(size_t(n * n));
  for (Index y = 2; y < n - copies - 2; y++) {
    for (Index x = 2; x < n - 2; x++) {
      field[size_t(y * n + x)] = gauss();
    }
  }
  // Unitary mixing by Gram-Schmidt on a random complex matrix.
  std::vector<std::vector<Cx>> mix(static_cast<size_t>(n_coil), std::vector<Cx>(static_cast<size_t>(copies)));
  for (Index c = 0; c < n_coil; c++) {
    for (auto &z : mix[size_t(c)]) {
      z = gauss();
    }
    for (Index p = 0; p < c && p < copies; p++) {
      Cx dot = 0.0;
      for (Index q = 0; q < copies; q++) {
        dot += std::conj(mix[size_t(p)][size_t(q)]) * mix[size_t(c)][size_t(q)];
      }
      for (Index q = 0; q < copies; q++) {
        mix[size_t(c)][size_t(q)] -= dot * mix[size_t(p)][size_t(q)];
      }
    }
    double norm = 0.0;
    for (auto const &z : mix[size_t(c)]) {
      norm += std::norm(z);
    }
    for (auto &z : mix[size_t(c)]) {
      z /= std::sqrt(norm);
    }
  }
  std::uniform_int_distribution<int> shift(-1, 1);
  std::vector<Index> col_shift(static_cast<size_t>(copies));
  for (auto &b : col_shift) {
    b = shift(rng);
  }
  ComplexTensor k({1, n_coil, n, n}, Domain::KSpace);
  for (Index c = 0; c < n_coil; c++) {
    for (Index y = 0; y < n; y++) {
      for (Index x = 0; x < n; x++) {
        Cx acc = 0.0;
        for (Index q = 0; q < copies; q++) {
          Index const sy = y - q, sx = x - col_shift[size_t(q)];
          if (sy >= 0 && sy < n && sx >= 0 && sx < n) {
            acc += mix[size_t(c)][size_t(q)] * field[size_t(sy * n + sx)];
          }
        }
        k(0, c, y, x) = acc;
      }
    }
  }
  return k;
}

} // namespace kspnet::testing
