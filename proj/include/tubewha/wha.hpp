#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "types.hpp"

namespace tubewha {

using SpMat = Eigen::SparseMatrix<cplx>;

struct Triplet3 {
  int i, j, k;
  cplx v;
};

// T[i][j][k] stored grouped by i, sorted by (j, k).
struct SparseTensor3 {
  int dim = 0;
  std::vector<size_t> ptr;
  std::vector<int> j, k;
  std::vector<cplx> v;

  size_t nnz() const { return v.size(); }

  static SparseTensor3 from_triplets(int dim, std::vector<Triplet3> t, double drop = 1e-14) {
    std::sort(t.begin(), t.end(), [](const Triplet3& x, const Triplet3& y) {
      if (x.i != y.i) return x.i < y.i;
      if (x.j != y.j) return x.j < y.j;
      return x.k < y.k;
    });
    SparseTensor3 out;
    out.dim = dim;
    out.ptr.assign(size_t(dim) + 1, 0);
    size_t n = 0;
    for (size_t a = 0; a < t.size();) {
      size_t b = a;
      cplx s = 0.0;
      while (b < t.size() && t[b].i == t[a].i && t[b].j == t[a].j && t[b].k == t[a].k) s += t[b++].v;
      if (std::abs(s) >= drop) {
        out.j.push_back(t[a].j);
        out.k.push_back(t[a].k);
        out.v.push_back(s);
        ++out.ptr[size_t(t[a].i) + 1];
        ++n;
      }
      a = b;
    }
    for (int i = 0; i < dim; ++i) out.ptr[size_t(i) + 1] += out.ptr[size_t(i)];
    return out;
  }

  // Entries [begin, end) of row i whose second index equals jj.
  std::pair<size_t, size_t> range(int i, int jj) const {
    auto b = j.begin() + std::ptrdiff_t(ptr[size_t(i)]);
    auto e = j.begin() + std::ptrdiff_t(ptr[size_t(i) + 1]);
    auto lo = std::lower_bound(b, e, jj);
    auto hi = std::upper_bound(lo, e, jj);
    return {size_t(lo - j.begin()), size_t(hi - j.begin())};
  }

  std::vector<Triplet3> triplets() const {
    std::vector<Triplet3> t;
    t.reserve(nnz());
    for (int i = 0; i < dim; ++i)
      for (size_t p = ptr[size_t(i)]; p < ptr[size_t(i) + 1]; ++p) t.push_back({i, j[p], k[p], v[p]});
    return t;
  }

  // out[x0][x1][x2] = this[y0][y1][y2] where x_m = y_{perm[m]}.
  SparseTensor3 permuted(std::array<int, 3> perm) const {
    std::vector<Triplet3> t;
    t.reserve(nnz());
    for (int i = 0; i < dim; ++i)
      for (size_t p = ptr[size_t(i)]; p < ptr[size_t(i) + 1]; ++p) {
        std::array<int, 3> y{i, j[p], k[p]};
        t.push_back({y[size_t(perm[0])], y[size_t(perm[1])], y[size_t(perm[2])], v[p]});
      }
    return from_triplets(dim, std::move(t), 0.0);
  }

  double max_abs_diff(const SparseTensor3& o) const {
    std::unordered_map<uint64_t, cplx> m;
    auto key = [this](int a, int b, int c) { return (uint64_t(a) * dim + uint64_t(b)) * dim + uint64_t(c); };
    for (const auto& t : triplets()) m[key(t.i, t.j, t.k)] += t.v;
    for (const auto& t : o.triplets()) m[key(t.i, t.j, t.k)] -= t.v;
    double w = 0.0;
    for (const auto& kv : m) w = std::max(w, std::abs(kv.second));
    return w;
  }
};

// A finite-dimensional weak Hopf algebra given by structure constants in a
// fixed basis {x_i}.
//   mult:     x_i x_j = sum_k mult[i][j][k] x_k
//   comult:   Delta(x_i) = sum_{j,k} comult[i][j][k] x_j (x) x_k
//   antipode: column i holds S(x_i)
struct WeakHopfAlgebra {
  std::string name;
  int dim = 0;
  SparseTensor3 mult;
  SparseTensor3 comult;
  VecC unit;
  VecC counit;
  SpMat antipode;
  VecC haar;       // lambda, empty when unknown
  VecC haar_dual;  // Lambda in the dual basis, empty when unknown
  std::vector<std::string> basis_names;
};

// Sparse element of A (x) A, key i*dim + j.
using Sparse2 = std::unordered_map<uint64_t, cplx>;
// Sparse element of A (x) A (x) A, key (i*dim + j)*dim + k.
using Sparse3 = std::unordered_map<uint64_t, cplx>;

inline VecC basis_vector(int dim, int i) {
  VecC v = VecC::Zero(dim);
  v[i] = 1.0;
  return v;
}

// out += c * x_i x_j
inline void add_basis_product(const WeakHopfAlgebra& W, int i, int jj, cplx c, VecC& out) {
  auto [lo, hi] = W.mult.range(i, jj);
  for (size_t p = lo; p < hi; ++p) out[W.mult.k[p]] += c * W.mult.v[p];
}

inline VecC multiply(const WeakHopfAlgebra& W, const VecC& x, const VecC& y) {
  VecC out = VecC::Zero(W.dim);
  for (int i = 0; i < W.dim; ++i) {
    if (x[i] == cplx(0.0)) continue;
    for (size_t p = W.mult.ptr[size_t(i)]; p < W.mult.ptr[size_t(i) + 1]; ++p) {
      cplx yj = y[W.mult.j[p]];
      if (yj != cplx(0.0)) out[W.mult.k[p]] += x[i] * yj * W.mult.v[p];
    }
  }
  return out;
}

// Matrix of h -> x h.
inline SpMat left_mult_matrix(const WeakHopfAlgebra& W, const VecC& x) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < W.dim; ++i) {
    if (x[i] == cplx(0.0)) continue;
    for (size_t p = W.mult.ptr[size_t(i)]; p < W.mult.ptr[size_t(i) + 1]; ++p)
      t.emplace_back(W.mult.k[p], W.mult.j[p], x[i] * W.mult.v[p]);
  }
  SpMat m(W.dim, W.dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Matrix of h -> h x.
inline SpMat right_mult_matrix(const WeakHopfAlgebra& W, const VecC& x) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < W.dim; ++i)
    for (size_t p = W.mult.ptr[size_t(i)]; p < W.mult.ptr[size_t(i) + 1]; ++p) {
      cplx xj = x[W.mult.j[p]];
      if (xj != cplx(0.0)) t.emplace_back(W.mult.k[p], i, xj * W.mult.v[p]);
    }
  SpMat m(W.dim, W.dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline Sparse2 comultiply(const WeakHopfAlgebra& W, const VecC& x) {
  Sparse2 out;
  const uint64_t n = uint64_t(W.dim);
  for (int i = 0; i < W.dim; ++i) {
    if (x[i] == cplx(0.0)) continue;
    for (size_t p = W.comult.ptr[size_t(i)]; p < W.comult.ptr[size_t(i) + 1]; ++p)
      out[uint64_t(W.comult.j[p]) * n + uint64_t(W.comult.k[p])] += x[i] * W.comult.v[p];
  }
  return out;
}

// Dense (dim x dim) form of Delta(x): D(j,k) = coefficient of x_j (x) x_k.
inline MatC comultiply_dense(const WeakHopfAlgebra& W, const VecC& x) {
  MatC D = MatC::Zero(W.dim, W.dim);
  for (int i = 0; i < W.dim; ++i) {
    if (x[i] == cplx(0.0)) continue;
    for (size_t p = W.comult.ptr[size_t(i)]; p < W.comult.ptr[size_t(i) + 1]; ++p)
      D(W.comult.j[p], W.comult.k[p]) += x[i] * W.comult.v[p];
  }
  return D;
}

inline cplx counit(const WeakHopfAlgebra& W, const VecC& x) { return (W.counit.transpose() * x)(0); }

inline VecC antipode(const WeakHopfAlgebra& W, const VecC& x) { return W.antipode * x; }

// (Delta (x) id) Delta(x), key (i*dim + j)*dim + k.
inline Sparse3 comultiply2(const WeakHopfAlgebra& W, const VecC& x) {
  Sparse3 out;
  const uint64_t n = uint64_t(W.dim);
  Sparse2 d = comultiply(W, x);
  for (const auto& [key, c] : d) {
    int p = int(key / n), q = int(key % n);
    for (size_t s = W.comult.ptr[size_t(p)]; s < W.comult.ptr[size_t(p) + 1]; ++s)
      out[(uint64_t(W.comult.j[s]) * n + uint64_t(W.comult.k[s])) * n + uint64_t(q)] += c * W.comult.v[s];
  }
  return out;
}

template <class Map>
double max_abs(const Map& m) {
  double w = 0.0;
  for (const auto& kv : m) w = std::max(w, std::abs(kv.second));
  return w;
}

template <class Map>
double max_abs_diff(const Map& a, const Map& b) {
  Map d = a;
  for (const auto& [k, v] : b) d[k] -= v;
  return max_abs(d);
}

inline Sparse2 swap_legs(const Sparse2& x, int dim) {
  Sparse2 out;
  const uint64_t n = uint64_t(dim);
  for (const auto& [key, c] : x) out[(key % n) * n + key / n] += c;
  return out;
}

// Product in A (x) A.
inline Sparse2 multiply2(const WeakHopfAlgebra& W, const Sparse2& x, const Sparse2& y) {
  Sparse2 out;
  const uint64_t n = uint64_t(W.dim);
  for (const auto& [kx, cx] : x) {
    int p = int(kx / n), q = int(kx % n);
    for (const auto& [ky, cy] : y) {
      int r = int(ky / n), s = int(ky % n);
      auto [lo1, hi1] = W.mult.range(p, r);
      if (lo1 == hi1) continue;
      auto [lo2, hi2] = W.mult.range(q, s);
      for (size_t a = lo1; a < hi1; ++a)
        for (size_t b = lo2; b < hi2; ++b)
          out[uint64_t(W.mult.k[a]) * n + uint64_t(W.mult.k[b])] += cx * cy * W.mult.v[a] * W.mult.v[b];
    }
  }
  return out;
}

// Product in A (x) A (x) A.
inline Sparse3 multiply3(const WeakHopfAlgebra& W, const Sparse3& x, const Sparse3& y) {
  Sparse3 out;
  const uint64_t n = uint64_t(W.dim);
  for (const auto& [kx, cx] : x) {
    int p0 = int(kx / (n * n)), p1 = int((kx / n) % n), p2 = int(kx % n);
    for (const auto& [ky, cy] : y) {
      int q0 = int(ky / (n * n)), q1 = int((ky / n) % n), q2 = int(ky % n);
      auto [l0, h0] = W.mult.range(p0, q0);
      if (l0 == h0) continue;
      auto [l1, h1] = W.mult.range(p1, q1);
      if (l1 == h1) continue;
      auto [l2, h2] = W.mult.range(p2, q2);
      for (size_t a = l0; a < h0; ++a)
        for (size_t b = l1; b < h1; ++b)
          for (size_t c = l2; c < h2; ++c)
            out[(uint64_t(W.mult.k[a]) * n + uint64_t(W.mult.k[b])) * n + uint64_t(W.mult.k[c])] +=
                cx * cy * W.mult.v[a] * W.mult.v[b] * W.mult.v[c];
    }
  }
  return out;
}

// Precomputed maps derived from the structure constants.
struct WhaCache {
  const WeakHopfAlgebra* W = nullptr;
  Sparse2 delta_one;     // Delta(1)
  MatC eps_pair;         // eps(x_i x_j)
  MatC epsL, epsR;       // column i = eps_L(x_i), eps_R(x_i)
  Eigen::SparseLU<SpMat> s_lu;
  bool s_ok = false;

  explicit WhaCache(const WeakHopfAlgebra& w) : W(&w) {
    const int n = w.dim;
    delta_one = comultiply(w, w.unit);
    eps_pair = MatC::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (size_t p = w.mult.ptr[size_t(i)]; p < w.mult.ptr[size_t(i) + 1]; ++p)
        eps_pair(i, w.mult.j[p]) += w.mult.v[p] * w.counit[w.mult.k[p]];
    // eps_L(x) = eps(1_(1) x) 1_(2),  eps_R(x) = 1_(1) eps(x 1_(2))
    epsL = MatC::Zero(n, n);
    epsR = MatC::Zero(n, n);
    const uint64_t nn = uint64_t(n);
    for (const auto& [key, c] : delta_one) {
      int p = int(key / nn), q = int(key % nn);
      for (int i = 0; i < n; ++i) {
        epsL(q, i) += c * eps_pair(p, i);
        epsR(p, i) += c * eps_pair(i, q);
      }
    }
    s_lu.compute(w.antipode);
    s_ok = s_lu.info() == Eigen::Success;
  }

  VecC eps_L(const VecC& x) const { return epsL * x; }
  VecC eps_R(const VecC& x) const { return epsR * x; }

  VecC antipode_inverse(const VecC& x) const {
    if (!s_ok) throw ValidationError("antipode matrix is singular");
    VecC y = s_lu.solve(x);
    return y;
  }
};

// Dual weak Hopf algebra on the coordinate dual basis.
inline WeakHopfAlgebra dualize(const WeakHopfAlgebra& W) {
  WeakHopfAlgebra D;
  D.name = W.name + "^";
  D.dim = W.dim;
  // mult_dual[i][j][k] = comult[k][i][j]; comult_dual[i][j][k] = mult[j][k][i]
  D.mult = W.comult.permuted({1, 2, 0});
  D.comult = W.mult.permuted({2, 0, 1});
  D.unit = W.counit;
  D.counit = W.unit;
  D.antipode = SpMat(W.antipode.transpose());
  D.haar = W.haar_dual;
  D.haar_dual = W.haar;
  for (const auto& s : W.basis_names) D.basis_names.push_back(s + "^");
  return D;
}

}  // namespace tubewha
