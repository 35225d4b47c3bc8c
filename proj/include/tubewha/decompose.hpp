#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wha.hpp"

namespace tubewha {

struct HaarSolve {
  VecC lambda;
  double residual = 0.0;    // max |M lambda - b|
  double min_eig_ratio = 0.0;  // smallest/largest eigenvalue of the normal matrix
};

namespace detail {

inline void append_block(std::vector<Eigen::Triplet<cplx>>& t, Eigen::Index row0, const SpMat& m) {
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) t.emplace_back(row0 + it.row(), it.col(), it.value());
}

// Least squares for a consistent sparse system via normal equations with
// two steps of iterative refinement.
inline VecC sparse_lstsq(const SpMat& M, const VecC& b, double* min_ratio) {
  SpMat Nsp = SpMat(M.adjoint()) * M;
  MatC Nd = MatC(Nsp);
  Eigen::LDLT<MatC> ldlt(Nd);
  if (min_ratio) {
    Eigen::SelfAdjointEigenSolver<MatC> es(Nd, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    *min_ratio = hi > 0 ? lo / hi : 0.0;
  }
  VecC x = ldlt.solve(SpMat(M.adjoint()) * b);
  for (int it = 0; it < 2; ++it) {
    VecC r = b - M * x;
    x += ldlt.solve(SpMat(M.adjoint()) * r);
  }
  return x;
}

}  // namespace detail

// Haar integral as the solution of x lambda = eps_L(x) lambda,
// lambda x = lambda eps_R(x) for all basis x, normalized by eps_L(lambda) = 1.
inline HaarSolve solve_haar(const WeakHopfAlgebra& W) {
  const int n = W.dim;
  WhaCache cache(W);
  std::vector<SpMat> L(static_cast<size_t>(n)), R(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    L[size_t(i)] = left_mult_matrix(W, basis_vector(n, i));
    R[size_t(i)] = right_mult_matrix(W, basis_vector(n, i));
  }
  auto combo = [&](const std::vector<SpMat>& mats, const VecC& coef) {
    SpMat s(n, n);
    for (int q = 0; q < n; ++q)
      if (std::abs(coef[q]) > 0) s += coef[q] * mats[size_t(q)];
    return s;
  };
  std::vector<Eigen::Triplet<cplx>> t;
  const Eigen::Index nn = n;
  for (int i = 0; i < n; ++i) {
    detail::append_block(t, Eigen::Index(i) * nn, SpMat(L[size_t(i)] - combo(L, cache.epsL.col(i))));
    detail::append_block(t, nn * nn + Eigen::Index(i) * nn, SpMat(R[size_t(i)] - combo(R, cache.epsR.col(i))));
  }
  SpMat E = cache.epsL.sparseView();
  detail::append_block(t, 2 * nn * nn, E);
  SpMat M(2 * nn * nn + nn, nn);
  M.setFromTriplets(t.begin(), t.end());
  VecC b = VecC::Zero(2 * nn * nn + nn);
  b.tail(n) = W.unit;
  HaarSolve hs;
  hs.lambda = detail::sparse_lstsq(M, b, &hs.min_eig_ratio);
  hs.residual = (M * hs.lambda - b).cwiseAbs().maxCoeff();
  if (hs.min_eig_ratio < 1e-14)
    throw ValidationError("solve_haar: system is rank-deficient beyond the one-dimensional integral space");
  return hs;
}

// Dual Haar measure Lambda: the Haar integral of the dual algebra.
inline HaarSolve solve_dual_haar(const WeakHopfAlgebra& W) { return solve_haar(dualize(W)); }

struct Subspace {
  MatC basis;  // orthonormal columns
  double largest_dropped = 0.0;  // smallest singular value above threshold
  double smallest_kept = 0.0;   // largest singular value below threshold
  bool ill_conditioned = false;
};

// Orthonormal basis of ker(Delta - swap o Delta), computed component-wise.
inline Subspace cocommutative_subspace(const WeakHopfAlgebra& W, double threshold = 1e-8) {
  const int n = W.dim;
  const uint64_t nn = uint64_t(n);
  // Columns of K: K x_i = Delta(x_i) - swap Delta(x_i).
  std::vector<std::vector<std::pair<uint64_t, cplx>>> cols(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::map<uint64_t, cplx> m;
    for (size_t p = W.comult.ptr[size_t(i)]; p < W.comult.ptr[size_t(i) + 1]; ++p) {
      uint64_t a = uint64_t(W.comult.j[p]), b = uint64_t(W.comult.k[p]);
      m[a * nn + b] += W.comult.v[p];
      m[b * nn + a] -= W.comult.v[p];
    }
    for (const auto& kv : m)
      if (std::abs(kv.second) > 0) cols[size_t(i)].push_back(kv);
  }
  // Union variables that share a row.
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[size_t(x)] == x ? x : parent[size_t(x)] = root(parent[size_t(x)]); };
  std::unordered_map<uint64_t, int> owner;
  for (int i = 0; i < n; ++i)
    for (const auto& [row, v] : cols[size_t(i)]) {
      auto it = owner.find(row);
      if (it == owner.end())
        owner[row] = i;
      else
        parent[size_t(root(i))] = root(it->second);
    }
  std::map<int, std::vector<int>> comps;
  for (int i = 0; i < n; ++i) comps[root(i)].push_back(i);
  Subspace out;
  out.largest_dropped = std::numeric_limits<double>::infinity();
  std::vector<VecC> vecs;
  for (const auto& [r, vars] : comps) {
    std::map<uint64_t, int> rows;
    for (int i : vars)
      for (const auto& [row, v] : cols[size_t(i)]) rows.emplace(row, int(rows.size()));
    MatC K = MatC::Zero(std::max<Eigen::Index>(Eigen::Index(rows.size()), 1), Eigen::Index(vars.size()));
    for (size_t c = 0; c < vars.size(); ++c)
      for (const auto& [row, v] : cols[size_t(vars[c])]) K(rows[row], Eigen::Index(c)) = v;
    Eigen::BDCSVD<MatC> svd(K, Eigen::ComputeFullV);
    VecC sv = svd.singularValues().cast<cplx>();
    const Eigen::Index m = Eigen::Index(vars.size());
    for (Eigen::Index c = 0; c < m; ++c) {
      double s = c < sv.size() ? sv[c].real() : 0.0;
      if (s < threshold) {
        out.smallest_kept = std::max(out.smallest_kept, s);
        VecC v = VecC::Zero(n);
        for (Eigen::Index q = 0; q < m; ++q) v[vars[size_t(q)]] = svd.matrixV()(q, c);
        vecs.push_back(v);
      } else {
        out.largest_dropped = std::min(out.largest_dropped, s);
      }
    }
  }
  out.basis = MatC::Zero(n, Eigen::Index(vecs.size()));
  for (size_t c = 0; c < vecs.size(); ++c) out.basis.col(Eigen::Index(c)) = vecs[c];
  out.ill_conditioned = out.largest_dropped < 10 * threshold;
  return out;
}

// Norm of x minus its projection onto an orthonormal subspace.
inline double projection_residual(const Subspace& s, const VecC& x) {
  if (s.basis.cols() == 0) return x.norm();
  VecC p = s.basis * (s.basis.adjoint() * x);
  return (x - p).norm();
}

inline double cocommutativity_residual(const WeakHopfAlgebra& W, const VecC& x) {
  Sparse2 d = comultiply(W, x);
  return max_abs_diff(d, swap_legs(d, W.dim));
}

struct CharacterTable {
  std::vector<int> block_dims;
  std::vector<VecC> characters;  // chi_i as functionals: chi_i(x_j) = characters[i][j]
  std::vector<VecC> idempotents;  // central idempotents e_i
  std::vector<std::vector<std::vector<int>>> fusion;  // M[i][j][k]
  double center_gap = 0.0;
  double rounding_residual = 0.0;
  uint64_t seed = 0;
  int center_dim() const { return int(block_dims.size()); }
};

struct CenterInfo {
  MatC basis;  // orthonormal central elements
  double kept_max = 0.0;
  double dropped_min = 0.0;
};

inline CenterInfo algebra_center(const WeakHopfAlgebra& W) {
  const int n = W.dim;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < n; ++i) {
    SpMat D = left_mult_matrix(W, basis_vector(n, i)) - right_mult_matrix(W, basis_vector(n, i));
    detail::append_block(t, Eigen::Index(i) * n, D);
  }
  SpMat M(static_cast<Eigen::Index>(n) * n, n);
  M.setFromTriplets(t.begin(), t.end());
  MatC Nd = MatC(SpMat(SpMat(M.adjoint()) * M));
  Eigen::SelfAdjointEigenSolver<MatC> es(Nd);
  const auto& ev = es.eigenvalues();
  double top = std::max(ev.maxCoeff(), 1e-300);
  CenterInfo ci;
  std::vector<Eigen::Index> keep;
  ci.dropped_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < ev.size(); ++c) {
    double s = std::sqrt(std::max(ev[c], 0.0) / top);
    if (s < 1e-6) {
      keep.push_back(c);
      ci.kept_max = std::max(ci.kept_max, s);
    } else {
      ci.dropped_min = std::min(ci.dropped_min, s);
    }
  }
  ci.basis = MatC(n, Eigen::Index(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) ci.basis.col(Eigen::Index(c)) = es.eigenvectors().col(keep[c]);
  return ci;
}

// Traces of left multiplication: tr_k = Tr(L_{x_k}).
inline VecC regular_traces(const WeakHopfAlgebra& W) {
  VecC tr = VecC::Zero(W.dim);
  for (int i = 0; i < W.dim; ++i)
    for (size_t p = W.mult.ptr[size_t(i)]; p < W.mult.ptr[size_t(i) + 1]; ++p)
      if (W.mult.j[p] == W.mult.k[p]) tr[i] += W.mult.v[p];
  return tr;
}

// Central idempotents and irreducible characters from a random central
// element. Characters are ordered by (block dim, first nonzero basis value).
inline CharacterTable irreducible_characters(const WeakHopfAlgebra& W, uint64_t seed = 7) {
  const int n = W.dim;
  CenterInfo ci = algebra_center(W);
  const Eigen::Index r = ci.basis.cols();
  if (r == 0) throw ValidationError("center is empty");
  CharacterTable tab;
  tab.seed = seed;
  tab.center_gap = ci.dropped_min / std::max(ci.kept_max, 1e-300);
  VecC tr = regular_traces(W);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G;
  for (int attempt = 0; attempt < 8; ++attempt) {
    VecC c(r);
    for (Eigen::Index q = 0; q < r; ++q) c[q] = G(rng);
    VecC z = ci.basis * c;
    MatC Mz = ci.basis.adjoint() * (left_mult_matrix(W, z) * ci.basis);
    Eigen::ComplexEigenSolver<MatC> es(Mz);
    const auto& w = es.eigenvalues();
    double sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index b = a + 1; b < r; ++b) sep = std::min(sep, std::abs(w[a] - w[b]));
    if (sep < 1e-6) continue;
    std::vector<VecC> idem;
    bool ok = true;
    for (Eigen::Index a = 0; a < r; ++a) {
      VecC e = ci.basis * es.eigenvectors().col(a);
      VecC e2 = multiply(W, e, e);
      cplx s = e.dot(e2) / e.squaredNorm();
      if (std::abs(s) < 1e-12) {
        ok = false;
        break;
      }
      e /= s;
      idem.push_back(e);
    }
    if (!ok) continue;
    std::vector<std::pair<std::pair<int, double>, size_t>> order;
    std::vector<VecC> chars;
    std::vector<int> dims;
    for (size_t a = 0; a < idem.size(); ++a) {
      cplx t2 = tr.transpose() * idem[a];
      int ni = int(std::lround(std::sqrt(std::max(t2.real(), 0.0))));
      if (ni <= 0 || std::abs(t2 - double(ni * ni)) > 1e-6) {
        ok = false;
        break;
      }
      SpMat Re = right_mult_matrix(W, idem[a]);
      VecC chi = (SpMat(Re.transpose()) * tr) / double(ni);
      dims.push_back(ni);
      chars.push_back(chi);
    }
    if (!ok) continue;
    // Deterministic order: block dimension, then the character values.
    std::vector<size_t> perm(idem.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](size_t x, size_t y) {
      if (dims[x] != dims[y]) return dims[x] < dims[y];
      for (int j = 0; j < n; ++j) {
        double dx = chars[x][j].real(), dy = chars[y][j].real();
        if (std::abs(dx - dy) > 1e-6) return dx > dy;
      }
      return x < y;
    });
    for (size_t p : perm) {
      tab.block_dims.push_back(dims[p]);
      tab.characters.push_back(chars[p]);
      tab.idempotents.push_back(idem[p]);
    }
    break;
  }
  if (tab.block_dims.empty()) throw ValidationError("central decomposition failed (degenerate spectrum)");
  // Fusion: products in the dual algebra, expanded in the character basis.
  const size_t k = tab.characters.size();
  MatC X(n, Eigen::Index(k));
  for (size_t a = 0; a < k; ++a) X.col(Eigen::Index(a)) = tab.characters[a];
  auto qr = X.colPivHouseholderQr();
  tab.fusion.assign(k, std::vector<std::vector<int>>(k, std::vector<int>(k, 0)));
  for (size_t a = 0; a < k; ++a)
    for (size_t b = 0; b < k; ++b) {
      VecC prod = VecC::Zero(n);
      for (int i = 0; i < n; ++i)
        for (size_t p = W.comult.ptr[size_t(i)]; p < W.comult.ptr[size_t(i) + 1]; ++p)
          prod[i] += W.comult.v[p] * tab.characters[a][W.comult.j[p]] * tab.characters[b][W.comult.k[p]];
      VecC coef = qr.solve(prod);
      double res = (X * coef - prod).cwiseAbs().maxCoeff();
      tab.rounding_residual = std::max(tab.rounding_residual, res);
      for (size_t c = 0; c < k; ++c) {
        long m = std::lround(coef[Eigen::Index(c)].real());
        tab.rounding_residual = std::max(tab.rounding_residual, std::abs(coef[Eigen::Index(c)] - double(m)));
        tab.fusion[a][b][c] = int(m);
      }
    }
  return tab;
}

inline std::vector<int> wedderburn_blocks(const WeakHopfAlgebra& W, uint64_t seed = 7) {
  std::vector<int> d = irreducible_characters(W, seed).block_dims;
  std::sort(d.begin(), d.end());
  return d;
}

// Finds a relabelling p with M[p[i]][p[j]][p[k]] = N[i][j][k] for all i,j,k.
inline bool match_fusion_ring(const std::vector<std::vector<std::vector<int>>>& M,
                              const std::function<int(int, int, int)>& N, int rank, std::vector<int>* perm_out) {
  if (int(M.size()) != rank) return false;
  std::vector<int> p(static_cast<size_t>(rank));
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < rank && ok; ++i)
      for (int j = 0; j < rank && ok; ++j)
        for (int k = 0; k < rank && ok; ++k)
          ok = M[size_t(p[size_t(i)])][size_t(p[size_t(j)])][size_t(p[size_t(k)])] == N(i, j, k);
    if (ok) {
      if (perm_out) *perm_out = p;
      return true;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

}  // namespace tubewha
