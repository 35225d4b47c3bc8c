#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wha.hpp"

namespace tubewha {

struct AxiomResult {
  std::string name;
  double residual = 0.0;
  size_t samples = 0;
  bool pass = false;
};

struct AxiomReport {
  std::vector<AxiomResult> axioms;
  std::string policy;  // "exhaustive" or "sampled"
  uint64_t seed = 0;
  double tol = 1e-8;
  double seconds = 0.0;
  bool pass = false;

  const AxiomResult* find(const std::string& n) const {
    for (const auto& a : axioms)
      if (a.name == n) return &a;
    return nullptr;
  }
};

struct SamplingPolicy {
  int exhaustive_max_dim = 64;
  size_t samples = 10000;
  uint64_t seed = 12345;
  bool force_exhaustive = false;
};

namespace detail {

// Enumerates index tuples of length `arity` over [0, dim): all of them when
// exhaustive, otherwise `samples` uniform draws.
class TupleSource {
 public:
  TupleSource(int dim, int arity, bool exhaustive, size_t samples, uint64_t seed)
      : dim_(dim), arity_(arity), exhaustive_(exhaustive), samples_(samples), rng_(seed), cur_(size_t(arity), 0) {
    if (exhaustive_) {
      total_ = 1;
      for (int a = 0; a < arity; ++a) total_ *= size_t(dim);
    } else {
      total_ = samples;
    }
  }
  size_t total() const { return total_; }
  bool next(std::vector<int>& out) {
    if (done_ >= total_) return false;
    if (exhaustive_) {
      out = cur_;
      for (int a = arity_ - 1; a >= 0; --a) {
        if (++cur_[size_t(a)] < dim_) break;
        cur_[size_t(a)] = 0;
      }
    } else {
      std::uniform_int_distribution<int> U(0, dim_ - 1);
      out.resize(size_t(arity_));
      for (auto& v : out) v = U(rng_);
    }
    ++done_;
    return true;
  }

 private:
  int dim_, arity_;
  bool exhaustive_;
  size_t samples_;
  std::mt19937_64 rng_;
  std::vector<int> cur_;
  size_t total_ = 0, done_ = 0;
};

}  // namespace detail

// Numerical weak Hopf axiom suite over basis tuples.
inline AxiomReport verify_axioms(const WeakHopfAlgebra& W, double tol, const SamplingPolicy& pol = {}) {
  auto t0 = std::chrono::steady_clock::now();
  const int n = W.dim;
  const uint64_t nn = uint64_t(n);
  const bool exhaustive = pol.force_exhaustive || n <= pol.exhaustive_max_dim;
  AxiomReport rep;
  rep.policy = exhaustive ? "exhaustive" : "sampled";
  rep.seed = pol.seed;
  rep.tol = tol;
  WhaCache cache(W);
  auto source = [&](int arity, uint64_t salt) {
    // Single-element axioms are cheap: run them on every basis element.
    bool ex = exhaustive || arity == 1;
    return detail::TupleSource(n, arity, ex, pol.samples, pol.seed + salt);
  };
  std::vector<int> tup;

  // Unit: 1 x = x = x 1.
  {
    AxiomResult r{"unit"};
    auto src = source(1, 1);
    while (src.next(tup)) {
      VecC x = basis_vector(n, tup[0]);
      r.residual = std::max(r.residual, (multiply(W, W.unit, x) - x).cwiseAbs().maxCoeff());
      r.residual = std::max(r.residual, (multiply(W, x, W.unit) - x).cwiseAbs().maxCoeff());
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // Associativity.
  {
    AxiomResult r{"associativity"};
    auto src = source(3, 2);
    VecC xy(n), yz(n), lhs(n), rhs(n);
    while (src.next(tup)) {
      xy.setZero();
      yz.setZero();
      add_basis_product(W, tup[0], tup[1], 1.0, xy);
      add_basis_product(W, tup[1], tup[2], 1.0, yz);
      lhs.setZero();
      rhs.setZero();
      for (int p = 0; p < n; ++p)
        if (xy[p] != cplx(0.0)) add_basis_product(W, p, tup[2], xy[p], lhs);
      for (int p = 0; p < n; ++p)
        if (yz[p] != cplx(0.0)) add_basis_product(W, tup[0], p, yz[p], rhs);
      r.residual = std::max(r.residual, (lhs - rhs).cwiseAbs().maxCoeff());
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // Counit: (eps (x) id) Delta = id = (id (x) eps) Delta.
  {
    AxiomResult r{"counit"};
    auto src = source(1, 3);
    while (src.next(tup)) {
      VecC a = VecC::Zero(n), b = VecC::Zero(n);
      for (size_t p = W.comult.ptr[size_t(tup[0])]; p < W.comult.ptr[size_t(tup[0]) + 1]; ++p) {
        a[W.comult.k[p]] += W.counit[W.comult.j[p]] * W.comult.v[p];
        b[W.comult.j[p]] += W.counit[W.comult.k[p]] * W.comult.v[p];
      }
      a[tup[0]] -= 1.0;
      b[tup[0]] -= 1.0;
      r.residual = std::max({r.residual, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // Coassociativity.
  {
    AxiomResult r{"coassociativity"};
    auto src = source(1, 4);
    while (src.next(tup)) {
      VecC x = basis_vector(n, tup[0]);
      Sparse3 lhs = comultiply2(W, x);
      Sparse3 rhs;
      for (const auto& [key, c] : comultiply(W, x)) {
        int p = int(key / nn), q = int(key % nn);
        for (size_t s = W.comult.ptr[size_t(q)]; s < W.comult.ptr[size_t(q) + 1]; ++s)
          rhs[(uint64_t(p) * nn + uint64_t(W.comult.j[s])) * nn + uint64_t(W.comult.k[s])] += c * W.comult.v[s];
      }
      r.residual = std::max(r.residual, max_abs_diff(lhs, rhs));
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // Delta(x y) = Delta(x) Delta(y).
  {
    AxiomResult r{"comult_multiplicative"};
    auto src = source(2, 5);
    VecC xy(n);
    while (src.next(tup)) {
      xy.setZero();
      add_basis_product(W, tup[0], tup[1], 1.0, xy);
      Sparse2 lhs = comultiply(W, xy);
      Sparse2 rhs = multiply2(W, comultiply(W, basis_vector(n, tup[0])), comultiply(W, basis_vector(n, tup[1])));
      r.residual = std::max(r.residual, max_abs_diff(lhs, rhs));
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // (Delta (x) id) Delta(1) = (Delta(1) (x) 1)(1 (x) Delta(1)) = (1 (x) Delta(1))(Delta(1) (x) 1).
  {
    AxiomResult r{"weak_unit"};
    Sparse3 lhs = comultiply2(W, W.unit);
    Sparse3 d1_1, one_d1;
    for (const auto& [key, c] : cache.delta_one) {
      uint64_t p = key / nn, q = key % nn;
      for (int u = 0; u < n; ++u) {
        if (W.unit[u] == cplx(0.0)) continue;
        d1_1[(p * nn + q) * nn + uint64_t(u)] += c * W.unit[u];
        one_d1[(uint64_t(u) * nn + p) * nn + q] += c * W.unit[u];
      }
    }
    r.residual = std::max(max_abs_diff(lhs, multiply3(W, d1_1, one_d1)), max_abs_diff(lhs, multiply3(W, one_d1, d1_1)));
    r.samples = 1;
    rep.axioms.push_back(r);
  }
  // eps(x y z) = eps(x y_(1)) eps(y_(2) z) = eps(x y_(2)) eps(y_(1) z).
  {
    AxiomResult r{"weak_counit"};
    auto src = source(3, 6);
    VecC xy(n);
    while (src.next(tup)) {
      xy.setZero();
      add_basis_product(W, tup[0], tup[1], 1.0, xy);
      cplx lhs = 0.0;
      for (int p = 0; p < n; ++p)
        if (xy[p] != cplx(0.0)) lhs += xy[p] * cache.eps_pair(p, tup[2]);
      cplx r1 = 0.0, r2 = 0.0;
      for (size_t s = W.comult.ptr[size_t(tup[1])]; s < W.comult.ptr[size_t(tup[1]) + 1]; ++s) {
        int p = W.comult.j[s], q = W.comult.k[s];
        r1 += W.comult.v[s] * cache.eps_pair(tup[0], p) * cache.eps_pair(q, tup[2]);
        r2 += W.comult.v[s] * cache.eps_pair(tup[0], q) * cache.eps_pair(p, tup[2]);
      }
      r.residual = std::max({r.residual, std::abs(lhs - r1), std::abs(lhs - r2)});
      ++r.samples;
    }
    rep.axioms.push_back(r);
  }
  // Antipode: x_(1) S(x_(2)) = eps_L(x), S(x_(1)) x_(2) = eps_R(x), S(x_(1)) x_(2) S(x_(3)) = S(x).
  {
    AxiomResult rl{"antipode_left"}, rr{"antipode_right"}, r3{"antipode_sandwich"};
    auto src = source(1, 7);
    std::vector<VecC> Scol(static_cast<size_t>(n));
    for (int q = 0; q < n; ++q) Scol[size_t(q)] = VecC(W.antipode.col(q));
    while (src.next(tup)) {
      VecC x = basis_vector(n, tup[0]);
      VecC a = VecC::Zero(n), b = VecC::Zero(n), c3 = VecC::Zero(n);
      for (const auto& [key, c] : comultiply(W, x)) {
        int p = int(key / nn), q = int(key % nn);
        for (int s = 0; s < n; ++s) {
          if (Scol[size_t(q)][s] != cplx(0.0)) add_basis_product(W, p, s, c * Scol[size_t(q)][s], a);
          if (Scol[size_t(p)][s] != cplx(0.0)) add_basis_product(W, s, q, c * Scol[size_t(p)][s], b);
        }
      }
      for (const auto& [key, c] : comultiply2(W, x)) {
        int p = int(key / (nn * nn)), q = int((key / nn) % nn), t = int(key % nn);
        VecC sq = VecC::Zero(n);
        for (int s = 0; s < n; ++s)
          if (Scol[size_t(p)][s] != cplx(0.0)) add_basis_product(W, s, q, Scol[size_t(p)][s], sq);
        for (int s = 0; s < n; ++s) {
          if (sq[s] == cplx(0.0)) continue;
          for (int u = 0; u < n; ++u)
            if (Scol[size_t(t)][u] != cplx(0.0)) add_basis_product(W, s, u, c * sq[s] * Scol[size_t(t)][u], c3);
        }
      }
      rl.residual = std::max(rl.residual, (a - cache.eps_L(x)).cwiseAbs().maxCoeff());
      rr.residual = std::max(rr.residual, (b - cache.eps_R(x)).cwiseAbs().maxCoeff());
      r3.residual = std::max(r3.residual, (c3 - Scol[size_t(tup[0])]).cwiseAbs().maxCoeff());
      ++rl.samples;
      ++rr.samples;
      ++r3.samples;
    }
    rep.axioms.push_back(rl);
    rep.axioms.push_back(rr);
    rep.axioms.push_back(r3);
  }
  rep.pass = true;
  for (auto& a : rep.axioms) {
    a.pass = a.residual < tol;
    rep.pass = rep.pass && a.pass;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace tubewha
