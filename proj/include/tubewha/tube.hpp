#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fusion.hpp"
#include "wha.hpp"

namespace tubewha {

// Basis tube (a; c, e, f, g): bulk string a, bottom outer/inner c/e,
// top inner/outer f/g. Admissible when N[a][f][g] = N[a][e][c] = 1.
struct TubeLabel {
  int a, c, e, f, g;
  bool operator==(const TubeLabel& o) const {
    return a == o.a && c == o.c && e == o.e && f == o.f && g == o.g;
  }
};

class TubeBasis {
 public:
  explicit TubeBasis(const FusionCategory& cat) : rank_(cat.rank) {
    const int r = rank_;
    index_.assign(size_t(r) * r * r * r * r, -1);
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c)
        for (int e = 0; e < r; ++e)
          for (int f = 0; f < r; ++f)
            for (int g = 0; g < r; ++g)
              if (cat.N(a, f, g) && cat.N(a, e, c)) {
                index_[key(a, c, e, f, g)] = int(labels_.size());
                labels_.push_back({a, c, e, f, g});
              }
  }

  int size() const { return int(labels_.size()); }
  const TubeLabel& operator[](int i) const { return labels_[size_t(i)]; }
  const std::vector<TubeLabel>& labels() const { return labels_; }
  int find(int a, int c, int e, int f, int g) const { return index_[key(a, c, e, f, g)]; }

  std::vector<int> per_bulk_counts() const {
    std::vector<int> out(static_cast<size_t>(rank_), 0);
    for (const auto& t : labels_) ++out[size_t(t.a)];
    return out;
  }

 private:
  size_t key(int a, int c, int e, int f, int g) const {
    return (((size_t(a) * rank_ + c) * rank_ + e) * rank_ + f) * rank_ + g;
  }
  int rank_;
  std::vector<TubeLabel> labels_;
  std::vector<int> index_;
};

inline TubeBasis enumerate_basis(const FusionCategory& cat) { return TubeBasis(cat); }

// Closed-form dimension: sum_a (sum_{f,g} N[a][f][g]) (sum_{e,c} N[a][e][c]).
inline int tube_dimension_formula(const FusionCategory& cat) {
  int total = 0;
  for (int a = 0; a < cat.rank; ++a) {
    int top = 0, bottom = 0;
    for (int x = 0; x < cat.rank; ++x)
      for (int y = 0; y < cat.rank; ++y) {
        top += cat.N(a, x, y);
        bottom += cat.N(a, x, y);
      }
    total += top * bottom;
  }
  return total;
}

// Entry-wise inverse F-matrices: finv(a,b,c,d,f,e) = [(F^{abc}_d)^{-1}]_{f,e}.
class InverseF {
 public:
  explicit InverseF(const FusionCategory& cat) : cat_(&cat) {
    const int r = cat.rank;
    data_.assign(cat.fsym.size(), cplx(0.0));
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        for (int c = 0; c < r; ++c)
          for (int d = 0; d < r; ++d) {
            FBlock blk = f_block(cat, a, b, c, d);
            if (blk.rows.empty()) continue;
            if (blk.rows.size() != blk.cols.size())
              throw ValidationError("F-matrix is not square at " + key_string(a, b, c, d, blk.rows[0], blk.cols[0]));
            Eigen::FullPivLU<MatC> lu(blk.m);
            if (!lu.isInvertible())
              throw ValidationError("F-matrix is singular at " + key_string(a, b, c, d, blk.rows[0], blk.cols[0]));
            MatC inv = lu.inverse();
            for (size_t i = 0; i < blk.cols.size(); ++i)
              for (size_t j = 0; j < blk.rows.size(); ++j)
                data_[cat.fidx(a, b, c, d, blk.cols[i], blk.rows[j])] = inv(Eigen::Index(i), Eigen::Index(j));
          }
  }
  cplx operator()(int a, int b, int c, int d, int f, int e) const { return data_[cat_->fidx(a, b, c, d, f, e)]; }

 private:
  const FusionCategory* cat_;
  std::vector<cplx> data_;
};

// Basis-product rule for tubes x = (a;c,e,f,g), y = (a';c',e',f',g'):
//   x y = delta_{e,c'} delta_{f,g'} sum_k [(F^{a a' f'}_g)^{-1}]_{g',k}
//         conj([(F^{a a' e'}_c)^{-1}]_{c',k}) sqrt(d_a d_a' / d_k) (k; c, e', f', g)
inline SparseTensor3 tube_multiplication(const FusionCategory& cat, const TubeBasis& B, const InverseF& finv) {
  const int r = cat.rank;
  const int n = B.size();
  // Index basis elements by (c, g) so the partner set of x is a lookup.
  std::vector<std::vector<int>> by_cg(static_cast<size_t>(r) * r);
  for (int j = 0; j < n; ++j) by_cg[size_t(B[j].c) * r + B[j].g].push_back(j);
  std::vector<Triplet3> t;
  for (int i = 0; i < n; ++i) {
    const auto& x = B[i];
    for (int jj : by_cg[size_t(x.e) * r + x.f]) {
      const auto& y = B[jj];
      for (int k = 0; k < r; ++k) {
        if (!cat.N(x.a, y.a, k) || !cat.N(k, y.f, x.g) || !cat.N(k, y.e, x.c)) continue;
        cplx top = finv(x.a, y.a, y.f, x.g, y.g, k);
        cplx bot = std::conj(finv(x.a, y.a, y.e, x.c, y.c, k));
        cplx v = top * bot * std::sqrt(cat.d(x.a) * cat.d(y.a) / cat.d(k));
        t.push_back({i, jj, B.find(k, x.c, y.e, y.f, x.g), v});
      }
    }
  }
  return SparseTensor3::from_triplets(n, std::move(t));
}

// Delta(a;c,e,f,g) = sum_{k,l: N[a][k][l]} sqrt(d_l / (d_k d_a)) (a;l,k,f,g) (x) (a;c,e,k,l)
inline SparseTensor3 tube_comultiplication(const FusionCategory& cat, const TubeBasis& B) {
  const int r = cat.rank;
  std::vector<Triplet3> t;
  for (int i = 0; i < B.size(); ++i) {
    const auto& x = B[i];
    for (int k = 0; k < r; ++k)
      for (int l = 0; l < r; ++l) {
        if (!cat.N(x.a, k, l)) continue;
        double v = std::sqrt(cat.d(l) / (cat.d(k) * cat.d(x.a)));
        t.push_back({i, B.find(x.a, l, k, x.f, x.g), B.find(x.a, x.c, x.e, k, l), v});
      }
  }
  return SparseTensor3::from_triplets(B.size(), std::move(t));
}

inline VecC tube_unit(const FusionCategory& cat, const TubeBasis& B) {
  VecC u = VecC::Zero(B.size());
  for (int e = 0; e < cat.rank; ++e)
    for (int f = 0; f < cat.rank; ++f) u[B.find(0, e, e, f, f)] = 1.0;
  return u;
}

// eps(a;c,e,f,g) = delta_{f,e} delta_{c,g} sqrt(d_a d_e / d_g)
inline VecC tube_counit(const FusionCategory& cat, const TubeBasis& B) {
  VecC eps = VecC::Zero(B.size());
  for (int i = 0; i < B.size(); ++i) {
    const auto& x = B[i];
    if (x.f == x.e && x.c == x.g) eps[i] = std::sqrt(cat.d(x.a) * cat.d(x.e) / cat.d(x.g));
  }
  return eps;
}

// S(a;c,e,f,g) = (d_f/d_g) theta(a,f,g) conj(theta(a,e,c)) (abar; f, g, c, e),
// theta(a,x,y) = conj(F^{abar a x}_x[0,y]) sqrt(d_a d_x / d_y).
// theta is 1 in gauges where the bent-line F-symbols are positive.
inline SpMat tube_antipode(const FusionCategory& cat, const TubeBasis& B) {
  auto theta = [&](int a, int x, int y) {
    int ab = cat.dual[a];
    return std::conj(cat.F(ab, a, x, x, 0, y)) * std::sqrt(cat.d(a) * cat.d(x) / cat.d(y));
  };
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < B.size(); ++i) {
    const auto& x = B[i];
    cplx co = cat.d(x.f) / cat.d(x.g) * theta(x.a, x.f, x.g) * std::conj(theta(x.a, x.e, x.c));
    t.emplace_back(B.find(cat.dual[x.a], x.f, x.g, x.c, x.e), i, co);
  }
  SpMat S(B.size(), B.size());
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

// lambda = (1/rank) sum_{a,x,y: N[a][x][y]} sqrt(d_a / (d_x^3 d_y)) (a; y, x, x, y)
inline VecC haar_integral(const FusionCategory& cat, const TubeBasis& B) {
  VecC lam = VecC::Zero(B.size());
  for (int a = 0; a < cat.rank; ++a)
    for (int x = 0; x < cat.rank; ++x)
      for (int y = 0; y < cat.rank; ++y)
        if (cat.N(a, x, y))
          lam[B.find(a, y, x, x, y)] =
              std::sqrt(cat.d(a) / (cat.d(x) * cat.d(x) * cat.d(x) * cat.d(y))) / double(cat.rank);
  return lam;
}

inline std::string tube_label_string(const FusionCategory& cat, const TubeLabel& t) {
  return "(" + cat.labels[size_t(t.a)] + ";" + cat.labels[size_t(t.c)] + "," + cat.labels[size_t(t.e)] + "," +
         cat.labels[size_t(t.f)] + "," + cat.labels[size_t(t.g)] + ")";
}

// Builds the boundary tube algebra with its weak Hopf structure. The dual
// Haar measure is left empty; see solve_dual_haar.
inline WeakHopfAlgebra build_tube_algebra(const FusionCategory& cat) {
  TubeBasis B(cat);
  InverseF finv(cat);
  WeakHopfAlgebra W;
  W.name = "Tube(" + cat.name + ")";
  W.dim = B.size();
  W.mult = tube_multiplication(cat, B, finv);
  W.comult = tube_comultiplication(cat, B);
  W.unit = tube_unit(cat, B);
  W.counit = tube_counit(cat, B);
  W.antipode = tube_antipode(cat, B);
  W.haar = haar_integral(cat, B);
  for (const auto& t : B.labels()) W.basis_names.push_back(tube_label_string(cat, t));
  return W;
}

}  // namespace tubewha
