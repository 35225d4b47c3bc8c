#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "types.hpp"

namespace tubewha {

// Multiplicity-free fusion category with F-symbols.
// F(a,b,c,d,e,f) is the matrix element of F^{abc}_d taking the basis
// ((a b)_e c)_d to (a (b c)_f)_d. Object 0 is the unit.
struct FusionCategory {
  std::string name;
  int rank = 0;
  std::vector<std::string> labels;
  std::vector<int> dual;
  std::vector<uint8_t> fusion;  // rank^3
  std::vector<double> fpdim;
  std::vector<cplx> fsym;      // rank^6
  std::vector<uint8_t> fknown;  // rank^6

  void resize(int r) {
    rank = r;
    labels.assign(r, "");
    dual.assign(r, 0);
    fusion.assign(size_t(r) * r * r, 0);
    fpdim.assign(r, 1.0);
    size_t r6 = size_t(r) * r * r * r * r * r;
    fsym.assign(r6, cplx(0.0));
    fknown.assign(r6, 0);
  }

  int N(int a, int b, int c) const { return fusion[(size_t(a) * rank + b) * rank + c]; }
  void set_N(int a, int b, int c, int v) { fusion[(size_t(a) * rank + b) * rank + c] = uint8_t(v); }

  size_t fidx(int a, int b, int c, int d, int e, int f) const {
    return ((((size_t(a) * rank + b) * rank + c) * rank + d) * rank + e) * rank + f;
  }
  cplx F(int a, int b, int c, int d, int e, int f) const { return fsym[fidx(a, b, c, d, e, f)]; }
  bool has_F(int a, int b, int c, int d, int e, int f) const { return fknown[fidx(a, b, c, d, e, f)] != 0; }
  void set_F(int a, int b, int c, int d, int e, int f, cplx v) {
    size_t i = fidx(a, b, c, d, e, f);
    fsym[i] = v;
    fknown[i] = 1;
  }

  bool admissible(int a, int b, int c, int d, int e, int f) const {
    return N(a, b, e) && N(e, c, d) && N(b, c, f) && N(a, f, d);
  }

  std::vector<int> fuse(int a, int b) const {
    std::vector<int> out;
    for (int c = 0; c < rank; ++c)
      if (N(a, b, c)) out.push_back(c);
    return out;
  }

  double d(int a) const { return fpdim[a]; }
};

// Row/column labels and matrix of F^{abc}_d.
struct FBlock {
  std::vector<int> rows;  // e
  std::vector<int> cols;  // f
  MatC m;
};

inline FBlock f_block(const FusionCategory& cat, int a, int b, int c, int d) {
  FBlock blk;
  for (int e = 0; e < cat.rank; ++e)
    if (cat.N(a, b, e) && cat.N(e, c, d)) blk.rows.push_back(e);
  for (int f = 0; f < cat.rank; ++f)
    if (cat.N(b, c, f) && cat.N(a, f, d)) blk.cols.push_back(f);
  blk.m = MatC::Zero(Eigen::Index(blk.rows.size()), Eigen::Index(blk.cols.size()));
  for (size_t i = 0; i < blk.rows.size(); ++i)
    for (size_t j = 0; j < blk.cols.size(); ++j)
      blk.m(Eigen::Index(i), Eigen::Index(j)) = cat.F(a, b, c, d, blk.rows[i], blk.cols[j]);
  return blk;
}

// Perron-Frobenius dimensions. The sum of all fusion matrices plus the
// identity is primitive for a connected fusion ring, so power iteration
// converges to the common PF eigenvector.
inline std::vector<double> fp_dimensions(const FusionCategory& cat) {
  const int r = cat.rank;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c) M(c, b) += cat.N(a, b, c);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(r);
  double prev = 0.0;
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = M * v;
    double nrm = w.norm();
    w /= nrm;
    if ((w - v).norm() < 1e-14 && std::abs(nrm - prev) < 1e-13 * nrm) {
      v = w;
      converged = true;
      break;
    }
    v = w;
    prev = nrm;
  }
  if (!converged || v[0] <= 0.0) throw ValidationError("fp_dimensions: eigen-solve did not converge");
  std::vector<double> d(r);
  for (int a = 0; a < r; ++a) d[a] = v[a] / v[0];
  for (double x : d)
    if (!(x > 0.0)) throw ValidationError("fp_dimensions: non-positive dimension");
  return d;
}

inline double total_fpdim(const FusionCategory& cat) {
  double s = 0.0;
  for (double x : cat.fpdim) s += x * x;
  return s;
}

inline std::string key_string(int a, int b, int c, int d, int e, int f) {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ";" << d << ";" << e << "," << f << ")";
  return os.str();
}

// Checks the fusion-ring invariants and recomputes fpdim. If the category
// came with dimensions, they are cross-checked.
inline void validate_fusion(FusionCategory& cat, double tol = 1e-10, bool cross_check_fpdim = false) {
  const int r = cat.rank;
  if (r <= 0) throw ValidationError("rank must be positive");
  if (int(cat.labels.size()) != r) throw ValidationError("labels: expected " + std::to_string(r) + " entries");
  if (int(cat.dual.size()) != r) throw ValidationError("dual: expected " + std::to_string(r) + " entries");
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        if (cat.N(a, b, c) > 1)
          throw MultiplicityError("fusion multiplicity " + std::to_string(cat.N(a, b, c)) + " > 1 at (" +
                                  std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
  for (int a = 0; a < r; ++a) {
    if (cat.dual[a] < 0 || cat.dual[a] >= r || cat.dual[cat.dual[a]] != a)
      throw ValidationError("dual is not an involution at object " + std::to_string(a));
  }
  for (int b = 0; b < r; ++b)
    for (int c = 0; c < r; ++c) {
      if (cat.N(0, b, c) != (b == c ? 1 : 0)) throw ValidationError("unit: N[0][b][c] != delta_bc");
      if (cat.N(b, 0, c) != (b == c ? 1 : 0)) throw ValidationError("unit: N[a][0][c] != delta_ac");
    }
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if (cat.N(a, b, 0) != (b == cat.dual[a] ? 1 : 0))
        throw ValidationError("duality: N[a][b][0] != delta_{b,dual(a)} at a=" + std::to_string(a));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d) {
          int lhs = 0, rhs = 0;
          for (int e = 0; e < r; ++e) lhs += cat.N(a, b, e) * cat.N(e, c, d);
          for (int f = 0; f < r; ++f) rhs += cat.N(b, c, f) * cat.N(a, f, d);
          if (lhs != rhs) throw ValidationError("fusion ring is not associative");
        }
  std::vector<double> d = fp_dimensions(cat);
  if (cross_check_fpdim) {
    for (int a = 0; a < r; ++a)
      if (std::abs(d[a] - cat.fpdim[a]) > 1e-6 * std::max(1.0, d[a]))
        throw ValidationError("fpdim of object " + std::to_string(a) + " disagrees with the fusion rules");
  }
  cat.fpdim = d;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      double s = 0.0;
      for (int c = 0; c < r; ++c) s += cat.N(a, b, c) * d[c];
      if (std::abs(d[a] * d[b] - s) > tol * std::max(1.0, s))
        throw ValidationError("fpdim eigen-equation fails at (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
}

inline double fpdim_residual(const FusionCategory& cat) {
  double worst = 0.0;
  for (int a = 0; a < cat.rank; ++a)
    for (int b = 0; b < cat.rank; ++b) {
      double s = 0.0;
      for (int c = 0; c < cat.rank; ++c) s += cat.N(a, b, c) * cat.d(c);
      worst = std::max(worst, std::abs(cat.d(a) * cat.d(b) - s));
    }
  return worst;
}

// Throws naming the first admissible key without an F-symbol.
inline void require_complete_fsymbols(const FusionCategory& cat) {
  const int r = cat.rank;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f)
              if (cat.admissible(a, b, c, d, e, f) && !cat.has_F(a, b, c, d, e, f))
                throw ValidationError("missing F-symbol for admissible key " + key_string(a, b, c, d, e, f));
}

struct PentagonReport {
  size_t instances = 0;
  double max_pentagon = 0.0;
  double max_unitarity = 0.0;
  std::array<int, 9> worst{};  // a,b,c,d,e,f,g,k,l of the worst instance
  double tol = 1e-8;
  bool pass = false;
};

// Pentagon: F^{fcd}_e[g,l] F^{abl}_e[f,k] = sum_h F^{abc}_g[f,h] F^{ahd}_e[g,k] F^{bcd}_k[h,l]
inline PentagonReport check_pentagon(const FusionCategory& cat, double tol = 1e-8) {
  require_complete_fsymbols(cat);
  PentagonReport rep;
  rep.tol = tol;
  const int r = cat.rank;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f) {
              if (!cat.N(a, b, f)) continue;
              for (int g = 0; g < r; ++g) {
                if (!cat.N(f, c, g) || !cat.N(g, d, e)) continue;
                for (int l = 0; l < r; ++l) {
                  if (!cat.N(c, d, l) || !cat.N(f, l, e)) continue;
                  for (int k = 0; k < r; ++k) {
                    if (!cat.N(b, l, k) || !cat.N(a, k, e)) continue;
                    cplx lhs = cat.F(f, c, d, e, g, l) * cat.F(a, b, l, e, f, k);
                    cplx rhs = 0.0;
                    for (int h = 0; h < r; ++h) {
                      if (!cat.N(b, c, h) || !cat.N(a, h, g) || !cat.N(h, d, k)) continue;
                      rhs += cat.F(a, b, c, g, f, h) * cat.F(a, h, d, e, g, k) * cat.F(b, c, d, k, h, l);
                    }
                    ++rep.instances;
                    double res = std::abs(lhs - rhs);
                    if (res > rep.max_pentagon) {
                      rep.max_pentagon = res;
                      rep.worst = {a, b, c, d, e, f, g, k, l};
                    }
                  }
                }
              }
            }
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d) {
          FBlock blk = f_block(cat, a, b, c, d);
          if (blk.rows.empty()) continue;
          if (blk.rows.size() != blk.cols.size()) {
            rep.max_unitarity = std::max(rep.max_unitarity, 1.0);
            continue;
          }
          MatC id = MatC::Identity(blk.m.rows(), blk.m.cols());
          rep.max_unitarity = std::max(rep.max_unitarity, (blk.m * blk.m.adjoint() - id).cwiseAbs().maxCoeff());
        }
  rep.pass = rep.max_pentagon < tol && rep.max_unitarity < tol;
  return rep;
}

// F -> F * u(a,b;e) u(e,c;d) / (u(b,c;f) u(a,f;d)) with random unit-modulus
// vertex factors. Pentagon and unitarity are invariant under this map.
template <class Rng>
FusionCategory gauge_transform(const FusionCategory& cat, Rng& rng) {
  const int r = cat.rank;
  std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
  std::vector<cplx> u(static_cast<size_t>(r) * r * r, cplx(1.0));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        if (cat.N(a, b, c)) u[(size_t(a) * r + b) * r + c] = std::polar(1.0, U(rng));
  auto uu = [&](int a, int b, int c) { return u[(size_t(a) * r + b) * r + c]; };
  FusionCategory out = cat;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f)
              if (cat.admissible(a, b, c, d, e, f) && cat.has_F(a, b, c, d, e, f))
                out.set_F(a, b, c, d, e, f,
                          cat.F(a, b, c, d, e, f) * uu(a, b, e) * uu(e, c, d) / (uu(b, c, f) * uu(a, f, d)));
  return out;
}

// Fingerprint of fusion data and F-symbols (rounded to 1e-12).
inline std::string category_hash(const FusionCategory& cat) {
  Fnv1a h;
  h.add_pod(cat.rank);
  h.add(cat.fusion.data(), cat.fusion.size());
  for (size_t i = 0; i < cat.fsym.size(); ++i) {
    if (!cat.fknown[i]) continue;
    long long re = std::llround(cat.fsym[i].real() * 1e12);
    long long im = std::llround(cat.fsym[i].imag() * 1e12);
    h.add_pod(i);
    h.add_pod(re);
    h.add_pod(im);
  }
  return h.hex();
}

}  // namespace tubewha
