#include <gtest/gtest.h>

#include <cmath>

#include "tubewha/builtins.hpp"
#include "tubewha/decompose.hpp"
#include "tubewha/tube.hpp"

using namespace tubewha;

namespace {

int brute_force_count(const FusionCategory& cat, int a) {
  int n = 0;
  for (int c = 0; c < cat.rank; ++c)
    for (int e = 0; e < cat.rank; ++e)
      for (int f = 0; f < cat.rank; ++f)
        for (int g = 0; g < cat.rank; ++g) n += cat.N(a, f, g) * cat.N(a, e, c);
  return n;
}

}  // namespace

TEST(TubeBasis, CountsMatchBruteForceAndFormula) {
  for (const std::string name : {"trivial", "vec_z2", "vec_z3", "fibonacci"}) {
    auto cat = builtin(name);
    auto B = enumerate_basis(cat);
    auto counts = B.per_bulk_counts();
    int total = 0;
    for (int a = 0; a < cat.rank; ++a) {
      EXPECT_EQ(counts[size_t(a)], brute_force_count(cat, a)) << name;
      total += counts[size_t(a)];
    }
    EXPECT_EQ(total, B.size());
    EXPECT_EQ(tube_dimension_formula(cat), B.size());
    for (int i = 0; i < B.size(); ++i) {
      const auto& t = B[i];
      EXPECT_EQ(B.find(t.a, t.c, t.e, t.f, t.g), i);
    }
  }
  EXPECT_EQ(enumerate_basis(builtin("vec_z2")).size(), 8);
  EXPECT_EQ(enumerate_basis(builtin("fibonacci")).per_bulk_counts(), (std::vector<int>{4, 9}));
  auto h3 = enumerate_basis(haagerup_fusion());
  EXPECT_EQ(h3.per_bulk_counts(), (std::vector<int>{36, 36, 36, 225, 225, 225}));
  EXPECT_EQ(h3.size(), 783);
}

TEST(TubeAlgebra, UnitAndCounitValues) {
  auto z2 = builtin("vec_z2");
  auto Bz = enumerate_basis(z2);
  auto u = tube_unit(z2, Bz);
  EXPECT_EQ((u.array() != cplx(0.0)).count(), 4);
  EXPECT_EQ((tube_unit(haagerup_fusion(), enumerate_basis(haagerup_fusion())).array() != cplx(0.0)).count(), 36);

  auto fib = fibonacci_category();
  auto B = enumerate_basis(fib);
  auto eps = tube_counit(fib, B);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(eps[B.find(1, 1, 1, 1, 1)].real(), std::sqrt(phi), 1e-12);
  EXPECT_NEAR(eps[B.find(1, 0, 1, 1, 0)].real(), std::sqrt(phi * phi), 1e-12);
  EXPECT_NEAR(eps[B.find(0, 1, 1, 1, 1)].real(), 1.0, 1e-12);
  EXPECT_EQ(eps[B.find(1, 1, 1, 0, 1)], cplx(0.0));
}

TEST(TubeAlgebra, UnitIsTwoSided) {
  for (const std::string name : {"vec_z2", "vec_z3", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    for (int i = 0; i < W.dim; ++i) {
      VecC x = basis_vector(W.dim, i);
      EXPECT_LT((multiply(W, W.unit, x) - x).norm(), 1e-12) << name;
      EXPECT_LT((multiply(W, x, W.unit) - x).norm(), 1e-12) << name;
    }
  }
}

TEST(TubeAlgebra, CounitLawOfComultiplication) {
  for (const std::string name : {"vec_z3", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    for (int i = 0; i < W.dim; ++i) {
      MatC D = comultiply_dense(W, basis_vector(W.dim, i));
      VecC left = D.transpose() * W.counit;
      VecC right = D * W.counit;
      EXPECT_LT((left - basis_vector(W.dim, i)).norm(), 1e-12) << name << " " << i;
      EXPECT_LT((right - basis_vector(W.dim, i)).norm(), 1e-12) << name << " " << i;
    }
  }
}

TEST(TubeAlgebra, AntipodeIsMonomialAndInvolutiveOnLabels) {
  auto cat = fibonacci_category();
  auto W = build_tube_algebra(cat);
  auto B = enumerate_basis(cat);
  for (int c = 0; c < W.dim; ++c) {
    int nz = 0;
    for (SpMat::InnerIterator it(W.antipode, c); it; ++it) {
      ++nz;
      const auto& x = B[c];
      const auto& y = B[int(it.row())];
      EXPECT_EQ(y.a, cat.dual[x.a]);
      EXPECT_EQ(y.c, x.f);
      EXPECT_EQ(y.e, x.g);
      EXPECT_EQ(y.f, x.c);
      EXPECT_EQ(y.g, x.e);
    }
    EXPECT_EQ(nz, 1);
  }
}

TEST(TubeAlgebra, HaarClosedFormForZ2) {
  auto cat = builtin("vec_z2");
  auto W = build_tube_algebra(cat);
  auto B = enumerate_basis(cat);
  VecC expect = VecC::Zero(W.dim);
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) expect[B.find(a, a ^ x, x, x, a ^ x)] = 0.5;
  EXPECT_LT((W.haar - expect).norm(), 1e-14);
}

TEST(TubeAlgebra, HaarClosedFormAgreesWithLinearSolve) {
  for (const std::string name : {"trivial", "vec_z2", "vec_z3", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    auto hs = solve_haar(W);
    EXPECT_LT((hs.lambda - W.haar).cwiseAbs().maxCoeff(), 1e-7) << name;
    EXPECT_LT(hs.residual, 1e-9) << name;
    EXPECT_LT((multiply(W, W.haar, W.haar) - W.haar).cwiseAbs().maxCoeff(), 1e-8) << name;
  }
}

TEST(TubeAlgebra, DoubleDualIsIdentity) {
  auto W = build_tube_algebra(fibonacci_category());
  W.haar_dual = solve_dual_haar(W).lambda;
  auto DD = dualize(dualize(W));
  EXPECT_EQ(DD.dim, W.dim);
  EXPECT_LT(DD.mult.max_abs_diff(W.mult), 1e-15);
  EXPECT_LT(DD.comult.max_abs_diff(W.comult), 1e-15);
  EXPECT_LT((DD.unit - W.unit).norm(), 1e-15);
  EXPECT_LT((DD.counit - W.counit).norm(), 1e-15);
  EXPECT_LT((MatC(DD.antipode) - MatC(W.antipode)).norm(), 1e-15);
  EXPECT_LT((DD.haar - W.haar).norm(), 1e-15);
}
