#include <gtest/gtest.h>

#include "tubewha/builtins.hpp"
#include "tubewha/decompose.hpp"
#include "tubewha/tube.hpp"

using namespace tubewha;

namespace {

// max |chi(x_i x_j) - chi(x_j x_i)|
double trace_property(const WeakHopfAlgebra& W, const VecC& chi) {
  double w = 0.0;
  for (int i = 0; i < W.dim; ++i)
    for (int j = 0; j < W.dim; ++j) {
      VecC xy = multiply(W, basis_vector(W.dim, i), basis_vector(W.dim, j));
      VecC yx = multiply(W, basis_vector(W.dim, j), basis_vector(W.dim, i));
      w = std::max(w, std::abs((chi.transpose() * (xy - yx))(0)));
    }
  return w;
}

cplx pair(const VecC& chi, const VecC& x) { return (chi.transpose() * x)(0); }

}  // namespace

TEST(Decompose, BlockDimensions) {
  EXPECT_EQ(wedderburn_blocks(build_tube_algebra(builtin("trivial"))), (std::vector<int>{1}));
  EXPECT_EQ(wedderburn_blocks(build_tube_algebra(builtin("vec_z2"))), (std::vector<int>{2, 2}));
  EXPECT_EQ(wedderburn_blocks(build_tube_algebra(builtin("vec_z3"))), (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(wedderburn_blocks(build_tube_algebra(fibonacci_category())), (std::vector<int>{2, 3}));
}

TEST(Decompose, CentralIdempotentsAndCharacters) {
  for (const std::string name : {"vec_z2", "vec_z3", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    auto ct = irreducible_characters(W);
    int sum = 0;
    VecC total = VecC::Zero(W.dim);
    for (size_t a = 0; a < ct.idempotents.size(); ++a) {
      const VecC& e = ct.idempotents[a];
      total += e;
      sum += ct.block_dims[a] * ct.block_dims[a];
      for (size_t b = 0; b < ct.idempotents.size(); ++b) {
        VecC eb = multiply(W, e, ct.idempotents[b]);
        VecC expect = a == b ? e : VecC::Zero(W.dim);
        EXPECT_LT((eb - expect).cwiseAbs().maxCoeff(), 1e-9) << name;
      }
      // chi_a(1) = n_a and chi_a(e_b) = n_a delta_ab
      EXPECT_NEAR(std::abs(pair(ct.characters[a], W.unit) - double(ct.block_dims[a])), 0.0, 1e-9) << name;
      for (size_t b = 0; b < ct.idempotents.size(); ++b)
        EXPECT_NEAR(std::abs(pair(ct.characters[a], ct.idempotents[b]) - (a == b ? double(ct.block_dims[a]) : 0.0)),
                    0.0, 1e-9)
            << name;
      EXPECT_LT(trace_property(W, ct.characters[a]), 1e-9) << name;
    }
    EXPECT_EQ(sum, W.dim);
    EXPECT_LT((total - W.unit).cwiseAbs().maxCoeff(), 1e-9) << name;
    EXPECT_LT(ct.rounding_residual, 1e-6) << name;
  }
}

TEST(Decompose, CharacterFusionRingMatchesCategory) {
  for (const std::string name : {"vec_z2", "vec_z3", "fibonacci"}) {
    auto cat = builtin(name);
    auto ct = irreducible_characters(build_tube_algebra(cat));
    std::vector<int> perm;
    EXPECT_TRUE(match_fusion_ring(ct.fusion, [&](int a, int b, int c) { return cat.N(a, b, c); }, cat.rank, &perm))
        << name;
  }
}

TEST(Decompose, FusionMatchRejectsWrongRing) {
  auto ct = irreducible_characters(build_tube_algebra(fibonacci_category()));
  auto z2 = builtin("vec_z2");
  EXPECT_FALSE(match_fusion_ring(ct.fusion, [&](int a, int b, int c) { return z2.N(a, b, c); }, 2, nullptr));
}

TEST(Decompose, CharactersAreDeterministicPerSeed) {
  auto W = build_tube_algebra(fibonacci_category());
  auto a = irreducible_characters(W, 7);
  auto b = irreducible_characters(W, 7);
  ASSERT_EQ(a.characters.size(), b.characters.size());
  for (size_t i = 0; i < a.characters.size(); ++i) EXPECT_EQ((a.characters[i] - b.characters[i]).norm(), 0.0);
  auto c = irreducible_characters(W, 99);
  for (size_t i = 0; i < a.characters.size(); ++i) EXPECT_LT((a.characters[i] - c.characters[i]).norm(), 1e-8);
}

TEST(Decompose, CocommutativeSubspace) {
  for (const std::string name : {"vec_z2", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    auto s = cocommutative_subspace(W);
    EXPECT_FALSE(s.ill_conditioned) << name;
    EXPECT_GT(s.basis.cols(), 0) << name;
    EXPECT_LT((s.basis.adjoint() * s.basis - MatC::Identity(s.basis.cols(), s.basis.cols())).norm(), 1e-10);
    for (Eigen::Index c = 0; c < s.basis.cols(); ++c)
      EXPECT_LT(cocommutativity_residual(W, s.basis.col(c)), 1e-9) << name;
    for (Eigen::Index c = 0; c < s.basis.cols(); ++c) EXPECT_LT(projection_residual(s, s.basis.col(c)), 1e-12);
  }
  auto z2 = build_tube_algebra(builtin("vec_z2"));
  EXPECT_LT(cocommutativity_residual(z2, z2.haar), 1e-12);
}

TEST(Decompose, DualHaarIsNormalizedIdempotent) {
  for (const std::string name : {"vec_z2", "vec_z3", "fibonacci"}) {
    auto W = build_tube_algebra(builtin(name));
    auto hs = solve_dual_haar(W);
    EXPECT_LT(hs.residual, 1e-9) << name;
    auto D = dualize(W);
    EXPECT_LT((multiply(D, hs.lambda, hs.lambda) - hs.lambda).cwiseAbs().maxCoeff(), 1e-8) << name;
  }
}
