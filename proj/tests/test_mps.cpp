#include <gtest/gtest.h>

#include "tubewha/builtins.hpp"
#include "tubewha/decompose.hpp"
#include "tubewha/mps.hpp"
#include "tubewha/tube.hpp"

using namespace tubewha;

namespace {

struct Setup {
  WeakHopfAlgebra W;
  std::shared_ptr<const LatticeAlgebra> A;
  CharacterTable ct;
};

Setup make(const std::string& name) {
  Setup s;
  s.W = build_tube_algebra(builtin(name));
  s.W.haar_dual = solve_dual_haar(s.W).lambda;
  s.A = std::make_shared<const LatticeAlgebra>(s.W, s.W.haar, s.W.haar_dual);
  s.ct = irreducible_characters(s.W);
  return s;
}

NamedTensor from_matrix(const MatC& m, const std::string& row, const std::string& col) {
  NamedTensor t;
  t.legs = {row, col};
  t.dim = uint64_t(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != cplx(0.0)) t.data[t.pack({int(i), int(j)})] = m(i, j);
  return t;
}

}  // namespace

TEST(Mps, ContractMatchesMatrixProduct) {
  MatC a = MatC::Random(3, 3), b = MatC::Random(3, 3);
  NamedTensor c = contract(from_matrix(a, "i", "k"), from_matrix(b, "k", "j"));
  MatC ab = a * b;
  ASSERT_EQ(c.rank(), 2);
  int li = c.leg("i"), lj = c.leg("j");
  ASSERT_GE(li, 0);
  ASSERT_GE(lj, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::vector<int> d(2);
      d[size_t(li)] = i;
      d[size_t(lj)] = j;
      auto it = c.data.find(c.pack(d));
      cplx v = it == c.data.end() ? cplx(0.0) : it->second;
      EXPECT_LT(std::abs(v - ab(i, j)), 1e-12);
    }
  // Full contraction gives a scalar.
  NamedTensor s = contract(from_matrix(a, "i", "j"), from_matrix(b, "i", "j"));
  EXPECT_EQ(s.rank(), 0);
  EXPECT_LT(std::abs(s.data[0] - (a.array() * b.array()).sum()), 1e-12);
}

TEST(Mps, BoundaryTensorIsComultipliedHaar) {
  auto s = make("fibonacci");
  auto lt = local_tensors(s.W, s.W.haar, s.W.haar_dual);
  MatC D = comultiply_dense(s.W, s.W.haar);  // D(a, b): lambda_(1) = a, lambda_(2) = b
  for (int a = 0; a < s.W.dim; ++a)
    for (int b = 0; b < s.W.dim; ++b) {
      auto it = lt.boundary_edge.data.find(lt.boundary_edge.pack({b, a}));
      cplx v = it == lt.boundary_edge.data.end() ? cplx(0.0) : it->second;
      EXPECT_LT(std::abs(v - D(a, b)), 1e-14);
    }
}

TEST(Mps, GroundStateStabilizedAndMatchesProjection) {
  for (const std::string name : {"vec_z2", "fibonacci"})
    for (auto bc : {Boundary::periodic, Boundary::open}) {
      auto s = make(name);
      LatticeModel M(LadderLattice(2, Model::cluster, bc), s.A);
      auto rep = check_mps(M, s.ct, 3, 4);
      EXPECT_GT(rep.raw_norm, 1e-6) << name;
      EXPECT_LT(rep.plan_agreement, 1e-12) << name;
      EXPECT_LT(rep.max_stabilizer_residual, 1e-10) << name;
      EXPECT_LT(rep.max_mpo_vs_operator, 1e-10) << name;
      for (double h : rep.rep_homomorphism) EXPECT_LT(h, 1e-9) << name;

      auto tn = build_network(M.lattice(), local_tensors(s.W, s.W.haar, s.W.haar_dual), s.W.counit);
      auto psi = contract_network(tn, M.lattice(), ContractionPlan::left_to_right).state;
      EXPECT_GT(projection_fidelity(M, psi), 1.0 - 1e-9) << name;
    }
}

TEST(Mps, TrivialCategoryGivesProductState) {
  auto s = make("trivial");
  LatticeModel M(LadderLattice(2, Model::cluster, Boundary::periodic), s.A);
  auto rep = check_mps(M, s.ct, 1, 1);
  EXPECT_EQ(rep.support, 1u);
  EXPECT_LT(rep.max_stabilizer_residual, 1e-12);
}

TEST(Mps, LadderModelIsRejected) {
  auto s = make("vec_z2");
  EXPECT_THROW(build_network(LadderLattice(2, Model::ladder, Boundary::open),
                             local_tensors(s.W, s.W.haar, s.W.haar_dual), s.W.counit),
               InputError);
}

TEST(Mps, LocalIdentitiesForZ2) {
  auto s = make("vec_z2");
  auto r = local_identities(s.W, s.W.haar, s.W.haar_dual);
  EXPECT_LT(r.lambda_idempotent, 1e-12);
  EXPECT_LT(r.lambda_cocommutative, 1e-12);
  EXPECT_LT(r.Lambda_idempotent, 1e-12);
  EXPECT_LT(r.Lambda_cocommutative, 1e-12);
}
