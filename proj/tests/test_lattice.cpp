#include <gtest/gtest.h>

#include <random>

#include "tubewha/builtins.hpp"
#include "tubewha/decompose.hpp"
#include "tubewha/lattice.hpp"
#include "tubewha/tube.hpp"

using namespace tubewha;

namespace {

struct Fixture {
  WeakHopfAlgebra W;
  std::shared_ptr<const LatticeAlgebra> A;
  CharacterTable ct;
};

Fixture make(const std::string& name) {
  Fixture f;
  f.W = build_tube_algebra(builtin(name));
  f.W.haar_dual = solve_dual_haar(f.W).lambda;
  f.A = std::make_shared<const LatticeAlgebra>(f.W, f.W.haar, f.W.haar_dual);
  f.ct = irreducible_characters(f.W);
  return f;
}

VecC random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> G;
  VecC v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(G(rng), G(rng));
  return v;
}

double dense_diff(const SpMat& a, const SpMat& b) { return (MatC(a) - MatC(b)).cwiseAbs().maxCoeff(); }

double idempotency(const SpMat& m) {
  SpMat d = SpMat(m * m) - m;
  double w = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) w = std::max(w, std::abs(it.value()));
  return w;
}

}  // namespace

TEST(Lattice, PauliXMatchesMultiplication) {
  auto f = make("fibonacci");
  std::mt19937_64 rng(1);
  VecC g = random_vec(f.W.dim, rng), h = random_vec(f.W.dim, rng);
  MatC xr = MatC(pauli_x(*f.A, Side::right, g));
  for (int i = 0; i < f.W.dim; ++i)
    EXPECT_LT((xr.col(i) - multiply(f.W, g, basis_vector(f.W.dim, i))).norm(), 1e-12);
  VecC gh = multiply(f.W, g, h);
  EXPECT_LT(dense_diff(pauli_x(*f.A, Side::right, g) * pauli_x(*f.A, Side::right, h), pauli_x(*f.A, Side::right, gh)),
            1e-10);
  EXPECT_LT(dense_diff(pauli_x(*f.A, Side::left, g) * pauli_x(*f.A, Side::left, h), pauli_x(*f.A, Side::left, gh)),
            1e-10);
}

TEST(Lattice, PauliZIsDualAlgebraHomomorphism) {
  auto f = make("fibonacci");
  std::mt19937_64 rng(2);
  VecC psi = random_vec(f.W.dim, rng), phi = random_vec(f.W.dim, rng);
  MatC zr = MatC(pauli_z(*f.A, Side::right, psi));
  for (int h = 0; h < f.W.dim; ++h) {
    MatC D = comultiply_dense(f.W, basis_vector(f.W.dim, h));
    EXPECT_LT((zr.col(h) - D * psi).norm(), 1e-12);
  }
  VecC pf = dual_product(f.W, psi, phi);
  EXPECT_LT(dense_diff(pauli_z(*f.A, Side::right, psi) * pauli_z(*f.A, Side::right, phi),
                       pauli_z(*f.A, Side::right, pf)),
            1e-10);
  EXPECT_LT(dense_diff(pauli_z(*f.A, Side::left, psi) * pauli_z(*f.A, Side::left, phi), pauli_z(*f.A, Side::left, pf)),
            1e-10);
}

TEST(Lattice, PauliUnitsAreIdentity) {
  for (const std::string name : {"vec_z2", "fibonacci"}) {
    auto f = make(name);
    SpMat I(f.W.dim, f.W.dim);
    I.setIdentity();
    EXPECT_LT(dense_diff(pauli_x(*f.A, Side::right, f.W.unit), I), 1e-12) << name;
    EXPECT_LT(dense_diff(pauli_x(*f.A, Side::left, f.W.unit), I), 1e-12) << name;
    EXPECT_LT(dense_diff(pauli_z(*f.A, Side::right, f.W.counit), I), 1e-12) << name;
    EXPECT_LT(dense_diff(pauli_z(*f.A, Side::left, f.W.counit), I), 1e-12) << name;
  }
}

TEST(Lattice, LocalStabilizersAreProjectors) {
  for (const std::string name : {"vec_z2", "fibonacci"}) {
    auto f = make(name);
    for (const auto& op : {vertex_operator(f.A), face_operator(f.A, f.A->Lambda, false)}) {
      SpMat m = op.matrix();
      EXPECT_LT(idempotency(m), 1e-10) << name;
      EXPECT_GT(m.norm(), 0.5) << name;
    }
  }
  auto z2 = make("vec_z2");
  EXPECT_LT(idempotency(face_operator(z2.A, z2.A->Lambda, true).matrix()), 1e-10);
}

TEST(Lattice, Geometry) {
  LadderLattice p(3, Model::cluster, Boundary::periodic);
  EXPECT_EQ(p.num_edges(), 6);
  EXPECT_EQ(p.vertices().size(), 3u);
  EXPECT_EQ(p.faces().size(), 3u);
  EXPECT_EQ(p.faces()[2], (std::vector<int>{3, 2, 5}));
  LadderLattice o(2, Model::ladder, Boundary::open);
  EXPECT_EQ(o.num_edges(), 2 + 3 + 2);
  EXPECT_EQ(o.vertices().size(), 1u);
  EXPECT_EQ(o.faces()[0].size(), 4u);
  EXPECT_THROW(LadderLattice(1, Model::cluster, Boundary::periodic), InputError);
  EXPECT_THROW(LadderLattice(0, Model::cluster, Boundary::open), InputError);
}

TEST(Lattice, Z2PeriodicFullSupportChecks) {
  auto f = make("vec_z2");
  LatticeModel M(LadderLattice(2, Model::cluster, Boundary::periodic), f.A);
  auto rep = check_lattice(M, f.ct.characters, 5, 4, 1u << 13);
  EXPECT_TRUE(rep.dense_state);
  EXPECT_EQ(rep.num_terms, 4);
  EXPECT_LT(rep.projector, 1e-10);
  EXPECT_LT(rep.commutator, 1e-10);
  EXPECT_NEAR(rep.ground_energy, -4.0, 1e-10);
  EXPECT_LT(rep.ground_residual, 1e-10);
  for (double c : rep.character_commutators) EXPECT_LT(c, 1e-10);
  EXPECT_LT(rep.w_lambda_commutator, 1e-10);
  EXPECT_LT(rep.link_independence, 1e-10);
  EXPECT_GT(rep.negative_control, 1e-3);
  EXPECT_LT(rep.w_phi_algebra, 1e-10);
  EXPECT_LT(rep.w_h_algebra, 1e-10);
  EXPECT_LT(rep.w_unit_law, 1e-10);
}

TEST(Lattice, FibonacciStabilizerAlgebra) {
  auto f = make("fibonacci");
  for (auto model : {Model::cluster, Model::ladder}) {
    LatticeModel M(LadderLattice(2, model, Boundary::open), f.A);
    auto rep = check_lattice(M, f.ct.characters, 9);
    EXPECT_LT(rep.projector, 1e-10);
    EXPECT_LT(rep.commutator, 1e-10);
    EXPECT_NEAR(rep.ground_energy, -double(rep.num_terms), 1e-10);
    EXPECT_LT(rep.ground_residual, 1e-10);
    EXPECT_GT(rep.negative_control, 1e-3);
    EXPECT_LT(rep.w_phi_algebra, 1e-10);
    EXPECT_LT(rep.w_h_algebra, 1e-10);
  }
}

TEST(Lattice, ReportIsDeterministic) {
  auto f = make("vec_z2");
  LatticeModel M(LadderLattice(2, Model::cluster, Boundary::open), f.A);
  auto a = check_lattice(M, f.ct.characters, 42);
  auto b = check_lattice(M, f.ct.characters, 42);
  EXPECT_EQ(a.projector, b.projector);
  EXPECT_EQ(a.negative_control, b.negative_control);
  EXPECT_EQ(a.character_commutators, b.character_commutators);
}
