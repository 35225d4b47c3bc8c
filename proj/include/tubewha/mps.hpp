#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "decompose.hpp"
#include "lattice.hpp"
#include "wha.hpp"

namespace tubewha {

// Sparse tensor with named legs, all of the algebra dimension.
// Entry keys pack leg indices little-endian in base dim.
struct NamedTensor {
  std::vector<std::string> legs;
  uint64_t dim = 0;
  std::unordered_map<uint64_t, cplx> data;

  int rank() const { return int(legs.size()); }
  int leg(const std::string& name) const {
    for (size_t i = 0; i < legs.size(); ++i)
      if (legs[i] == name) return int(i);
    return -1;
  }
  std::vector<int> unpack(uint64_t key) const {
    std::vector<int> d(legs.size());
    for (auto& x : d) {
      x = int(key % dim);
      key /= dim;
    }
    return d;
  }
  uint64_t pack(const std::vector<int>& d) const {
    uint64_t k = 0, p = 1;
    for (int x : d) {
      k += uint64_t(x) * p;
      p *= dim;
    }
    return k;
  }
  double norm() const {
    double t = 0.0;
    for (const auto& kv : data) t += std::norm(kv.second);
    return std::sqrt(t);
  }
  NamedTensor renamed(const std::vector<std::string>& names) const {
    NamedTensor t = *this;
    t.legs = names;
    return t;
  }
};

// Contracts all legs with equal names (hash join on the shared legs).
inline NamedTensor contract(const NamedTensor& a, const NamedTensor& b) {
  if (a.dim != b.dim) throw InputError("contract: leg dimension mismatch");
  std::vector<int> sa, sb, ra, rb;
  for (int i = 0; i < a.rank(); ++i) {
    int j = b.leg(a.legs[size_t(i)]);
    if (j >= 0) {
      sa.push_back(i);
      sb.push_back(j);
    } else {
      ra.push_back(i);
    }
  }
  for (int j = 0; j < b.rank(); ++j)
    if (a.leg(b.legs[size_t(j)]) < 0) rb.push_back(j);
  NamedTensor out;
  out.dim = a.dim;
  for (int i : ra) out.legs.push_back(a.legs[size_t(i)]);
  for (int j : rb) out.legs.push_back(b.legs[size_t(j)]);
  double bits = double(out.legs.size()) * std::log2(double(std::max<uint64_t>(out.dim, 2)));
  if (bits > 63.0) throw InputError("contract: intermediate tensor too large to index");

  auto project = [&](const std::vector<int>& d, const std::vector<int>& which) {
    uint64_t k = 0, p = 1;
    for (int i : which) {
      k += uint64_t(d[size_t(i)]) * p;
      p *= a.dim;
    }
    return k;
  };
  std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, cplx>>> index;
  for (const auto& [key, v] : b.data) {
    auto d = b.unpack(key);
    index[project(d, sb)].push_back({project(d, rb), v});
  }
  uint64_t shift = 1;
  for (size_t i = 0; i < ra.size(); ++i) shift *= a.dim;
  for (const auto& [key, v] : a.data) {
    auto d = a.unpack(key);
    auto it = index.find(project(d, sa));
    if (it == index.end()) continue;
    uint64_t left = project(d, ra);
    for (const auto& [rk, w] : it->second) out.data[left + rk * shift] += v * w;
  }
  for (auto it = out.data.begin(); it != out.data.end();)
    it = std::abs(it->second) < 1e-15 ? out.data.erase(it) : std::next(it);
  return out;
}

// The three local tensors.
//   boundary_edge (phys, bond)              = Delta(lambda): phys lambda_(2), bond lambda_(1)
//   bulk_edge     (phys, left, right)       = Delta_2(lambda): phys lambda_(2), left lambda_(3), right lambda_(1)
//   face_glue     (top, right, left)        = Lambda_(1) on left, Lambda_(2) on top, S^-1(Lambda_(3)) on right
// The marked (S-decorated) leg of face_glue pairs with the left bond of the
// bulk edge to its right.
struct LocalTensors {
  NamedTensor boundary_edge, bulk_edge, face_glue;
  std::string face_marked_leg = "right";
};

inline LocalTensors local_tensors(const WeakHopfAlgebra& W, const VecC& lambda, const VecC& Lambda) {
  const int n = W.dim;
  const uint64_t d = uint64_t(n);
  LocalTensors t;
  t.boundary_edge.legs = {"phys", "bond"};
  t.bulk_edge.legs = {"phys", "left", "right"};
  t.face_glue.legs = {"top", "right", "left"};
  for (NamedTensor* x : {&t.boundary_edge, &t.bulk_edge, &t.face_glue}) x->dim = d;

  for (const auto& [key, c] : comultiply(W, lambda)) {
    uint64_t a = key / d, b = key % d;  // a = lambda_(1), b = lambda_(2)
    if (std::abs(c) > 1e-15) t.boundary_edge.data[b + a * d] += c;
  }
  for (const auto& [key, c] : comultiply2(W, lambda)) {
    uint64_t a = key / (d * d), b = (key / d) % d, e = key % d;
    if (std::abs(c) > 1e-15) t.bulk_edge.data[b + e * d + a * d * d] += c;
  }
  // Delta_2(Lambda)(x_a, x_b, x_c) = Lambda(x_a x_b x_c); then S^-1 on the third leg.
  MatC Sc = MatC(W.antipode);
  Eigen::FullPivLU<MatC> lu(Sc);
  if (!lu.isInvertible()) throw ValidationError("antipode matrix is singular");
  MatC T = lu.inverse().transpose();  // dual S^-1 on functional coefficients
  const size_t nz = static_cast<size_t>(n);
  std::vector<std::vector<std::pair<int, cplx>>> Tcols(nz), ab(nz * nz);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      if (std::abs(T(r, c)) > 1e-14) Tcols[size_t(c)].push_back({r, T(r, c)});
  for (int a = 0; a < n; ++a)
    for (size_t p = W.mult.ptr[size_t(a)]; p < W.mult.ptr[size_t(a) + 1]; ++p)
      ab[size_t(a) * size_t(n) + size_t(W.mult.j[p])].push_back({W.mult.k[p], W.mult.v[p]});
  std::vector<cplx> m3(size_t(n) * size_t(n) * size_t(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (const auto& [q, v] : ab[size_t(a) * size_t(n) + size_t(b)])
        for (size_t p = W.mult.ptr[size_t(q)]; p < W.mult.ptr[size_t(q) + 1]; ++p)
          m3[(size_t(a) * size_t(n) + size_t(b)) * size_t(n) + size_t(W.mult.j[p])] += v * W.mult.v[p] * Lambda[W.mult.k[p]];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        cplx v = m3[(size_t(a) * size_t(n) + size_t(b)) * size_t(n) + size_t(c)];
        if (v == cplx(0.0)) continue;
        // coefficient vector in leg 3 transforms as new = T * old
        for (const auto& [r, tv] : Tcols[size_t(c)]) {
          uint64_t key = uint64_t(b) + uint64_t(r) * d + uint64_t(a) * d * d;
          t.face_glue.data[key] += tv * v;
        }
      }
  for (NamedTensor* x : {&t.boundary_edge, &t.bulk_edge, &t.face_glue})
    for (auto it = x->data.begin(); it != x->data.end();)
      it = std::abs(it->second) < 1e-15 ? x->data.erase(it) : std::next(it);
  return t;
}

enum class ContractionPlan { left_to_right, right_to_left };

// Tensor-network ground state on a cluster lattice. Physical legs are the
// symmetry edges t_i and vertical edges v_i; open chains close the free
// end bonds of the outer bulk edges with the counit.
struct TensorNetwork {
  std::vector<NamedTensor> tensors;
  std::vector<std::string> physical;  // lattice edge order
};

inline TensorNetwork build_network(const LadderLattice& lat, const LocalTensors& lt, const VecC& counit) {
  if (lat.model != Model::cluster) throw InputError("tensor-network state is built for the cluster model only");
  TensorNetwork tn;
  const int n = lat.n, nv = lat.nv;
  auto s = [](const char* p, int i) { return std::string(p) + std::to_string(i); };
  auto vidx = [&](int i) { return lat.bc == Boundary::periodic ? ((i % nv) + nv) % nv : i; };
  for (int i = 0; i < n; ++i) tn.physical.push_back(s("t", i));
  for (int i = 0; i < nv; ++i) tn.physical.push_back(s("v", i));
  // Bond names: "b<i>" top i to face i; "l<i>"/"r<i>" left/right bonds of vertical i.
  for (int i = 0; i < n; ++i) {
    tn.tensors.push_back(lt.boundary_edge.renamed({s("t", i), s("b", i)}));
    tn.tensors.push_back(lt.face_glue.renamed({s("b", i), s("l", vidx(i + 1)), s("r", vidx(i))}));
  }
  for (int i = 0; i < nv; ++i) tn.tensors.push_back(lt.bulk_edge.renamed({s("v", i), s("l", i), s("r", i)}));
  if (lat.bc == Boundary::open) {
    NamedTensor cl, cr;
    cl.dim = cr.dim = lt.bulk_edge.dim;
    cl.legs = {s("l", 0)};
    cr.legs = {s("r", nv - 1)};
    for (int i = 0; i < counit.size(); ++i)
      if (std::abs(counit[i]) > 1e-15) {
        cl.data[uint64_t(i)] = counit[i];
        cr.data[uint64_t(i)] = counit[i];
      }
    tn.tensors.push_back(cl);
    tn.tensors.push_back(cr);
  }
  return tn;
}

struct ContractedState {
  State state;              // unnormalized, lattice codec order
  double raw_norm = 0.0;
  size_t max_intermediate = 0;
};

// Contracts the network site by site in the chosen direction.
inline ContractedState contract_network(const TensorNetwork& tn, const LadderLattice& lat, ContractionPlan plan,
                                        size_t max_entries = 50000000) {
  // Group tensors per plaquette column so sweeps keep the bond frontier small.
  const int n = lat.n, nv = lat.nv;
  std::vector<int> order;
  // tensors: [top0, face0, top1, face1, ...], verticals, then closures
  auto top = [&](int i) { return 2 * i; };
  auto face = [&](int i) { return 2 * i + 1; };
  auto vert = [&](int i) { return 2 * n + i; };
  const bool open = lat.bc == Boundary::open;
  if (plan == ContractionPlan::left_to_right) {
    if (open) order.push_back(2 * n + nv);
    order.push_back(vert(0));
    for (int i = 0; i < n; ++i) {
      order.push_back(top(i));
      order.push_back(face(i));
      if (i + 1 < nv) order.push_back(vert(i + 1));
    }
    if (open) order.push_back(2 * n + nv + 1);
  } else {
    if (open) order.push_back(2 * n + nv + 1);
    order.push_back(vert(nv - 1));
    for (int i = n - 1; i >= 0; --i) {
      order.push_back(face(i));
      order.push_back(top(i));
      if (i != nv - 1) order.push_back(vert(i));
    }
    if (open) order.push_back(2 * n + nv);
  }
  ContractedState cs;
  NamedTensor acc = tn.tensors[size_t(order[0])];
  for (size_t q = 1; q < order.size(); ++q) {
    acc = contract(acc, tn.tensors[size_t(order[q])]);
    cs.max_intermediate = std::max(cs.max_intermediate, acc.data.size());
    if (acc.data.size() > max_entries) throw InputError("contraction exceeds the entry budget");
  }
  std::vector<int> pos;
  for (const auto& p : tn.physical) {
    int l = acc.leg(p);
    if (l < 0) throw ValidationError("contraction lost physical leg " + p);
    pos.push_back(l);
  }
  if (acc.rank() != int(tn.physical.size())) throw ValidationError("contraction left open bonds");
  ConfigCodec cc(int(acc.dim), lat.num_edges());
  for (const auto& [key, v] : acc.data) {
    auto d = acc.unpack(key);
    uint64_t k = 0;
    for (size_t e = 0; e < pos.size(); ++e) k = cc.set(k, int(e), d[size_t(pos[e])]);
    cs.state[k] += v;
  }
  prune(cs.state, 1e-15);
  cs.raw_norm = norm(cs.state);
  return cs;
}

// Irreducible representation matrices Gamma(x_j) for one Wedderburn block,
// realized on a minimal left ideal inside A e.
struct Representation {
  int dim = 0;
  std::vector<MatC> gamma;  // per basis element
  double homomorphism_residual = 0.0;
  double character_residual = 0.0;
};

inline Representation irreducible_representation(const WeakHopfAlgebra& W, const CharacterTable& ct, int block,
                                                 uint64_t seed = 5) {
  if (block < 0 || block >= ct.center_dim()) throw InputError("block index out of range");
  const int n = W.dim, m = ct.block_dims[size_t(block)];
  const VecC& e = ct.idempotents[size_t(block)];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G;
  VecC r(n);
  for (int i = 0; i < n; ++i) r[i] = cplx(G(rng), G(rng));
  VecC c = multiply(W, multiply(W, e, r), e);
  // Basis of A e, then right multiplication by c restricted to it.
  MatC Ae(n, n);
  for (int i = 0; i < n; ++i) Ae.col(i) = multiply(W, basis_vector(n, i), e);
  Eigen::ColPivHouseholderQR<MatC> qr(Ae);
  qr.setThreshold(1e-9);
  const Eigen::Index rk = qr.rank();
  MatC Q = MatC(qr.householderQ()).leftCols(rk);
  MatC Rc = MatC(right_mult_matrix(W, c));
  MatC R = Q.adjoint() * Rc * Q;
  Eigen::ComplexEigenSolver<MatC> es(R);
  // Group eigenvalues; pick the cluster whose size equals m.
  Representation rep;
  rep.dim = m;
  std::vector<Eigen::Index> idx(static_cast<size_t>(rk));
  std::iota(idx.begin(), idx.end(), 0);
  const auto& ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  MatC V;
  for (Eigen::Index a = 0; a < rk && V.size() == 0; ++a) {
    std::vector<Eigen::Index> cl;
    for (Eigen::Index b = 0; b < rk; ++b)
      if (std::abs(ev[b] - ev[a]) < 1e-6 * scale) cl.push_back(b);
    if (int(cl.size()) != m) continue;
    MatC K = R - ev[a] * MatC::Identity(rk, rk);
    Eigen::JacobiSVD<MatC> svd(K, Eigen::ComputeFullV);
    V = Q * svd.matrixV().rightCols(m);
  }
  if (V.size() == 0) throw ValidationError("no eigenspace of the block's dimension; retry with another seed");
  Eigen::CompleteOrthogonalDecomposition<MatC> pinv(V);
  MatC Vp = pinv.pseudoInverse();
  rep.gamma.resize(size_t(n));
  for (int j = 0; j < n; ++j) rep.gamma[size_t(j)] = Vp * MatC(left_mult_matrix(W, basis_vector(n, j))) * V;
  // Homomorphism and character checks on the basis.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto [lo, hi] = W.mult.range(a, b);
      MatC prod = MatC::Zero(m, m);
      for (size_t p = lo; p < hi; ++p) prod += W.mult.v[p] * rep.gamma[size_t(W.mult.k[p])];
      rep.homomorphism_residual =
          std::max(rep.homomorphism_residual, (rep.gamma[size_t(a)] * rep.gamma[size_t(b)] - prod).cwiseAbs().maxCoeff());
    }
  for (int j = 0; j < n; ++j)
    rep.character_residual =
        std::max(rep.character_residual, std::abs(rep.gamma[size_t(j)].trace() - ct.characters[size_t(block)][j]));
  return rep;
}

// Matrix-product symmetry operator on k edges:
//   W_Gamma |h_1..h_k> = tr(Gamma(h_1(2)) ... Gamma(h_k(2))) |h_1(1) .. h_k(1)>.
inline State apply_symmetry_mpo(const WeakHopfAlgebra& W, const Representation& rep, const std::vector<int>& edges,
                                const State& s, const ConfigCodec& cc) {
  State out;
  const int m = rep.dim;
  for (const auto& [key, amp] : s) {
    std::vector<int> in;
    for (int e : edges) in.push_back(cc.digit(key, e));
    std::function<void(size_t, uint64_t, const MatC&)> walk = [&](size_t q, uint64_t k, const MatC& M) {
      if (q == in.size()) {
        cplx tr = M.trace();
        if (tr != cplx(0.0)) out[k] += amp * tr;
        return;
      }
      int h = in[q];
      for (size_t p = W.comult.ptr[size_t(h)]; p < W.comult.ptr[size_t(h) + 1]; ++p)
        walk(q + 1, cc.set(k, edges[q], W.comult.j[p]), M * (W.comult.v[p] * rep.gamma[size_t(W.comult.k[p])]));
    };
    walk(0, key, MatC::Identity(m, m));
  }
  prune(out);
  return out;
}

struct MpsReport {
  std::string bc;
  int n = 0;
  double raw_norm = 0.0;
  double plan_agreement = 0.0;  // relative difference between contraction plans
  std::vector<double> stabilizer_residuals;  // per lattice term
  double max_stabilizer_residual = 0.0;
  double dense_projection_fidelity = -1.0;  // -1 when the dense oracle was skipped
  std::vector<double> mpo_vs_operator;      // per block, max over test states
  std::vector<double> mpo_eigenvalue;       // Rayleigh quotient on the ground state
  std::vector<double> mpo_variance;         // ||W psi - mu psi|| / ||psi||
  std::vector<double> rep_homomorphism;
  double max_mpo_vs_operator = 0.0;
  size_t support = 0;
  uint64_t seed = 0;
};

inline MpsReport check_mps(const LatticeModel& M, const CharacterTable& ct, uint64_t seed, int random_states = 10) {
  const auto& lat = M.lattice();
  const auto& A = M.algebra();
  const WeakHopfAlgebra& W = *A.W;
  MpsReport rep;
  rep.bc = to_string(lat.bc);
  rep.n = lat.n;
  rep.seed = seed;
  LocalTensors lt = local_tensors(W, A.lambda, A.Lambda);
  TensorNetwork tn = build_network(lat, lt, W.counit);
  ContractedState a = contract_network(tn, lat, ContractionPlan::left_to_right);
  ContractedState b = contract_network(tn, lat, ContractionPlan::right_to_left);
  rep.raw_norm = a.raw_norm;
  rep.support = a.state.size();
  rep.plan_agreement = diff_norm(a.state, b.state) / std::max(a.raw_norm, 1e-300);
  const State& psi = a.state;
  const double np = std::max(a.raw_norm, 1e-300);
  for (const auto& t : M.terms()) {
    double r = diff_norm(M.apply_term(t, psi), psi) / np;
    rep.stabilizer_residuals.push_back(r);
    rep.max_stabilizer_residual = std::max(rep.max_stabilizer_residual, r);
  }
  if (a.raw_norm < 1e-6) rep.max_stabilizer_residual = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::vector<State> states{psi};
  for (int i = 0; i < random_states; ++i) states.push_back(M.random_state(rng));
  const auto tops = lat.top_edges();
  for (int blk = 0; blk < ct.center_dim(); ++blk) {
    Representation R = irreducible_representation(W, ct, blk, seed + uint64_t(blk));
    rep.rep_homomorphism.push_back(R.homomorphism_residual);
    LocalOp wf = M.w_phi(ct.characters[size_t(blk)]);
    double worst = 0.0;
    for (const auto& s : states) {
      State x = apply_symmetry_mpo(W, R, tops, s, M.codec());
      State y = M.apply_w_phi(wf, s);
      worst = std::max(worst, diff_norm(x, y) / norm(s));
    }
    rep.mpo_vs_operator.push_back(worst);
    rep.max_mpo_vs_operator = std::max(rep.max_mpo_vs_operator, worst);
    State wpsi = apply_symmetry_mpo(W, R, tops, psi, M.codec());
    cplx mu = inner(psi, wpsi) / inner(psi, psi);
    rep.mpo_eigenvalue.push_back(mu.real());
    rep.mpo_variance.push_back(norm(axpy(wpsi, -mu, psi)) / np);
  }
  return rep;
}

// Dense-oracle check: overlap fidelity between psi and the product of all
// stabilizers applied to psi.
inline double projection_fidelity(const LatticeModel& M, const State& psi) {
  State p = M.project(psi);
  double a = norm(psi), b = norm(p);
  if (a < 1e-300 || b < 1e-300) return 0.0;
  return std::norm(inner(psi, p)) / (a * a * b * b);
}

// Local identities that imply stabilization, for algebras too large to contract.
struct LocalIdentityReport {
  double lambda_idempotent = 0.0;
  double lambda_cocommutative = 0.0;
  double Lambda_idempotent = 0.0;
  double Lambda_cocommutative = 0.0;
};

inline LocalIdentityReport local_identities(const WeakHopfAlgebra& W, const VecC& lambda, const VecC& Lambda) {
  LocalIdentityReport r;
  r.lambda_idempotent = (multiply(W, lambda, lambda) - lambda).cwiseAbs().maxCoeff();
  r.lambda_cocommutative = cocommutativity_residual(W, lambda);
  r.Lambda_idempotent = (dual_product(W, Lambda, Lambda) - Lambda).cwiseAbs().maxCoeff();
  // Lambda cocommutative in the dual: Lambda(xy) = Lambda(yx).
  double c = 0.0;
  for (int a = 0; a < W.dim; ++a)
    for (size_t p = W.mult.ptr[size_t(a)]; p < W.mult.ptr[size_t(a) + 1]; ++p) {
      int b = W.mult.j[p];
      if (b < a) continue;
      cplx xy = 0.0, yx = 0.0;
      auto [lo, hi] = W.mult.range(a, b);
      for (size_t q = lo; q < hi; ++q) xy += W.mult.v[q] * Lambda[W.mult.k[q]];
      auto [lo2, hi2] = W.mult.range(b, a);
      for (size_t q = lo2; q < hi2; ++q) yx += W.mult.v[q] * Lambda[W.mult.k[q]];
      c = std::max(c, std::abs(xy - yx));
    }
  // pairs with empty x_a x_b but nonempty x_b x_a
  for (int a = 0; a < W.dim; ++a)
    for (size_t p = W.mult.ptr[size_t(a)]; p < W.mult.ptr[size_t(a) + 1]; ++p) {
      int b = W.mult.j[p];
      auto [lo, hi] = W.mult.range(b, a);
      if (lo != hi) continue;
      cplx xy = 0.0;
      auto [l2, h2] = W.mult.range(a, b);
      for (size_t q = l2; q < h2; ++q) xy += W.mult.v[q] * Lambda[W.mult.k[q]];
      c = std::max(c, std::abs(xy));
    }
  r.Lambda_cocommutative = c;
  return r;
}

}  // namespace tubewha
