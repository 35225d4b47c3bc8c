#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "wha.hpp"

namespace tubewha {

enum class Model { cluster, ladder };
enum class Boundary { periodic, open };
enum class EdgeRole { symmetry, bulk, physical };

inline Model parse_model(const std::string& s) {
  if (s == "cluster") return Model::cluster;
  if (s == "ladder") return Model::ladder;
  throw InputError("unknown model '" + s + "' (expected cluster|ladder)");
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw InputError("unknown boundary '" + s + "' (expected periodic|open)");
}

inline std::string to_string(Model m) { return m == Model::cluster ? "cluster" : "ladder"; }
inline std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

// Two-row lattice. Edge layout: symmetry-boundary edges t_i (0..n-1),
// vertical bulk edges v_i (n..n+nv-1), then physical edges p_i for the ladder.
// Open chains carry n+1 verticals; stabilizers live on interior vertices only.
struct LadderLattice {
  int n = 1;
  Model model = Model::cluster;
  Boundary bc = Boundary::open;
  int nv = 0;
  std::vector<EdgeRole> roles;

  LadderLattice(int n_plaquettes, Model m, Boundary b) : n(n_plaquettes), model(m), bc(b) {
    if (n < 1) throw InputError("lattice needs at least one plaquette");
    if (bc == Boundary::periodic && n < 2) throw InputError("periodic lattice needs n >= 2");
    nv = bc == Boundary::periodic ? n : n + 1;
    roles.assign(size_t(n), EdgeRole::symmetry);
    roles.insert(roles.end(), size_t(nv), EdgeRole::bulk);
    if (model == Model::ladder) roles.insert(roles.end(), size_t(n), EdgeRole::physical);
  }

  int num_edges() const { return int(roles.size()); }
  int top(int i) const { return ((i % n) + n) % n; }
  int vert(int i) const { return n + (bc == Boundary::periodic ? ((i % nv) + nv) % nv : i); }
  int phys(int i) const { return n + nv + i; }

  // Symmetry-boundary vertices as (x, y, h): right top edge, left top edge, vertical.
  std::vector<std::vector<int>> vertices() const {
    std::vector<std::vector<int>> out;
    int lo = bc == Boundary::periodic ? 0 : 1;
    int hi = bc == Boundary::periodic ? n : n;
    for (int i = lo; i < hi; ++i) out.push_back({top(i), top(i - 1), vert(i)});
    return out;
  }

  // Faces as (g, y, h[, x]): right vertical, symmetry edge, left vertical, physical edge.
  std::vector<std::vector<int>> faces() const {
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i) {
      std::vector<int> f{vert(i + 1), top(i), vert(i)};
      if (model == Model::ladder) f.push_back(phys(i));
      out.push_back(f);
    }
    return out;
  }

  std::vector<int> top_edges() const {
    std::vector<int> e;
    for (int i = 0; i < n; ++i) e.push_back(i);
    return e;
  }
  std::vector<int> vertical_edges() const {
    std::vector<int> e;
    for (int i = 0; i < nv; ++i) e.push_back(n + i);
    return e;
  }
};

// Sparse many-body state over basis configurations packed in base dim.
using State = std::unordered_map<uint64_t, cplx>;

class ConfigCodec {
 public:
  ConfigCodec(int dim, int edges) : dim_(uint64_t(dim)), pow_(size_t(edges) + 1, 1) {
    double bits = double(edges) * std::log2(double(std::max(dim, 2)));
    if (bits > 63.0) throw InputError("configuration space too large to index");
    for (int e = 0; e < edges; ++e) pow_[size_t(e) + 1] = pow_[size_t(e)] * dim_;
  }
  int edges() const { return int(pow_.size()) - 1; }
  uint64_t total() const { return pow_.back(); }
  int digit(uint64_t key, int e) const { return int((key / pow_[size_t(e)]) % dim_); }
  uint64_t set(uint64_t key, int e, int v) const {
    return key - uint64_t(digit(key, e)) * pow_[size_t(e)] + uint64_t(v) * pow_[size_t(e)];
  }
  uint64_t pack(const std::vector<int>& d) const {
    uint64_t k = 0;
    for (size_t e = 0; e < d.size(); ++e) k += uint64_t(d[e]) * pow_[e];
    return k;
  }
  uint64_t dim() const { return dim_; }

 private:
  uint64_t dim_;
  std::vector<uint64_t> pow_;
};

inline double norm(const State& s) {
  double t = 0.0;
  for (const auto& kv : s) t += std::norm(kv.second);
  return std::sqrt(t);
}

inline State axpy(const State& a, cplx c, const State& b) {
  State out = a;
  for (const auto& [k, v] : b) out[k] += c * v;
  return out;
}

inline double diff_norm(const State& a, const State& b) { return norm(axpy(a, -1.0, b)); }

inline cplx inner(const State& a, const State& b) {
  cplx t = 0.0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end()) t += std::conj(v) * it->second;
  }
  return t;
}

inline void prune(State& s, double drop = 1e-14) {
  for (auto it = s.begin(); it != s.end();)
    it = std::abs(it->second) < drop ? s.erase(it) : std::next(it);
}

// Operator on k edges, generated lazily per input local configuration and
// cached. The generator receives input digits and an emitter for outputs.
class LocalOp {
 public:
  using Emit = std::function<void(const std::vector<int>&, cplx)>;
  using Gen = std::function<void(const std::vector<int>&, const Emit&)>;

  LocalOp(int arity, int dim, Gen gen) : arity_(arity), dim_(uint64_t(dim)), gen_(std::move(gen)) {}
  int arity() const { return arity_; }

  const std::vector<std::pair<uint64_t, cplx>>& column(uint64_t in) const {
    auto it = cache_.find(in);
    if (it != cache_.end()) return it->second;
    std::vector<int> d(static_cast<size_t>(arity_));
    uint64_t r = in;
    for (auto& x : d) {
      x = int(r % dim_);
      r /= dim_;
    }
    std::unordered_map<uint64_t, cplx> acc;
    gen_(d, [&](const std::vector<int>& out, cplx c) {
      uint64_t k = 0, p = 1;
      for (int x : out) {
        k += uint64_t(x) * p;
        p *= dim_;
      }
      acc[k] += c;
    });
    std::vector<std::pair<uint64_t, cplx>> col;
    for (const auto& kv : acc)
      if (std::abs(kv.second) > 1e-15) col.push_back(kv);
    std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return cache_.emplace(in, std::move(col)).first->second;
  }

  // Dense-ish sparse matrix on the local space (small dims only).
  SpMat matrix() const {
    uint64_t total = 1;
    for (int a = 0; a < arity_; ++a) total *= dim_;
    if (total > 5000000) throw InputError("local operator too large to materialize");
    std::vector<Eigen::Triplet<cplx>> t;
    for (uint64_t in = 0; in < total; ++in)
      for (const auto& [out, c] : column(in)) t.emplace_back(Eigen::Index(out), Eigen::Index(in), c);
    SpMat m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

 private:
  int arity_;
  uint64_t dim_;
  Gen gen_;
  mutable std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, cplx>>> cache_;
};

inline State apply(const LocalOp& op, const std::vector<int>& edges, const State& s, const ConfigCodec& cc) {
  State out;
  const uint64_t dim = cc.dim();
  for (const auto& [key, amp] : s) {
    uint64_t in = 0, p = 1, base = key;
    for (int e : edges) {
      int d = cc.digit(key, e);
      in += uint64_t(d) * p;
      p *= dim;
      base = cc.set(base, e, 0);
    }
    for (const auto& [o, c] : op.column(in)) {
      uint64_t k = base, r = o;
      for (int e : edges) {
        k = cc.set(k, e, int(r % dim));
        r /= dim;
      }
      out[k] += amp * c;
    }
  }
  prune(out);
  return out;
}

// Precomputed algebra data shared by all lattice operators.
struct LatticeAlgebra {
  const WeakHopfAlgebra* W = nullptr;
  VecC lambda, Lambda;
  std::vector<std::vector<std::pair<int, cplx>>> S_cols;     // S(x_i)
  std::vector<std::vector<std::pair<int, cplx>>> Sinv_cols;  // S^{-1}(x_i)
  double antipode_condition = 0.0;

  LatticeAlgebra(const WeakHopfAlgebra& w, VecC lam, VecC Lam) : W(&w), lambda(std::move(lam)), Lambda(std::move(Lam)) {
    const int n = w.dim;
    S_cols.resize(size_t(n));
    for (int c = 0; c < n; ++c)
      for (SpMat::InnerIterator it(w.antipode, c); it; ++it) S_cols[size_t(c)].push_back({int(it.row()), it.value()});
    MatC S = MatC(w.antipode);
    Eigen::FullPivLU<MatC> lu(S);
    if (!lu.isInvertible()) throw ValidationError("antipode matrix is singular");
    MatC Si = lu.inverse();
    Eigen::JacobiSVD<MatC> svd(S);
    const auto& sv = svd.singularValues();
    antipode_condition = sv[0] / sv[sv.size() - 1];
    Sinv_cols.resize(size_t(n));
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r)
        if (std::abs(Si(r, c)) > 1e-14) Sinv_cols[size_t(c)].push_back({r, Si(r, c)});
  }
  int dim() const { return W->dim; }

  // Sparse vector helpers.
  using SVec = std::vector<std::pair<int, cplx>>;
  SVec basis_times(int x, const SVec& y) const {  // x_x * y
    std::map<int, cplx> acc;
    for (const auto& [q, c] : y) {
      auto [lo, hi] = W->mult.range(x, q);
      for (size_t p = lo; p < hi; ++p) acc[W->mult.k[p]] += c * W->mult.v[p];
    }
    return SVec(acc.begin(), acc.end());
  }
  SVec times(const SVec& x, const SVec& y) const {
    std::map<int, cplx> acc;
    for (const auto& [i, a] : x)
      for (const auto& [q, b] : y) {
        auto [lo, hi] = W->mult.range(i, q);
        for (size_t p = lo; p < hi; ++p) acc[W->mult.k[p]] += a * b * W->mult.v[p];
      }
    SVec out;
    for (const auto& kv : acc)
      if (std::abs(kv.second) > 1e-15) out.push_back(kv);
    return out;
  }
  static cplx pair(const VecC& psi, const SVec& x) {
    cplx t = 0.0;
    for (const auto& [i, c] : x) t += psi[i] * c;
    return t;
  }
};

// Iterated comultiplication of an element into k legs: list of (legs, coefficient).
inline std::vector<std::pair<std::vector<int>, cplx>> iterated_coproduct(const WeakHopfAlgebra& W, const VecC& x, int k) {
  std::vector<std::pair<std::vector<int>, cplx>> cur;
  for (int i = 0; i < W.dim; ++i)
    if (x[i] != cplx(0.0)) cur.push_back({{i}, x[i]});
  for (int step = 1; step < k; ++step) {
    std::map<std::vector<int>, cplx> acc;
    for (const auto& [legs, c] : cur) {
      int last = legs.back();
      for (size_t p = W.comult.ptr[size_t(last)]; p < W.comult.ptr[size_t(last) + 1]; ++p) {
        std::vector<int> nl(legs.begin(), legs.end() - 1);
        nl.push_back(W.comult.j[p]);
        nl.push_back(W.comult.k[p]);
        acc[nl] += c * W.comult.v[p];
      }
    }
    cur.clear();
    for (const auto& kv : acc)
      if (std::abs(kv.second) > 1e-15) cur.push_back(kv);
  }
  return cur;
}

// Generalized Pauli operators on one edge.
//   ->X_g |h> = |g h>,   <-X_g |h> = |h S^{-1}(g)>
//   ->Z_psi |h> = psi(h_(2)) |h_(1)>,   <-Z_psi |h> = psi(S(h_(1))) |h_(2)>
enum class Side { left, right };

inline SpMat pauli_x(const LatticeAlgebra& A, Side side, const VecC& g) {
  if (side == Side::right) return left_mult_matrix(*A.W, g);
  VecC sg = VecC::Zero(A.dim());
  for (int i = 0; i < A.dim(); ++i)
    if (g[i] != cplx(0.0))
      for (const auto& [r, c] : A.Sinv_cols[size_t(i)]) sg[r] += g[i] * c;
  return right_mult_matrix(*A.W, sg);
}

inline SpMat pauli_z(const LatticeAlgebra& A, Side side, const VecC& psi) {
  const WeakHopfAlgebra& W = *A.W;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int h = 0; h < W.dim; ++h)
    for (size_t p = W.comult.ptr[size_t(h)]; p < W.comult.ptr[size_t(h) + 1]; ++p) {
      int a = W.comult.j[p], b = W.comult.k[p];
      if (side == Side::right) {
        t.emplace_back(a, h, W.comult.v[p] * psi[b]);
      } else {
        cplx s = 0.0;
        for (const auto& [r, c] : A.S_cols[size_t(a)]) s += c * psi[r];
        t.emplace_back(b, h, W.comult.v[p] * s);
      }
    }
  SpMat m(W.dim, W.dim);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(cplx(0.0), 1e-15);
  return m;
}

// Vertex stabilizer on (x, y, h):
//   |x, y, h> -> |lambda_(3) x, y S(lambda_(1)), h S(lambda_(2))>.
// `rotation` cyclically shifts which Sweedler leg feeds which edge; rotation 0
// is the stabilizer, other values give the alternative starting links.
inline LocalOp vertex_operator(const std::shared_ptr<const LatticeAlgebra>& A, int rotation = 0) {
  auto L3 = iterated_coproduct(*A->W, A->lambda, 3);
  return LocalOp(3, A->dim(), [A, L3, rotation](const std::vector<int>& in, const LocalOp::Emit& emit) {
    const WeakHopfAlgebra& W = *A->W;
    std::vector<int> out(3);
    for (const auto& [legs, c] : L3) {
      int lx = legs[size_t((2 + rotation) % 3)], ly = legs[size_t((0 + rotation) % 3)], lh = legs[size_t((1 + rotation) % 3)];
      auto [xlo, xhi] = W.mult.range(lx, in[0]);
      if (xlo == xhi) continue;
      LatticeAlgebra::SVec ys = A->times({{in[1], 1.0}}, A->S_cols[size_t(ly)]);
      if (ys.empty()) continue;
      LatticeAlgebra::SVec hs = A->times({{in[2], 1.0}}, A->S_cols[size_t(lh)]);
      for (size_t p = xlo; p < xhi; ++p)
        for (const auto& [Y, cy] : ys)
          for (const auto& [H, ch] : hs) {
            out = {W.mult.k[p], Y, H};
            emit(out, c * W.mult.v[p] * cy * ch);
          }
    }
  });
}

// Face operator on (g, y, h[, x]):
//   |g, y, h, x> -> psi(g_(2) S(y_(1)) S(h_(1)) x_(2)) |g_(1), y_(2), h_(2), x_(1)>
// with the physical edge x present only for the ladder model (J = H, coaction = Delta).
inline LocalOp face_operator(const std::shared_ptr<const LatticeAlgebra>& A, const VecC& psi, bool with_physical) {
  auto memo = std::make_shared<std::map<std::vector<int>, cplx>>();
  int arity = with_physical ? 4 : 3;
  return LocalOp(arity, A->dim(), [A, psi, memo, arity](const std::vector<int>& in, const LocalOp::Emit& emit) {
    const WeakHopfAlgebra& W = *A->W;
    auto value = [&](const std::vector<int>& k) {
      auto it = memo->find(k);
      if (it != memo->end()) return it->second;
      LatticeAlgebra::SVec v = A->times({{k[0], 1.0}}, A->S_cols[size_t(k[1])]);
      v = A->times(v, A->S_cols[size_t(k[2])]);
      if (arity == 4) v = A->times(v, {{k[3], 1.0}});
      cplx r = LatticeAlgebra::pair(psi, v);
      memo->emplace(k, r);
      return r;
    };
    auto rows = [&](int e) { return std::make_pair(W.comult.ptr[size_t(e)], W.comult.ptr[size_t(e) + 1]); };
    auto [g0, g1] = rows(in[0]);
    auto [y0, y1] = rows(in[1]);
    auto [h0, h1] = rows(in[2]);
    size_t x0 = 0, x1 = 1;
    if (arity == 4) std::tie(x0, x1) = rows(in[3]);
    std::vector<int> key(static_cast<size_t>(arity)), out(static_cast<size_t>(arity));
    for (size_t a = g0; a < g1; ++a)
      for (size_t b = y0; b < y1; ++b)
        for (size_t c = h0; c < h1; ++c)
          for (size_t d = x0; d < x1; ++d) {
            key[0] = W.comult.k[a];
            key[1] = W.comult.j[b];
            key[2] = W.comult.j[c];
            cplx coef = W.comult.v[a] * W.comult.v[b] * W.comult.v[c];
            out[0] = W.comult.j[a];
            out[1] = W.comult.k[b];
            out[2] = W.comult.k[c];
            if (arity == 4) {
              key[3] = W.comult.k[d];
              out[3] = W.comult.j[d];
              coef *= W.comult.v[d];
            }
            cplx val = value(key);
            if (val != cplx(0.0)) emit(out, coef * val);
          }
  });
}

// W_phi = sum ->Z_{phi_(1)} (x) ... (x) ->Z_{phi_(k)} on k edges:
//   |h_1..h_k> -> phi(h_1(2) ... h_k(2)) |h_1(1) .. h_k(1)>.
inline LocalOp symmetry_operator_z(const std::shared_ptr<const LatticeAlgebra>& A, const VecC& phi, int k) {
  auto memo = std::make_shared<std::map<std::vector<int>, cplx>>();
  return LocalOp(k, A->dim(), [A, phi, memo, k](const std::vector<int>& in, const LocalOp::Emit& emit) {
    const WeakHopfAlgebra& W = *A->W;
    std::vector<size_t> pos(static_cast<size_t>(k));
    for (int e = 0; e < k; ++e) {
      pos[size_t(e)] = W.comult.ptr[size_t(in[size_t(e)])];
      if (pos[size_t(e)] == W.comult.ptr[size_t(in[size_t(e)]) + 1]) return;
    }
    std::vector<int> key(static_cast<size_t>(k)), out(static_cast<size_t>(k));
    while (true) {
      cplx coef = 1.0;
      for (int e = 0; e < k; ++e) {
        size_t p = pos[size_t(e)];
        out[size_t(e)] = W.comult.j[p];
        key[size_t(e)] = W.comult.k[p];
        coef *= W.comult.v[p];
      }
      auto it = memo->find(key);
      cplx val;
      if (it != memo->end()) {
        val = it->second;
      } else {
        LatticeAlgebra::SVec v{{key[0], 1.0}};
        for (int e = 1; e < k; ++e) v = A->times(v, {{key[size_t(e)], 1.0}});
        val = LatticeAlgebra::pair(phi, v);
        memo->emplace(key, val);
      }
      if (val != cplx(0.0)) emit(out, coef * val);
      int e = k - 1;
      for (; e >= 0; --e) {
        if (++pos[size_t(e)] < W.comult.ptr[size_t(in[size_t(e)]) + 1]) break;
        pos[size_t(e)] = W.comult.ptr[size_t(in[size_t(e)])];
      }
      if (e < 0) break;
    }
  });
}

// W_h = sum ->X_{h_(1)} (x) ... (x) ->X_{h_(k)} on k edges.
inline LocalOp symmetry_operator_x(const std::shared_ptr<const LatticeAlgebra>& A, const VecC& h, int k) {
  auto terms = iterated_coproduct(*A->W, h, k);
  return LocalOp(k, A->dim(), [A, terms, k](const std::vector<int>& in, const LocalOp::Emit& emit) {
    const WeakHopfAlgebra& W = *A->W;
    std::vector<int> out(static_cast<size_t>(k));
    for (const auto& [legs, c] : terms) {
      std::vector<std::pair<size_t, size_t>> r(static_cast<size_t>(k));
      bool empty = false;
      for (int e = 0; e < k && !empty; ++e) {
        r[size_t(e)] = W.mult.range(legs[size_t(e)], in[size_t(e)]);
        empty = r[size_t(e)].first == r[size_t(e)].second;
      }
      if (empty) continue;
      std::vector<size_t> pos(static_cast<size_t>(k));
      for (int e = 0; e < k; ++e) pos[size_t(e)] = r[size_t(e)].first;
      while (true) {
        cplx coef = c;
        for (int e = 0; e < k; ++e) {
          out[size_t(e)] = W.mult.k[pos[size_t(e)]];
          coef *= W.mult.v[pos[size_t(e)]];
        }
        emit(out, coef);
        int e = k - 1;
        for (; e >= 0; --e) {
          if (++pos[size_t(e)] < r[size_t(e)].second) break;
          pos[size_t(e)] = r[size_t(e)].first;
        }
        if (e < 0) break;
      }
    }
  });
}

struct Term {
  std::string name;
  std::shared_ptr<const LocalOp> op;
  std::vector<int> edges;
};

// Lattice model with its stabilizer terms. H = -sum A_v - sum B_f.
class LatticeModel {
 public:
  LatticeModel(const LadderLattice& lat, std::shared_ptr<const LatticeAlgebra> A)
      : lat_(lat), A_(std::move(A)), codec_(A_->dim(), lat.num_edges()) {
    auto av = std::make_shared<const LocalOp>(vertex_operator(A_));
    auto bf = std::make_shared<const LocalOp>(face_operator(A_, A_->Lambda, lat.model == Model::ladder));
    int i = 0;
    for (const auto& v : lat.vertices()) terms_.push_back({"A_v" + std::to_string(i++), av, v});
    i = 0;
    for (const auto& f : lat.faces()) terms_.push_back({"B_f" + std::to_string(i++), bf, f});
  }

  const LadderLattice& lattice() const { return lat_; }
  const LatticeAlgebra& algebra() const { return *A_; }
  std::shared_ptr<const LatticeAlgebra> algebra_ptr() const { return A_; }
  const ConfigCodec& codec() const { return codec_; }
  const std::vector<Term>& terms() const { return terms_; }

  State apply_term(const Term& t, const State& s) const { return apply(*t.op, t.edges, s, codec_); }

  State apply_hamiltonian(const State& s) const {
    State out;
    for (const auto& t : terms_)
      for (const auto& [k, v] : apply_term(t, s)) out[k] -= v;
    prune(out);
    return out;
  }

  // W_phi on the symmetry-boundary edges; open chains use the truncated string.
  LocalOp w_phi(const VecC& phi) const { return symmetry_operator_z(A_, phi, lat_.n); }
  State apply_w_phi(const LocalOp& w, const State& s) const { return apply(w, lat_.top_edges(), s, codec_); }
  // W_h on the vertical edges.
  LocalOp w_h(const VecC& h) const { return symmetry_operator_x(A_, h, lat_.nv); }
  State apply_w_h(const LocalOp& w, const State& s) const { return apply(w, lat_.vertical_edges(), s, codec_); }

  // Random sparse state: `configs` random basis configurations with Gaussian amplitudes.
  State random_state(std::mt19937_64& rng, int configs = 8) const {
    std::uniform_int_distribution<int> U(0, A_->dim() - 1);
    std::normal_distribution<double> G;
    State s;
    for (int c = 0; c < configs; ++c) {
      uint64_t k = 0;
      for (int e = 0; e < lat_.num_edges(); ++e) k = codec_.set(k, e, U(rng));
      s[k] += cplx(G(rng), G(rng));
    }
    return s;
  }

  // Product state with the algebra unit on every edge.
  State unit_state() const {
    const VecC& u = A_->W->unit;
    std::vector<std::pair<int, cplx>> comps;
    for (int i = 0; i < A_->dim(); ++i)
      if (std::abs(u[i]) > 1e-14) comps.push_back({i, u[i]});
    State s{{0, 1.0}};
    for (int e = 0; e < lat_.num_edges(); ++e) {
      State next;
      for (const auto& [k, v] : s)
        for (const auto& [i, c] : comps) next[codec_.set(k, e, i)] += v * c;
      s = std::move(next);
    }
    return s;
  }

  // Product of all stabilizers applied to s.
  State project(const State& s) const {
    State g = s;
    for (const auto& t : terms_) g = apply_term(t, g);
    return g;
  }

 private:
  LadderLattice lat_;
  std::shared_ptr<const LatticeAlgebra> A_;
  ConfigCodec codec_;
  std::vector<Term> terms_;
};

struct LatticeReport {
  std::string model, bc;
  int n = 0;
  int num_terms = 0;
  double projector = 0.0;       // max ||P^2 s - P s|| / ||s||
  double commutator = 0.0;      // max ||[P, Q] s|| / ||s||
  double ground_energy = 0.0;   // Rayleigh quotient of the stabilized witness
  double ground_residual = 0.0; // ||H g + #terms g|| / ||g||
  double ground_norm = 0.0;
  double link_independence = 0.0;  // vertex operator vs rotated leg assignment
  std::vector<double> character_commutators;  // ||[W_chi, H] s|| / ||s|| per character
  double w_lambda_commutator = 0.0;
  double negative_control = 0.0;
  double w_phi_algebra = 0.0;   // ||W_psi W_phi - W_{psi phi}||
  double w_h_algebra = 0.0;     // ||W_h W_g - W_{hg}||
  double w_unit_law = 0.0;      // ||W_1 W_psi - W_psi||
  int test_states = 0;
  bool dense_state = false;  // a random state with full support was included
  uint64_t seed = 0;
};

// Product in the dual algebra: (psi phi)(x) = psi(x_(1)) phi(x_(2)).
inline VecC dual_product(const WeakHopfAlgebra& W, const VecC& psi, const VecC& phi) {
  VecC out = VecC::Zero(W.dim);
  for (int i = 0; i < W.dim; ++i)
    for (size_t p = W.comult.ptr[size_t(i)]; p < W.comult.ptr[size_t(i) + 1]; ++p)
      out[i] += W.comult.v[p] * psi[W.comult.j[p]] * phi[W.comult.k[p]];
  return out;
}

inline double commutator_norm(const std::function<State(const State&)>& X,
                              const std::function<State(const State&)>& Y, const State& s) {
  return diff_norm(X(Y(s)), Y(X(s))) / norm(s);
}

// Runs the lattice invariant suite on random sparse test states.
inline LatticeReport check_lattice(const LatticeModel& M, const std::vector<VecC>& characters, uint64_t seed,
                                   int num_states = 4, uint64_t dense_budget = 0) {
  LatticeReport rep;
  const auto& lat = M.lattice();
  const WeakHopfAlgebra& W = *M.algebra().W;
  rep.model = to_string(lat.model);
  rep.bc = to_string(lat.bc);
  rep.n = lat.n;
  rep.num_terms = int(M.terms().size());
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::vector<State> states;
  for (int i = 0; i < num_states; ++i) states.push_back(M.random_state(rng));
  if (M.codec().total() <= dense_budget) {
    std::normal_distribution<double> N01;
    State d;
    for (uint64_t k = 0; k < M.codec().total(); ++k) d[k] = cplx(N01(rng), N01(rng));
    states.push_back(std::move(d));
    rep.dense_state = true;
  }
  // Stabilized witness: the projected unit product state, else projected random states.
  State g = M.project(M.unit_state());
  for (int attempt = 0; attempt < 64 && norm(g) < 1e-8; ++attempt) g = M.project(M.random_state(rng, 4));
  rep.ground_norm = norm(g);
  if (rep.ground_norm > 1e-8) states.push_back(g);
  rep.test_states = int(states.size());

  auto H = [&](const State& s) { return M.apply_hamiltonian(s); };
  for (const auto& s : states) {
    double ns = norm(s);
    for (const auto& t : M.terms()) {
      State p = M.apply_term(t, s);
      rep.projector = std::max(rep.projector, diff_norm(M.apply_term(t, p), p) / ns);
    }
    for (size_t a = 0; a < M.terms().size(); ++a)
      for (size_t b = a + 1; b < M.terms().size(); ++b) {
        const Term& ta = M.terms()[a];
        const Term& tb = M.terms()[b];
        rep.commutator = std::max(rep.commutator, diff_norm(M.apply_term(ta, M.apply_term(tb, s)),
                                                            M.apply_term(tb, M.apply_term(ta, s))) / ns);
      }
  }
  if (rep.ground_norm > 1e-8) {
    State hg = H(g);
    rep.ground_energy = (inner(g, hg) / inner(g, g)).real();
    rep.ground_residual = norm(axpy(hg, double(rep.num_terms), g)) / rep.ground_norm;
  } else {
    rep.ground_energy = std::numeric_limits<double>::quiet_NaN();
    rep.ground_residual = std::numeric_limits<double>::infinity();
  }
  // Starting-link independence of the vertex operator.
  {
    auto A = M.algebra_ptr();
    LocalOp v0 = vertex_operator(A, 0), v1 = vertex_operator(A, 1), v2 = vertex_operator(A, 2);
    ConfigCodec cc(A->dim(), 3);
    for (const auto& s0 : states) {
      State s;
      for (const auto& [k, v] : s0) s[k % cc.total()] += v;
      double ns = std::max(norm(s), 1e-300);
      State r0 = apply(v0, {0, 1, 2}, s, cc);
      rep.link_independence = std::max({rep.link_independence, diff_norm(r0, apply(v1, {0, 1, 2}, s, cc)) / ns,
                                        diff_norm(r0, apply(v2, {0, 1, 2}, s, cc)) / ns});
    }
  }
  // Symmetry operators.
  for (const auto& chi : characters) {
    LocalOp w = M.w_phi(chi);
    double worst = 0.0;
    for (const auto& s : states)
      worst = std::max(worst, commutator_norm([&](const State& x) { return M.apply_w_phi(w, x); }, H, s));
    rep.character_commutators.push_back(worst);
  }
  {
    LocalOp wl = M.w_h(M.algebra().lambda);
    for (const auto& s : states)
      rep.w_lambda_commutator = std::max(
          rep.w_lambda_commutator, commutator_norm([&](const State& x) { return M.apply_w_h(wl, x); }, H, s));
  }
  std::normal_distribution<double> G;
  auto random_vec = [&]() {
    VecC v(W.dim);
    for (int i = 0; i < W.dim; ++i) v[i] = cplx(G(rng), G(rng));
    return v;
  };
  {
    VecC psi = random_vec();
    LocalOp w = M.w_phi(psi);
    for (const auto& s : states)
      rep.negative_control = std::max(
          rep.negative_control, commutator_norm([&](const State& x) { return M.apply_w_phi(w, x); }, H, s));
  }
  {
    VecC psi = random_vec(), phi = random_vec();
    LocalOp wp = M.w_phi(psi), wf = M.w_phi(phi), wpf = M.w_phi(dual_product(W, psi, phi));
    LocalOp w1 = M.w_phi(W.counit);
    VecC hx = random_vec(), gx = random_vec();
    LocalOp wh = M.w_h(hx), wg = M.w_h(gx), whg = M.w_h(multiply(W, hx, gx));
    for (const auto& s : states) {
      double ns = norm(s);
      State a = M.apply_w_phi(wf, s);
      rep.w_phi_algebra = std::max(rep.w_phi_algebra, diff_norm(M.apply_w_phi(wp, a), M.apply_w_phi(wpf, s)) / ns);
      State b = M.apply_w_phi(wp, s);
      rep.w_unit_law = std::max(rep.w_unit_law, diff_norm(M.apply_w_phi(w1, b), b) / ns);
      State c = M.apply_w_h(wg, s);
      rep.w_h_algebra = std::max(rep.w_h_algebra, diff_norm(M.apply_w_h(wh, c), M.apply_w_h(whg, s)) / ns);
    }
  }
  return rep;
}

}  // namespace tubewha
