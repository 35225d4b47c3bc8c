// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--known-failures FILE] [--report FILE]
//
// Without --known-failures the exit status is 0 only if every criterion
// passes. With it, the exit status is 0 only if the failing set equals the
// listed set exactly, so both regressions and newly passing criteria are
// reported as errors.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tubewha/tubewha.hpp"

using namespace tubewha;

namespace {

std::ostringstream g_log;

void say(const std::string& s) {
  std::cout << s << '\n';
  g_log << s << '\n';
}

std::string sci(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

struct Check {
  std::vector<std::string> lines;
  bool pass = true;
  void gate(bool ok, const std::string& what) {
    lines.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
    pass = pass && ok;
  }
  void info(const std::string& what) { lines.push_back("    info " + what); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Fusion table of the Haagerup category written out row by row
// (row object fused with column object), object order 1, α, α², ρ, αρ, α²ρ.
const char* const kTableI[6][6] = {
    {"1", "α", "α²", "ρ", "αρ", "α²ρ"},
    {"α", "α²", "1", "αρ", "α²ρ", "ρ"},
    {"α²", "1", "α", "α²ρ", "ρ", "αρ"},
    {"ρ", "α²ρ", "αρ", "1+ρ+αρ+α²ρ", "α²+ρ+αρ+α²ρ", "α+ρ+αρ+α²ρ"},
    {"αρ", "ρ", "α²ρ", "α+ρ+αρ+α²ρ", "1+ρ+αρ+α²ρ", "α²+ρ+αρ+α²ρ"},
    {"α²ρ", "αρ", "ρ", "α²+ρ+αρ+α²ρ", "α+ρ+αρ+α²ρ", "1+ρ+αρ+α²ρ"},
};

int table_i(int a, int b, int c) {
  static const std::vector<std::string> names = {"1", "α", "α²", "ρ", "αρ", "α²ρ"};
  std::string cell = kTableI[a][b];
  std::stringstream ss(cell);
  std::string term;
  while (std::getline(ss, term, '+'))
    if (term == names[size_t(c)]) return 1;
  return 0;
}

struct Algebra {
  FusionCategory cat;
  WeakHopfAlgebra W;
  CharacterTable ct;
  bool have_ct = false;
};

Algebra& algebra(const std::string& name) {
  static std::map<std::string, Algebra> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  Algebra a;
  a.cat = resolve_category("builtin:" + name);
  a.W = build_tube_algebra(a.cat);
  a.W.haar_dual = solve_dual_haar(a.W).lambda;
  return cache.emplace(name, std::move(a)).first->second;
}

const CharacterTable& characters(Algebra& a) {
  if (!a.have_ct) {
    a.ct = irreducible_characters(a.W);
    a.have_ct = true;
  }
  return a.ct;
}

const std::vector<std::string> kSmall = {"trivial", "vec_z2", "vec_z3", "fibonacci"};
const std::vector<std::string> kLatticeCats = {"vec_z2", "fibonacci"};

Check criterion1() {
  Check c;
  FusionCategory h3 = resolve_category("builtin:haagerup_h3");
  int mismatches = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int k = 0; k < 6; ++k) mismatches += h3.N(a, b, k) != table_i(a, b, k);
  c.gate(mismatches == 0, "builtin haagerup_h3 fusion rules vs table: " + std::to_string(mismatches) + " mismatches");
  auto& A = algebra("haagerup_h3");
  const auto& ct = characters(A);
  std::vector<int> perm;
  bool match = match_fusion_ring(ct.fusion, table_i, 6, &perm);
  c.gate(ct.rounding_residual < 1e-6, "character ring rounding residual " + sci(ct.rounding_residual) + " < 1e-6");
  c.gate(match, std::string("character fusion ring of the 783-dim algebra matches the table: ") +
                    (match ? "yes" : "no"));
  if (match) {
    std::string p;
    for (int x : perm) p += " " + std::to_string(x);
    c.info("object -> character block:" + p);
  }
  return c;
}

Check criterion2() {
  Check c;
  FusionCategory h3 = haagerup_fusion();
  auto counts = enumerate_basis(h3).per_bulk_counts();
  int total = 0;
  std::string s;
  for (int x : counts) {
    total += x;
    s += " " + std::to_string(x);
  }
  c.gate(counts == std::vector<int>{36, 36, 36, 225, 225, 225}, "per-bulk counts" + s);
  c.gate(total == 783, "total " + std::to_string(total));
  double fp = total_fpdim(h3);
  char b[96];
  std::snprintf(b, sizeof b, "FPdim %.6f, |FPdim - 35.7249| = %.2e", fp, std::abs(fp - 35.7249));
  c.gate(std::abs(fp - 35.7249) < 1e-4, b);
  double closed = (39.0 + 9.0 * std::sqrt(13.0)) / 2.0;
  c.gate(std::abs(fp - closed) < 1e-10, "FPdim vs 3 + 3((3+sqrt13)/2)^2: " + sci(std::abs(fp - closed)));
  return c;
}

Check criterion3() {
  Check c;
  FusionCategory h3 = resolve_category("builtin:haagerup_h3");
  auto rep = check_pentagon(h3);
  c.gate(rep.max_pentagon < 1e-8, "pentagon max residual " + sci(rep.max_pentagon) + " over " +
                                      std::to_string(rep.instances) + " instances");
  c.info("unitarity residual " + sci(rep.max_unitarity));
  // Corrupt one entry of a non-trivial 4x4 block.
  FusionCategory bad = h3;
  bad.set_F(3, 3, 3, 3, 3, 3, bad.F(3, 3, 3, 3, 3, 3) + 1e-3);
  auto br = check_pentagon(bad);
  c.gate(!br.pass && br.max_pentagon > 1e-8, "1e-3 corruption of F^{ρρρ}_ρ[ρ,ρ] detected, residual " +
                                                  sci(br.max_pentagon));
  return c;
}

Check criterion4() {
  Check c;
  for (const auto& name : kSmall) {
    auto& A = algebra(name);
    SamplingPolicy pol;
    pol.force_exhaustive = true;
    auto rep = verify_axioms(A.W, 1e-9, pol);
    double worst = 0.0;
    std::string which;
    for (const auto& a : rep.axioms)
      if (a.residual >= worst) {
        worst = a.residual;
        which = a.name;
      }
    c.gate(rep.pass, name + " (dim " + std::to_string(A.W.dim) + ", exhaustive): max residual " + sci(worst) + " (" +
                         which + ") < 1e-9");
  }
  auto& H = algebra("haagerup_h3");
  SamplingPolicy pol;
  pol.samples = 10000;
  auto rep = verify_axioms(H.W, 1e-8, pol);
  double worst = 0.0;
  size_t min_samples = SIZE_MAX;
  for (const auto& a : rep.axioms) {
    worst = std::max(worst, a.residual);
    min_samples = std::min(min_samples, a.samples);
  }
  c.gate(rep.pass && rep.policy == "sampled", "haagerup_h3 (dim 783, sampled, seed " + std::to_string(pol.seed) +
                                                  "): max residual " + sci(worst) + " < 1e-8");
  c.info("smallest per-axiom sample count " + std::to_string(min_samples) + " (single-element axioms run on all 783)");
  return c;
}

Check criterion5() {
  Check c;
  std::vector<std::string> all = kSmall;
  all.push_back("haagerup_h3");
  for (const auto& name : all) {
    auto& A = algebra(name);
    auto hs = solve_haar(A.W);
    double d = (hs.lambda - A.W.haar).cwiseAbs().maxCoeff();
    double idem = (multiply(A.W, A.W.haar, A.W.haar) - A.W.haar).cwiseAbs().maxCoeff();
    double coco = cocommutativity_residual(A.W, A.W.haar);
    double Lidem = (dual_product(A.W, A.W.haar_dual, A.W.haar_dual) - A.W.haar_dual).cwiseAbs().maxCoeff();
    c.gate(d < 1e-7, name + ": closed-form vs solved lambda " + sci(d) + " < 1e-7");
    c.gate(idem < 1e-8, name + ": lambda^2 - lambda " + sci(idem) + " < 1e-8");
    c.gate(coco < 1e-8, name + ": lambda cocommutativity " + sci(coco) + " < 1e-8");
    c.gate(Lidem < 1e-8, name + ": Lambda idempotent " + sci(Lidem) + " < 1e-8");
  }
  return c;
}

Check criterion6() {
  Check c;
  auto& H = algebra("haagerup_h3");
  const auto& ct = characters(H);
  int sq = 0;
  std::string s;
  for (int n : ct.block_dims) {
    sq += n * n;
    s += " " + std::to_string(n);
  }
  c.gate(ct.center_dim() == 6, "haagerup_h3 blocks:" + s + " (count " + std::to_string(ct.center_dim()) + ")");
  c.gate(sq == 783, "haagerup_h3 sum n^2 = " + std::to_string(sq));
  auto sorted = ct.block_dims;
  std::sort(sorted.begin(), sorted.end());
  c.info(std::string("block sizes [6,6,6,15,15,15]: ") +
         (sorted == std::vector<int>{6, 6, 6, 15, 15, 15} ? "yes" : "no"));
  auto fb = wedderburn_blocks(algebra("fibonacci").W);
  c.gate(fb == std::vector<int>{2, 3}, "fibonacci blocks " + std::to_string(fb[0]) +
                                           (fb.size() > 1 ? " " + std::to_string(fb[1]) : std::string()));
  return c;
}

struct LatticeCase {
  std::string cat;
  int n;
  Boundary bc;
};

std::vector<LatticeCase> lattice_cases() {
  std::vector<LatticeCase> out;
  for (const auto& name : kLatticeCats)
    for (int n : {2, 3})
      for (auto bc : {Boundary::periodic, Boundary::open}) out.push_back({name, n, bc});
  return out;
}

std::shared_ptr<const LatticeAlgebra> lattice_algebra(const std::string& name) {
  static std::map<std::string, std::shared_ptr<const LatticeAlgebra>> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  auto& A = algebra(name);
  auto p = std::make_shared<const LatticeAlgebra>(A.W, A.W.haar, A.W.haar_dual);
  cache[name] = p;
  return p;
}

std::string case_name(const LatticeCase& lc) { return lc.cat + " n=" + std::to_string(lc.n) + " " + to_string(lc.bc); }

double g_negative_control = 0.0;
std::string g_negative_where;

Check criterion7() {
  Check c;
  for (const auto& lc : lattice_cases()) {
    auto& A = algebra(lc.cat);
    LatticeModel M(LadderLattice(lc.n, Model::cluster, lc.bc), lattice_algebra(lc.cat));
    auto r = check_lattice(M, characters(A).characters, 20240501, 4, 5000);
    std::string nm = case_name(lc);
    c.gate(r.projector < 1e-8, nm + ": projector " + sci(r.projector));
    c.gate(r.commutator < 1e-8, nm + ": pairwise commutators " + sci(r.commutator));
    double de = std::abs(r.ground_energy + double(r.num_terms));
    char b[160];
    std::snprintf(b, sizeof b, "%s: ground energy %.12f vs -%d (eigen residual %.2e)", nm.c_str(), r.ground_energy,
                  r.num_terms, r.ground_residual);
    c.gate(de < 1e-8 && r.ground_residual < 1e-8, b);
    for (size_t k = 0; k < r.character_commutators.size(); ++k)
      c.gate(r.character_commutators[k] < 1e-8, nm + ": [W_chi" + std::to_string(k) + ", H] (block dim " +
                                                    std::to_string(characters(A).block_dims[k]) + ") " +
                                                    sci(r.character_commutators[k]));
    if (r.negative_control > g_negative_control) {
      g_negative_control = r.negative_control;
      g_negative_where = nm;
    }
  }
  return c;
}

Check criterion8() {
  Check c;
  for (const auto& lc : lattice_cases()) {
    auto& A = algebra(lc.cat);
    LatticeModel M(LadderLattice(lc.n, Model::cluster, lc.bc), lattice_algebra(lc.cat));
    auto r = check_mps(M, characters(A), 20240501, 6);
    std::string nm = case_name(lc);
    c.gate(r.max_stabilizer_residual < 1e-8, nm + ": stabilizer residual " + sci(r.max_stabilizer_residual) +
                                                 " (norm " + sci(r.raw_norm) + ", support " +
                                                 std::to_string(r.support) + ")");
    c.gate(r.max_mpo_vs_operator < 1e-9, nm + ": MPO vs operator path " + sci(r.max_mpo_vs_operator));
  }
  auto& H = algebra("haagerup_h3");
  auto li = local_identities(H.W, H.W.haar, H.W.haar_dual);
  c.gate(li.lambda_idempotent < 1e-8, "haagerup_h3: lambda idempotent " + sci(li.lambda_idempotent));
  c.gate(li.lambda_cocommutative < 1e-8, "haagerup_h3: lambda cocommutative " + sci(li.lambda_cocommutative));
  c.gate(li.Lambda_idempotent < 1e-8, "haagerup_h3: Lambda idempotent " + sci(li.Lambda_idempotent));
  c.info("haagerup_h3: Lambda(xy) - Lambda(yx) " + sci(li.Lambda_cocommutative));
  return c;
}

Check criterion9() {
  Check c;
  // An explicit functional: a seeded random psi, checked to be non-cocommutative.
  auto& A = algebra("vec_z2");
  std::mt19937_64 rng(99);
  std::normal_distribution<double> G;
  VecC psi(A.W.dim);
  for (int i = 0; i < A.W.dim; ++i) psi[i] = cplx(G(rng), G(rng));
  double asym = 0.0;
  for (int i = 0; i < A.W.dim; ++i)
    for (int j = 0; j < A.W.dim; ++j) {
      VecC xy = multiply(A.W, basis_vector(A.W.dim, i), basis_vector(A.W.dim, j));
      VecC yx = multiply(A.W, basis_vector(A.W.dim, j), basis_vector(A.W.dim, i));
      asym = std::max(asym, std::abs((psi.transpose() * (xy - yx))(0)));
    }
  c.info("psi(xy) - psi(yx) " + sci(asym));
  LatticeModel M(LadderLattice(2, Model::cluster, Boundary::periodic), lattice_algebra("vec_z2"));
  LocalOp w = M.w_phi(psi);
  std::mt19937_64 srng(7);
  double worst = 0.0;
  auto H = [&](const State& s) { return M.apply_hamiltonian(s); };
  for (int k = 0; k < 4; ++k) {
    State s = M.random_state(srng);
    worst = std::max(worst, commutator_norm([&](const State& x) { return M.apply_w_phi(w, x); }, H, s));
  }
  c.gate(asym > 1e-3 && worst > 1e-3, "vec_z2 n=2 periodic: ||[W_psi, H]|| " + sci(worst) + " > 1e-3");
  if (!g_negative_where.empty())
    c.info("largest random-psi commutator in criterion 7 runs: " + sci(g_negative_control) + " (" + g_negative_where +
           ")");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string known_path, report_path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--known-failures" && i + 1 < argc) {
      known_path = argv[++i];
    } else if (a == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--known-failures FILE] [--report FILE]\n";
      return 2;
    }
  }
  std::set<int> known;
  if (!known_path.empty()) {
    std::ifstream in(known_path);
    if (!in) {
      std::cerr << "cannot open " << known_path << '\n';
      return 2;
    }
    std::string line;
    while (std::getline(in, line)) {
      auto h = line.find('#');
      if (h != std::string::npos) line.resize(h);
      std::istringstream ls(line);
      int k;
      if (ls >> k) known.insert(k);
    }
  }

  using Fn = Check (*)();
  const std::vector<std::pair<std::string, Fn>> criteria = {
      {"Haagerup fusion ring and character ring", criterion1},
      {"tube basis dimensions and FPdim", criterion2},
      {"pentagon and corruption detection", criterion3},
      {"weak Hopf axiom suite", criterion4},
      {"Haar integral cross-validation", criterion5},
      {"Wedderburn blocks", criterion6},
      {"lattice stabilizers and symmetry", criterion7},
      {"tensor-network ground state", criterion8},
      {"negative control", criterion9},
  };
  std::set<int> failed;
  std::vector<std::string> summary;
  auto t_all = std::chrono::steady_clock::now();
  for (size_t i = 0; i < criteria.size(); ++i) {
    int k = int(i) + 1;
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.gate(false, std::string("exception: ") + e.what());
    }
    char b[160];
    std::snprintf(b, sizeof b, "criterion %d: %s  %s  (%.1fs)", k, c.pass ? "PASS" : "FAIL",
                  criteria[i].first.c_str(), seconds_since(t0));
    say(b);
    for (const auto& l : c.lines) say(l);
    if (!c.pass) failed.insert(k);
    summary.push_back(b);
  }
  char b[96];
  std::snprintf(b, sizeof b, "total %.1fs", seconds_since(t_all));
  say("");
  say("summary:");
  for (const auto& s : summary) say("  " + s);
  say(std::string("  ") + b);

  int status = failed.empty() ? 0 : 1;
  if (!known_path.empty()) {
    for (int k : failed)
      if (!known.count(k)) say("unexpected failure: criterion " + std::to_string(k));
    for (int k : known)
      if (!failed.count(k)) say("listed as known failure but passed: criterion " + std::to_string(k));
    status = failed == known ? 0 : 1;
    if (status == 0 && !failed.empty()) say("all failures match the known-failure list (" + known_path + ")");
  }
  if (!report_path.empty()) std::ofstream(report_path) << g_log.str();
  return status;
}
