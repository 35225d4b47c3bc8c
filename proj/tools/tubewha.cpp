// tubewha: build and verify boundary tube algebras, lattice models and
// tensor-network states. Exit codes: 0 pass, 1 verification failure,
// 2 input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tubewha/tubewha.hpp"

using nlohmann::json;
using namespace tubewha;

namespace {

struct Options {
  std::string command;
  std::string category;
  std::string fsymbols;
  std::string in;
  std::string out;
  double tol = -1.0;
  size_t samples = 10000;
  uint64_t seed = 20240501;
  std::string model = "cluster";
  int n = 2;
  std::string bc = "open";
  std::string checks = "all";
  bool sampled = false;
  uint64_t max_dense_dim = 200000;
  int threads = 1;
  bool json_stdout = false;
  bool quiet = false;
};

struct Loaded {
  FusionCategory cat;
  bool have_cat = false;
  WeakHopfAlgebra W;
  std::string hash;
};

Loaded load(const Options& o, Manifest& m) {
  Loaded L;
  if (!o.in.empty()) {
    auto [W, dm] = read_dump(o.in);
    L.W = std::move(W);
    L.hash = dm.category_hash;
    m.category = dm.category.empty() ? o.in : dm.category;
  } else {
    if (o.category.empty()) throw InputError("--category is required");
    L.cat = resolve_category(o.category, o.fsymbols);
    L.have_cat = true;
    L.W = build_tube_algebra(L.cat);
    L.hash = category_hash(L.cat);
    m.category = o.category;
  }
  m.category_hash = L.hash;
  return L;
}

void say(const Options& o, const std::string& s) {
  if (!o.quiet) std::cout << s << '\n';
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string line(const std::string& name, double value, double tol) {
  bool ok = value <= tol;
  return (ok ? "  PASS " : "  FAIL ") + name + " " + fmt("%.3e", value) + " (tol " + fmt("%.0e", tol) + ")";
}

bool cmd_build(const Options& o, Manifest& m) {
  Stopwatch sw;
  Loaded L = load(o, m);
  if (!L.have_cat) throw InputError("build needs --category");
  TubeBasis B = enumerate_basis(L.cat);
  HaarSolve hd = solve_dual_haar(L.W);
  L.W.haar_dual = hd.lambda;
  m.timings["build"] = sw.seconds();
  m.results = {{"dim", L.W.dim},
               {"per_bulk_counts", B.per_bulk_counts()},
               {"mult_nnz", L.W.mult.nnz()},
               {"comult_nnz", L.W.comult.nnz()},
               {"fpdim_total", total_fpdim(L.cat)},
               {"fingerprint", std::to_string(algebra_fingerprint(L.W))},
               {"dual_haar_residual", hd.residual}};
  say(o, "tube algebra of " + L.cat.name + ": dim " + std::to_string(L.W.dim));
  if (!o.out.empty()) {
    m.pass = true;
    write_dump(L.W, m, o.out);
    say(o, "wrote " + o.out);
  }
  return true;
}

bool cmd_verify(const Options& o, Manifest& m) {
  Stopwatch sw;
  Loaded L = load(o, m);
  SamplingPolicy pol;
  pol.samples = o.samples;
  pol.seed = o.seed;
  const bool exhaustive = L.W.dim <= pol.exhaustive_max_dim;
  const double tol = o.tol > 0 ? o.tol : (exhaustive ? 1e-9 : 1e-8);
  m.tolerances = {{"axioms", tol}, {"haar", 1e-7}, {"idempotent", 1e-8}, {"pentagon", 1e-8}};
  bool pass = true;
  json res;
  if (L.have_cat) {
    PentagonReport pr = check_pentagon(L.cat, 1e-8);
    say(o, "pentagon (" + std::to_string(pr.instances) + " instances)");
    say(o, line("pentagon", pr.max_pentagon, 1e-8));
    say(o, line("unitarity", pr.max_unitarity, 1e-8));
    res["pentagon"] = {{"max", pr.max_pentagon}, {"unitarity", pr.max_unitarity}, {"instances", pr.instances}};
    pass &= pr.pass;
  }
  AxiomReport ar = verify_axioms(L.W, tol, pol);
  say(o, "weak Hopf axioms (" + ar.policy + ", dim " + std::to_string(L.W.dim) + ")");
  json ax = json::object();
  std::string first_fail;
  for (const auto& a : ar.axioms) {
    say(o, line(a.name, a.residual, tol));
    ax[a.name] = {{"residual", a.residual}, {"samples", a.samples}};
    if (!a.pass && first_fail.empty()) first_fail = a.name;
  }
  res["axioms"] = ax;
  res["policy"] = ar.policy;
  pass &= ar.pass;
  m.timings["axioms"] = sw.seconds();
  if (ar.pass) {
    HaarSolve hs = solve_haar(L.W);
    HaarSolve hd = solve_dual_haar(L.W);
    double haar_diff = L.W.haar.size() ? (hs.lambda - L.W.haar).cwiseAbs().maxCoeff() : 0.0;
    LocalIdentityReport li = local_identities(L.W, hs.lambda, hd.lambda);
    say(o, "Haar integrals");
    if (L.W.haar.size()) say(o, line("closed_form_vs_solve", haar_diff, 1e-7));
    say(o, line("lambda_idempotent", li.lambda_idempotent, 1e-8));
    say(o, line("Lambda_idempotent", li.Lambda_idempotent, 1e-8));
    say(o, "  info lambda_cocommutative " + fmt("%.3e", li.lambda_cocommutative));
    say(o, "  info Lambda_cocommutative " + fmt("%.3e", li.Lambda_cocommutative));
    res["haar"] = {{"closed_form_vs_solve", haar_diff},
                   {"solve_residual", hs.residual},
                   {"lambda_idempotent", li.lambda_idempotent},
                   {"Lambda_idempotent", li.Lambda_idempotent},
                   {"lambda_cocommutative", li.lambda_cocommutative},
                   {"Lambda_cocommutative", li.Lambda_cocommutative}};
    bool hp = haar_diff <= 1e-7 && li.lambda_idempotent <= 1e-8 && li.Lambda_idempotent <= 1e-8;
    if (!hp && first_fail.empty()) first_fail = "haar";
    pass &= hp;
  }
  m.timings["total"] = sw.seconds();
  m.results = res;
  if (!pass) say(o, "first failure: " + (first_fail.empty() ? std::string("pentagon") : first_fail));
  return pass;
}

std::set<std::string> parse_checks(const std::string& s) {
  static const std::set<std::string> known = {"projector", "commute", "ground", "symmetry", "negative"};
  std::set<std::string> out;
  if (s == "all") return known;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!known.count(item)) throw InputError("unknown check '" + item + "'");
    out.insert(item);
  }
  return out;
}

bool local_identity_mode(const Options& o, Manifest& m, const WeakHopfAlgebra& W) {
  HaarSolve hd = solve_dual_haar(W);
  VecC lambda = W.haar.size() ? W.haar : solve_haar(W).lambda;
  LocalIdentityReport li = local_identities(W, lambda, hd.lambda);
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  say(o, "local-identity mode (dim " + std::to_string(W.dim) + ")");
  say(o, line("lambda_idempotent", li.lambda_idempotent, tol));
  say(o, line("lambda_cocommutative", li.lambda_cocommutative, tol));
  say(o, line("Lambda_idempotent", li.Lambda_idempotent, tol));
  say(o, "  info Lambda_cocommutative " + fmt("%.3e", li.Lambda_cocommutative));
  m.results = {{"mode", "local_identities"},
               {"lambda_idempotent", li.lambda_idempotent},
               {"lambda_cocommutative", li.lambda_cocommutative},
               {"Lambda_idempotent", li.Lambda_idempotent},
               {"Lambda_cocommutative", li.Lambda_cocommutative}};
  return li.lambda_idempotent <= tol && li.lambda_cocommutative <= tol && li.Lambda_idempotent <= tol;
}

double dense_dim(int dim, int edges) { return std::pow(double(dim), double(edges)); }

bool cmd_lattice(const Options& o, Manifest& m) {
  Stopwatch sw;
  Loaded L = load(o, m);
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  m.tolerances = {{"lattice", tol}, {"negative_control", 1e-3}};
  Model model = parse_model(o.model);
  Boundary bc = parse_boundary(o.bc);
  LadderLattice lat(o.n, model, bc);
  const double dd = dense_dim(L.W.dim, lat.num_edges());
  if (dd > double(o.max_dense_dim) && !o.sampled)
    throw InputError("dense dimension " + fmt("%.3g", dd) + " exceeds --max-dense-dim; use --sampled");
  if (o.sampled && L.W.dim > 200) return local_identity_mode(o, m, L.W);
  auto checks = parse_checks(o.checks);
  HaarSolve hd = solve_dual_haar(L.W);
  VecC lambda = L.W.haar.size() ? L.W.haar : solve_haar(L.W).lambda;
  auto A = std::make_shared<const LatticeAlgebra>(L.W, lambda, hd.lambda);
  CharacterTable ct = irreducible_characters(L.W, o.seed);
  LatticeModel M(lat, A);
  LatticeReport r = check_lattice(M, ct.characters, o.seed, 4, o.sampled ? 0 : o.max_dense_dim);
  m.timings["lattice"] = sw.seconds();
  say(o, to_string(model) + " lattice, n=" + std::to_string(o.n) + ", " + r.bc + ", " + std::to_string(r.num_terms) +
             " terms, " + std::to_string(r.test_states) + " test states" + (r.dense_state ? " (incl. dense)" : ""));
  bool pass = true;
  if (checks.count("projector")) {
    say(o, line("projector", r.projector, tol));
    pass &= r.projector <= tol;
  }
  if (checks.count("commute")) {
    say(o, line("commute", r.commutator, tol));
    pass &= r.commutator <= tol;
  }
  double e_err = std::abs(r.ground_energy + r.num_terms);
  if (checks.count("ground")) {
    say(o, "  info ground_energy " + fmt("%.10f", r.ground_energy) + " (expected " + std::to_string(-r.num_terms) + ")");
    say(o, line("ground_energy", std::isnan(e_err) ? INFINITY : e_err, tol));
    say(o, line("ground_eigen_residual", r.ground_residual, tol));
    pass &= e_err <= tol && r.ground_residual <= tol;
  }
  if (checks.count("symmetry")) {
    for (size_t i = 0; i < r.character_commutators.size(); ++i) {
      std::string name = "[W_chi" + std::to_string(i) + ",H] (block " + std::to_string(ct.block_dims[i]) + ")";
      say(o, line(name, r.character_commutators[i], tol));
      pass &= r.character_commutators[i] <= tol;
    }
    say(o, line("W_psi W_phi = W_psi.phi", r.w_phi_algebra, tol));
    say(o, line("W_1 W_psi = W_psi", r.w_unit_law, tol));
    say(o, line("W_h W_g = W_hg", r.w_h_algebra, tol));
    pass &= r.w_phi_algebra <= tol && r.w_unit_law <= tol && r.w_h_algebra <= tol;
    say(o, "  info [W_lambda,H] " + fmt("%.3e", r.w_lambda_commutator));
    say(o, "  info vertex starting-link spread " + fmt("%.3e", r.link_independence));
  }
  if (checks.count("negative")) say(o, "  info negative control [W_psi,H] " + fmt("%.3e", r.negative_control));
  m.results = {{"mode", "states"},
               {"model", to_string(model)},
               {"bc", r.bc},
               {"n", r.n},
               {"terms", r.num_terms},
               {"projector", r.projector},
               {"commutator", r.commutator},
               {"ground_energy", r.ground_energy},
               {"ground_residual", r.ground_residual},
               {"character_commutators", r.character_commutators},
               {"block_dims", ct.block_dims},
               {"w_phi_algebra", r.w_phi_algebra},
               {"w_unit_law", r.w_unit_law},
               {"w_h_algebra", r.w_h_algebra},
               {"w_lambda_commutator", r.w_lambda_commutator},
               {"link_independence", r.link_independence},
               {"negative_control", r.negative_control},
               {"dense_state", r.dense_state},
               {"test_states", r.test_states}};
  return pass;
}

bool cmd_mps(const Options& o, Manifest& m) {
  Stopwatch sw;
  Loaded L = load(o, m);
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  m.tolerances = {{"stabilizer", tol}, {"mpo", 1e-9}, {"plans", 1e-10}};
  Boundary bc = parse_boundary(o.bc);
  LadderLattice lat(o.n, Model::cluster, bc);
  if (dense_dim(L.W.dim, lat.num_edges()) > 1e12 || L.W.dim > 200) return local_identity_mode(o, m, L.W);
  HaarSolve hd = solve_dual_haar(L.W);
  VecC lambda = L.W.haar.size() ? L.W.haar : solve_haar(L.W).lambda;
  auto A = std::make_shared<const LatticeAlgebra>(L.W, lambda, hd.lambda);
  CharacterTable ct = irreducible_characters(L.W, o.seed);
  LatticeModel M(lat, A);
  MpsReport r = check_mps(M, ct, o.seed);
  m.timings["mps"] = sw.seconds();
  say(o, "tensor-network state, n=" + std::to_string(o.n) + ", " + r.bc + ", support " + std::to_string(r.support) +
             ", norm " + fmt("%.6e", r.raw_norm));
  bool pass = r.raw_norm > 1e-6;
  say(o, std::string(pass ? "  PASS" : "  FAIL") + " nonzero_norm " + fmt("%.3e", r.raw_norm));
  say(o, line("contraction_plans", r.plan_agreement, 1e-10));
  say(o, line("stabilizers", r.max_stabilizer_residual, tol));
  say(o, line("mpo_vs_operator", r.max_mpo_vs_operator, 1e-9));
  pass &= r.plan_agreement <= 1e-10 && r.max_stabilizer_residual <= tol && r.max_mpo_vs_operator <= 1e-9;
  for (size_t i = 0; i < r.mpo_eigenvalue.size(); ++i)
    say(o, "  info W_Gamma" + std::to_string(i) + " <W> " + fmt("%.6f", r.mpo_eigenvalue[i]) + " spread " +
               fmt("%.2e", r.mpo_variance[i]));
  m.results = {{"mode", "contracted"},
               {"bc", r.bc},
               {"n", r.n},
               {"raw_norm", r.raw_norm},
               {"support", r.support},
               {"plan_agreement", r.plan_agreement},
               {"stabilizer_residuals", r.stabilizer_residuals},
               {"mpo_vs_operator", r.mpo_vs_operator},
               {"mpo_eigenvalue", r.mpo_eigenvalue},
               {"mpo_variance", r.mpo_variance}};
  return pass;
}

bool cmd_characters(const Options& o, Manifest& m) {
  Stopwatch sw;
  Loaded L = load(o, m);
  CharacterTable ct = irreducible_characters(L.W, o.seed);
  m.timings["characters"] = sw.seconds();
  std::ostringstream s;
  s << "block dims:";
  int total = 0;
  for (int b : ct.block_dims) {
    s << ' ' << b;
    total += b * b;
  }
  s << "  (sum of squares " << total << ", algebra dim " << L.W.dim << ")";
  say(o, s.str());
  say(o, "fusion of characters (row x column = sum):");
  for (size_t a = 0; a < ct.fusion.size(); ++a) {
    std::ostringstream r;
    r << "  ";
    for (size_t b = 0; b < ct.fusion.size(); ++b) {
      r << '[';
      for (int x : ct.fusion[a][b]) r << x;
      r << "] ";
    }
    say(o, r.str());
  }
  say(o, "  info center gap " + fmt("%.3e", ct.center_gap) + ", rounding residual " + fmt("%.3e", ct.rounding_residual));
  bool pass = total == L.W.dim && ct.rounding_residual <= 1e-6;
  json res = {{"block_dims", ct.block_dims}, {"fusion", ct.fusion}, {"rounding_residual", ct.rounding_residual}};
  if (L.have_cat) {
    std::vector<int> perm;
    bool ok = match_fusion_ring(ct.fusion, [&](int i, int j, int k) { return L.cat.N(i, j, k); }, L.cat.rank, &perm);
    say(o, std::string(ok ? "  PASS" : "  FAIL") + " character ring matches the fusion rules of " + L.cat.name);
    res["matches_fusion_rules"] = ok;
    pass &= ok;
    if (L.cat.name == "haagerup_h3") {
      auto T = haagerup_fusion_table();
      bool table_ok = true;
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          for (int c = 0; c < 6; ++c) table_ok &= T[size_t(a)][size_t(b)][size_t(c)] == L.cat.N(a, b, c);
      bool ring_ok = match_fusion_ring(ct.fusion, [&](int i, int j, int k) { return T[size_t(i)][size_t(j)][size_t(k)]; },
                                       6, nullptr);
      say(o, std::string(table_ok ? "  PASS" : "  FAIL") + " builtin fusion rules equal the Haagerup table");
      say(o, std::string(ring_ok ? "  PASS" : "  FAIL") + " character ring equals the Haagerup table");
      res["haagerup_table"] = table_ok && ring_ok;
      pass &= table_ok && ring_ok;
    }
  }
  m.results = res;
  return pass;
}

void add_common(CLI::App* sc, Options& o, bool needs_category = true) {
  auto* c = sc->add_option("--category", o.category, "builtin:NAME or path to a category spec file");
  if (needs_category) c->required();
  sc->add_option("--fsymbols", o.fsymbols, "F-symbol file (overrides the default for builtin:haagerup_h3)");
  sc->add_option("--out", o.out, "output file");
  sc->add_option("--seed", o.seed, "random seed");
  sc->add_option("--tol", o.tol, "tolerance");
  sc->add_option("--threads", o.threads, "worker cap (computation is single-threaded)")->check(CLI::PositiveNumber);
  sc->add_flag("--json", o.json_stdout, "print the machine-readable report");
}

// Parses args and runs the command; returns the exit code.
int run(const std::vector<std::string>& args, Manifest& m, bool quiet) {
  Options o;
  o.quiet = quiet;
  CLI::App app{"tubewha"};
  app.require_subcommand(1);
  auto* build = app.add_subcommand("build", "build the tube algebra and dump its structure constants");
  add_common(build, o);
  auto* verify = app.add_subcommand("verify", "pentagon, weak Hopf axioms and Haar integrals");
  add_common(verify, o, false);
  verify->add_option("--in", o.in, "structure-constant dump");
  verify->add_option("--samples", o.samples, "samples per axiom when not exhaustive");
  auto* lattice = app.add_subcommand("lattice", "lattice model invariant checks");
  add_common(lattice, o);
  lattice->add_option("--model", o.model, "cluster|ladder");
  lattice->add_option("--n", o.n, "number of plaquettes")->check(CLI::PositiveNumber);
  lattice->add_option("--bc", o.bc, "periodic|open");
  lattice->add_option("--checks", o.checks, "comma list of projector,commute,ground,symmetry,negative or all");
  lattice->add_flag("--sampled", o.sampled, "sparse random states only; local identities for large algebras");
  lattice->add_option("--max-dense-dim", o.max_dense_dim, "largest configuration space for full-support states");
  auto* mps = app.add_subcommand("mps", "tensor-network ground state checks");
  add_common(mps, o);
  mps->add_option("--n", o.n, "number of plaquettes")->check(CLI::PositiveNumber);
  mps->add_option("--bc", o.bc, "periodic|open");
  mps->add_option("--max-dense-dim", o.max_dense_dim, "accepted for symmetry with lattice");
  auto* chars = app.add_subcommand("characters", "Wedderburn blocks and character fusion ring");
  add_common(chars, o);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (verify->parsed() && o.in.empty() && o.category.empty()) {
    std::cerr << "error: verify needs --in or --category\n";
    return 2;
  }
  m.command = app.get_subcommands().front()->get_name();
  m.args = args;
  m.seed = o.seed;
  bool pass = false;
  try {
    if (build->parsed()) pass = cmd_build(o, m);
    if (verify->parsed()) pass = cmd_verify(o, m);
    if (lattice->parsed()) pass = cmd_lattice(o, m);
    if (mps->parsed()) pass = cmd_mps(o, m);
    if (chars->parsed()) pass = cmd_characters(o, m);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  m.pass = pass;
  m.results["threads"] = o.threads;
  if (!o.out.empty() && m.command != "build") {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << "error: cannot write " << o.out << '\n';
      return 2;
    }
    f << m.to_json().dump(2) << '\n';
  }
  if (o.json_stdout) std::cout << m.to_json().dump(2) << '\n';
  if (!quiet) std::cout << (pass ? "result: pass" : "result: FAIL") << '\n';
  return pass ? 0 : 1;
}

// Reads a manifest from a JSON report or a structure-constant dump.
Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path + "'");
  std::string first;
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream ss(all);
  std::string l;
  while (std::getline(ss, l))
    if (l.rfind("manifest ", 0) == 0) return Manifest::from_json(json::parse(l.substr(9)));
  try {
    return Manifest::from_json(json::parse(all));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int replay(const std::string& path) {
  Manifest old;
  try {
    old = read_manifest(path);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<std::string> args;
  for (size_t i = 0; i < old.args.size(); ++i) {
    if (old.args[i] == "--out" || old.args[i] == "--json") {
      if (old.args[i] == "--out") ++i;
      continue;
    }
    args.push_back(old.args[i]);
  }
  Manifest now;
  int code = run(args, now, true);
  if (code == 2) return 2;
  std::vector<std::string> diffs;
  if (now.category_hash != old.category_hash) diffs.push_back("category_hash: " + old.category_hash + " vs " + now.category_hash);
  if (now.pass != old.pass) diffs.push_back("pass differs");
  json a = old.results, b = now.results;
  a.erase("threads");
  b.erase("threads");
  diff_results(a, b, 1e-12, "results", diffs);
  for (const auto& d : diffs) std::cout << "  DIFF " << d << '\n';
  std::cout << (diffs.empty() ? "manifest replay: identical" : "manifest replay: differs") << '\n';
  return diffs.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (size_t i = 0; i < args.size(); ++i)
    if (args[i] == "--verify-manifest") {
      if (i + 1 >= args.size()) {
        std::cerr << "error: --verify-manifest needs a path\n";
        return 2;
      }
      return replay(args[i + 1]);
    }
  Manifest m;
  try {
    return run(args, m, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
