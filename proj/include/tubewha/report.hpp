#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "types.hpp"
#include "wha.hpp"

namespace tubewha {

inline constexpr const char* kVersion = "0.1.0";

// Run manifest embedded in every output artifact.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  std::string category;
  std::string category_hash;
  std::string fconvention = "standard";
  uint64_t seed = 0;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  bool pass = false;

  nlohmann::json to_json() const {
    return {{"tool", "tubewha"},  {"version", kVersion}, {"command", command},     {"args", args},
            {"category", category}, {"category_hash", category_hash}, {"fconvention", fconvention},
            {"seed", seed},         {"tolerances", tolerances},       {"timings", timings},
            {"results", results},   {"pass", pass}};
  }

  static Manifest from_json(const nlohmann::json& j) {
    Manifest m;
    try {
      m.command = j.at("command").get<std::string>();
      m.args = j.at("args").get<std::vector<std::string>>();
      m.category = j.value("category", std::string());
      m.category_hash = j.value("category_hash", std::string());
      m.fconvention = j.value("fconvention", std::string("standard"));
      m.seed = j.value("seed", uint64_t(0));
      m.tolerances = j.value("tolerances", nlohmann::json::object());
      m.timings = j.value("timings", nlohmann::json::object());
      m.results = j.value("results", nlohmann::json::object());
      m.pass = j.value("pass", false);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest: ") + e.what());
    }
    return m;
  }
};

// Wall-clock stopwatch in seconds.
class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Differences between two result trees: integers, strings and booleans must
// match exactly, floats within `ftol` (relative to max(1, |a|)).
inline void diff_results(const nlohmann::json& a, const nlohmann::json& b, double ftol, const std::string& path,
                         std::vector<std::string>& out) {
  if (a.is_number_float() || b.is_number_float()) {
    if (!a.is_number() || !b.is_number()) {
      out.push_back(path + ": type differs");
      return;
    }
    double x = a.get<double>(), y = b.get<double>();
    if (std::isnan(x) && std::isnan(y)) return;
    if (!(std::abs(x - y) <= ftol * std::max(1.0, std::abs(x)))) out.push_back(path + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.is_number_integer() && b.is_number_integer()) {
    bool neg_a = a.is_number_unsigned() ? false : a.get<int64_t>() < 0;
    bool neg_b = b.is_number_unsigned() ? false : b.get<int64_t>() < 0;
    if (neg_a != neg_b || (neg_a ? a.get<int64_t>() != b.get<int64_t>() : a.get<uint64_t>() != b.get<uint64_t>()))
      out.push_back(path + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    out.push_back(path + ": type differs");
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        out.push_back(path + "/" + it.key() + ": missing in replay");
        continue;
      }
      diff_results(it.value(), b[it.key()], ftol, path + "/" + it.key(), out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) out.push_back(path + "/" + it.key() + ": missing in manifest");
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      out.push_back(path + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
      return;
    }
    for (size_t i = 0; i < a.size(); ++i) diff_results(a[i], b[i], ftol, path + "/" + std::to_string(i), out);
  } else if (a != b) {
    out.push_back(path + ": " + a.dump() + " vs " + b.dump());
  }
}

inline uint64_t algebra_fingerprint(const WeakHopfAlgebra& W) {
  Fnv1a h;
  h.add_pod(W.dim);
  auto add_tensor = [&](const SparseTensor3& t) {
    for (int i = 0; i < t.dim; ++i)
      for (size_t p = t.ptr[size_t(i)]; p < t.ptr[size_t(i) + 1]; ++p) {
        h.add_pod(i);
        h.add_pod(t.j[p]);
        h.add_pod(t.k[p]);
        h.add_pod(std::llround(t.v[p].real() * 1e12));
        h.add_pod(std::llround(t.v[p].imag() * 1e12));
      }
  };
  add_tensor(W.mult);
  add_tensor(W.comult);
  return h.value();
}

// Structure-constant dump: a manifest line followed by sparse table rows
// "<tensor> <indices...> <re> <im>".
inline void write_dump(const WeakHopfAlgebra& W, const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "# tubewha structure-constant dump\n";
  out << "manifest " << m.to_json().dump() << '\n';
  out << "dim " << W.dim << '\n';
  out << std::setprecision(17);
  auto row3 = [&](const char* name, const SparseTensor3& t) {
    for (int i = 0; i < t.dim; ++i)
      for (size_t p = t.ptr[size_t(i)]; p < t.ptr[size_t(i) + 1]; ++p)
        out << name << ' ' << i << ' ' << t.j[p] << ' ' << t.k[p] << ' ' << t.v[p].real() << ' ' << t.v[p].imag()
            << '\n';
  };
  auto row1 = [&](const char* name, const VecC& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v[i] != cplx(0.0)) out << name << ' ' << i << ' ' << v[i].real() << ' ' << v[i].imag() << '\n';
  };
  row3("mult", W.mult);
  row3("comult", W.comult);
  row1("unit", W.unit);
  row1("counit", W.counit);
  for (int c = 0; c < W.antipode.outerSize(); ++c)
    for (SpMat::InnerIterator it(W.antipode, c); it; ++it)
      out << "antipode " << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  row1("lambda", W.haar);
  row1("Lambda", W.haar_dual);
  for (size_t i = 0; i < W.basis_names.size(); ++i) out << "name " << i << ' ' << W.basis_names[i] << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline std::pair<WeakHopfAlgebra, Manifest> read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dump '" + path + "'");
  WeakHopfAlgebra W;
  Manifest m;
  std::vector<Triplet3> mult, comult;
  std::vector<Eigen::Triplet<cplx>> anti;
  std::vector<std::pair<int, cplx>> unit, counit, lam, Lam;
  std::string line;
  int lineno = 0;
  W.dim = -1;
  auto fail = [&](const std::string& what) { throw ParseError(path + ":" + std::to_string(lineno) + ": " + what); };
  auto check = [&](int i) {
    if (W.dim < 0) fail("'dim' must precede table rows");
    if (i < 0 || i >= W.dim) fail("index out of range");
    return i;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "manifest") {
      try {
        m = Manifest::from_json(nlohmann::json::parse(line.substr(9)));
      } catch (const nlohmann::json::exception& e) {
        fail(e.what());
      }
    } else if (tag == "dim") {
      if (!(ss >> W.dim) || W.dim <= 0) fail("bad dim");
    } else if (tag == "mult" || tag == "comult") {
      int i, j, k;
      double re, im;
      if (!(ss >> i >> j >> k >> re >> im)) fail("malformed row");
      (tag == "mult" ? mult : comult).push_back({check(i), check(j), check(k), cplx(re, im)});
    } else if (tag == "antipode") {
      int r, c;
      double re, im;
      if (!(ss >> r >> c >> re >> im)) fail("malformed row");
      anti.emplace_back(check(r), check(c), cplx(re, im));
    } else if (tag == "unit" || tag == "counit" || tag == "lambda" || tag == "Lambda") {
      int i;
      double re, im;
      if (!(ss >> i >> re >> im)) fail("malformed row");
      auto& dst = tag == "unit" ? unit : tag == "counit" ? counit : tag == "lambda" ? lam : Lam;
      dst.push_back({check(i), cplx(re, im)});
    } else if (tag == "name") {
      int i;
      std::string nm;
      if (!(ss >> i)) fail("malformed row");
      std::getline(ss >> std::ws, nm);
      if (W.basis_names.size() <= size_t(check(i))) W.basis_names.resize(size_t(i) + 1);
      W.basis_names[size_t(i)] = nm;
    } else {
      fail("unknown table '" + tag + "'");
    }
  }
  if (W.dim <= 0) throw ParseError(path + ": missing dim");
  W.name = m.category;
  W.mult = SparseTensor3::from_triplets(W.dim, mult, 0.0);
  W.comult = SparseTensor3::from_triplets(W.dim, comult, 0.0);
  auto dense = [&](const std::vector<std::pair<int, cplx>>& v) {
    VecC x = VecC::Zero(W.dim);
    for (const auto& [i, c] : v) x[i] += c;
    return x;
  };
  W.unit = dense(unit);
  W.counit = dense(counit);
  if (!lam.empty()) W.haar = dense(lam);
  if (!Lam.empty()) W.haar_dual = dense(Lam);
  W.antipode = SpMat(W.dim, W.dim);
  W.antipode.setFromTriplets(anti.begin(), anti.end());
  return {std::move(W), std::move(m)};
}

}  // namespace tubewha
