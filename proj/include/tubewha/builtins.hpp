#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "category_io.hpp"
#include "fusion.hpp"

#ifndef TUBEWHA_DATA_DIR
#define TUBEWHA_DATA_DIR "data"
#endif

namespace tubewha {

// Default location of shipped data files; TUBEWHA_DATA overrides.
inline std::string data_dir() {
  if (const char* env = std::getenv("TUBEWHA_DATA")) return env;
  return TUBEWHA_DATA_DIR;
}

// Sets every admissible F-symbol to 1 (trivial associator).
inline void set_trivial_fsymbols(FusionCategory& cat) {
  const int r = cat.rank;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f)
              if (cat.admissible(a, b, c, d, e, f)) cat.set_F(a, b, c, d, e, f, 1.0);
}

inline FusionCategory cyclic_group_category(int n) {
  FusionCategory cat;
  cat.resize(n);
  cat.name = "vec_z" + std::to_string(n);
  for (int a = 0; a < n; ++a) {
    cat.labels[a] = a == 0 ? "1" : "g" + (a == 1 ? std::string() : std::to_string(a));
    cat.dual[a] = (n - a) % n;
    for (int b = 0; b < n; ++b) cat.set_N(a, b, (a + b) % n, 1);
  }
  validate_fusion(cat);
  set_trivial_fsymbols(cat);
  return cat;
}

inline FusionCategory trivial_category() {
  FusionCategory cat = cyclic_group_category(1);
  cat.name = "trivial";
  return cat;
}

// Fibonacci in the real gauge F^{ttt}_t = [[1/phi, 1/sqrt(phi)], [1/sqrt(phi), -1/phi]].
inline FusionCategory fibonacci_category() {
  FusionCategory cat;
  cat.resize(2);
  cat.name = "fibonacci";
  cat.labels = {"1", "τ"};
  cat.dual = {0, 1};
  cat.set_N(0, 0, 0, 1);
  cat.set_N(0, 1, 1, 1);
  cat.set_N(1, 0, 1, 1);
  cat.set_N(1, 1, 0, 1);
  cat.set_N(1, 1, 1, 1);
  validate_fusion(cat);
  set_trivial_fsymbols(cat);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  cat.set_F(1, 1, 1, 1, 0, 0, 1.0 / phi);
  cat.set_F(1, 1, 1, 1, 0, 1, 1.0 / std::sqrt(phi));
  cat.set_F(1, 1, 1, 1, 1, 0, 1.0 / std::sqrt(phi));
  cat.set_F(1, 1, 1, 1, 1, 1, -1.0 / phi);
  return cat;
}

// Haagerup H3 fusion rules. Object 3r+g is alpha^g rho^r, with
// alpha^3 = 1, rho alpha = alpha^2 rho and rho^2 = 1 + rho + alpha rho + alpha^2 rho.
inline FusionCategory haagerup_fusion() {
  FusionCategory cat;
  cat.resize(6);
  cat.name = "haagerup_h3";
  cat.labels = {"1", "α", "α²", "ρ", "αρ", "α²ρ"};
  for (int x = 0; x < 6; ++x) {
    int gx = x % 3, rx = x / 3;
    cat.dual[x] = rx ? x : (3 - gx) % 3;
    for (int y = 0; y < 6; ++y) {
      int gy = y % 3, ry = y / 3;
      int g = (gx + (rx ? 3 - gy : gy)) % 3;
      if (rx + ry <= 1) {
        cat.set_N(x, y, 3 * (rx + ry) + g, 1);
      } else {
        cat.set_N(x, y, g, 1);
        for (int h = 0; h < 3; ++h) cat.set_N(x, y, 3 + h, 1);
      }
    }
  }
  validate_fusion(cat);
  return cat;
}

// Haagerup fusion table written out entry by entry (row label fused with
// column label), in the object order 1, α, α², ρ, αρ, α²ρ.
inline std::vector<std::vector<std::vector<int>>> haagerup_fusion_table() {
  static const char* table[6][6] = {
      {"0", "1", "2", "3", "4", "5"},
      {"1", "2", "0", "4", "5", "3"},
      {"2", "0", "1", "5", "3", "4"},
      {"3", "5", "4", "0345", "2345", "1345"},
      {"4", "3", "5", "1345", "0345", "2345"},
      {"5", "4", "3", "2345", "1345", "0345"},
  };
  std::vector<std::vector<std::vector<int>>> N(6, std::vector<std::vector<int>>(6, std::vector<int>(6, 0)));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (const char* p = table[a][b]; *p; ++p) N[size_t(a)][size_t(b)][size_t(*p - '0')] = 1;
  return N;
}

inline FusionCategory haagerup_category(const std::string& fsym_path) {
  if (fsym_path.empty()) throw InputError("haagerup_h3 needs an F-symbol data file");
  FusionCategory cat = haagerup_fusion();
  auto [entries, conv] = read_fsymbol_file(fsym_path);
  install_fsymbols(cat, entries, conv);
  require_complete_fsymbols(cat);
  return cat;
}

inline std::string default_h3_fsymbols() { return data_dir() + "/h3.fsym"; }

// name: trivial | vec_z2 | vec_z3 | fibonacci | haagerup_h3
inline FusionCategory builtin(const std::string& name, const std::string& fsym_path = "") {
  if (name == "trivial") return trivial_category();
  if (name == "vec_z2") return cyclic_group_category(2);
  if (name == "vec_z3") return cyclic_group_category(3);
  if (name == "fibonacci") return fibonacci_category();
  if (name == "haagerup_h3") return haagerup_category(fsym_path);
  throw InputError("unknown builtin category '" + name + "'");
}

// "builtin:<name>" or a path to a category spec file.
inline FusionCategory resolve_category(const std::string& spec, const std::string& fsym_path = "") {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    std::string name = spec.substr(prefix.size());
    std::string fs = fsym_path;
    if (name == "haagerup_h3" && fs.empty()) fs = default_h3_fsymbols();
    return builtin(name, fs);
  }
  return load_category(spec);
}

}  // namespace tubewha
