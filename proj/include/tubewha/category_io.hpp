#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fusion.hpp"

namespace tubewha {

// How a stored F-symbol table relates to F^{abc}_d[e,f].
//   standard           line (a,b,c,d,x,y,v): F^{abc}_d[e=x, f=y] = v
//   transpose          line (a,b,c,d,x,y,v): F^{abc}_d[e=y, f=x] = v
//   inverse            line (a,b,c,d,x,y,v): (F^{abc}_d)^{-1}[f=x, e=y] = v
//   inverse_transpose  line (a,b,c,d,x,y,v): (F^{abc}_d)^{-1}[f=y, e=x] = v
struct FConvention {
  bool invert = false;
  bool transpose = false;

  static FConvention parse(const std::string& s) {
    if (s == "standard") return {false, false};
    if (s == "transpose") return {false, true};
    if (s == "inverse") return {true, false};
    if (s == "inverse_transpose") return {true, true};
    throw ParseError("unknown fconvention '" + s + "' (expected standard|transpose|inverse|inverse_transpose)");
  }
  std::string name() const {
    if (invert) return transpose ? "inverse_transpose" : "inverse";
    return transpose ? "transpose" : "standard";
  }
};

struct FEntry {
  int a, b, c, d, x, y;
  cplx v;
};

// Stores raw entries into the category according to the convention.
inline void install_fsymbols(FusionCategory& cat, const std::vector<FEntry>& entries, FConvention conv) {
  const int r = cat.rank;
  auto in_range = [r](int v) { return v >= 0 && v < r; };
  FusionCategory raw = cat;
  std::fill(raw.fknown.begin(), raw.fknown.end(), 0);
  for (const auto& en : entries) {
    if (!(in_range(en.a) && in_range(en.b) && in_range(en.c) && in_range(en.d) && in_range(en.x) && in_range(en.y)))
      throw ParseError("F-symbol index out of range at " + key_string(en.a, en.b, en.c, en.d, en.x, en.y));
    int e = conv.transpose ? en.y : en.x;
    int f = conv.transpose ? en.x : en.y;
    if (conv.invert) std::swap(e, f);
    if (!cat.admissible(en.a, en.b, en.c, en.d, e, f))
      throw ValidationError("F-symbol given for non-admissible key " + key_string(en.a, en.b, en.c, en.d, e, f));
    raw.set_F(en.a, en.b, en.c, en.d, e, f, en.v);
  }
  if (!conv.invert) {
    cat.fsym = raw.fsym;
    cat.fknown = raw.fknown;
    return;
  }
  // raw now holds G = F^{-1} indexed as G[e,f] (meaning G[f][e] transposed
  // into F's index order); invert block by block.
  cat.fsym.assign(raw.fsym.size(), cplx(0.0));
  cat.fknown.assign(raw.fknown.size(), 0);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d) {
          FBlock blk = f_block(raw, a, b, c, d);
          if (blk.rows.empty()) continue;
          bool complete = true;
          for (int e : blk.rows)
            for (int f : blk.cols) complete = complete && raw.has_F(a, b, c, d, e, f);
          if (!complete || blk.rows.size() != blk.cols.size()) continue;
          // blk.m(e,f) = G[f,e]; F = G^{-1} so F(e,f) = (G^{-1})[e,f].
          MatC G = blk.m.transpose();
          MatC Fm = G.inverse();
          for (size_t i = 0; i < blk.rows.size(); ++i)
            for (size_t j = 0; j < blk.cols.size(); ++j)
              cat.set_F(a, b, c, d, blk.rows[i], blk.cols[j], Fm(Eigen::Index(i), Eigen::Index(j)));
        }
}

// F-symbol table file: '#' comments, a header line "fconvention <name>",
// then one "a b c d x y re im" line per entry.
inline std::pair<std::vector<FEntry>, FConvention> read_fsymbol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open F-symbol file '" + path + "'");
  std::vector<FEntry> entries;
  FConvention conv;
  bool have_header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "fconvention") {
      std::string v;
      if (!(ls >> v)) throw ParseError(path + ":" + std::to_string(lineno) + ": fconvention needs a value");
      conv = FConvention::parse(v);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(path + ": missing 'fconvention' header before data");
    FEntry en{};
    double re = 0, im = 0;
    std::istringstream full(line);
    if (!(full >> en.a >> en.b >> en.c >> en.d >> en.x >> en.y >> re >> im))
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'a b c d x y re im'");
    std::string extra;
    if (full >> extra) throw ParseError(path + ":" + std::to_string(lineno) + ": trailing tokens");
    en.v = cplx(re, im);
    entries.push_back(en);
  }
  if (!have_header) throw ParseError(path + ": missing 'fconvention' header");
  return {entries, conv};
}

inline void write_fsymbol_file(const FusionCategory& cat, const std::string& path, const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "fconvention standard\n";
  out.precision(17);
  const int r = cat.rank;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f)
              if (cat.admissible(a, b, c, d, e, f) && cat.has_F(a, b, c, d, e, f)) {
                cplx v = cat.F(a, b, c, d, e, f);
                out << a << ' ' << b << ' ' << c << ' ' << d << ' ' << e << ' ' << f << ' ' << v.real() << ' '
                    << v.imag() << '\n';
              }
}

namespace detail {

inline int get_index(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

}  // namespace detail

// Category spec file (JSON). Keys:
//   fconvention  standard | transpose | inverse | inverse_transpose
//   rank, labels, dual, fusion ([a,b,c] or [a,b,c,m] triples with N=m)
//   fsymbols ([a,b,c,d,e,f,re,im] list) or fsymbol_file (path, relative to the spec)
//   fpdim (optional, cross-checked), name (optional)
inline FusionCategory parse_category(const nlohmann::json& j, const std::string& base_dir = ".",
                                     bool require_fsymbols = true) {
  static const std::set<std::string> allowed = {"name",  "fconvention", "rank",     "labels",      "dual",
                                                "fusion", "fsymbols",   "fsymbol_file", "fpdim"};
  if (!j.is_object()) throw ParseError("category spec must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ParseError("unknown key '" + it.key() + "'");
  for (const char* k : {"rank", "labels", "dual", "fusion"})
    if (!j.contains(k)) throw ParseError(std::string("missing required key '") + k + "'");
  FusionCategory cat;
  int r = detail::get_index(j["rank"], "rank");
  if (r <= 0 || r > 32) throw ValidationError("rank must be in 1..32");
  cat.resize(r);
  cat.name = j.value("name", std::string("custom"));
  if (!j["labels"].is_array() || int(j["labels"].size()) != r) throw ParseError("labels: expected rank entries");
  for (int a = 0; a < r; ++a) {
    if (!j["labels"][a].is_string()) throw ParseError("labels: expected strings");
    cat.labels[a] = j["labels"][a].get<std::string>();
  }
  if (!j["dual"].is_array() || int(j["dual"].size()) != r) throw ParseError("dual: expected rank entries");
  for (int a = 0; a < r; ++a) cat.dual[a] = detail::get_index(j["dual"][a], "dual");
  if (!j["fusion"].is_array()) throw ParseError("fusion: expected a list of triples");
  for (const auto& t : j["fusion"]) {
    if (!t.is_array() || (t.size() != 3 && t.size() != 4)) throw ParseError("fusion: entries are [a,b,c] or [a,b,c,m]");
    int a = detail::get_index(t[0], "fusion"), b = detail::get_index(t[1], "fusion"),
        c = detail::get_index(t[2], "fusion");
    int m = t.size() == 4 ? detail::get_index(t[3], "fusion") : 1;
    if (a < 0 || a >= r || b < 0 || b >= r || c < 0 || c >= r) throw ParseError("fusion: index out of range");
    if (m < 0 || m > 255) throw ParseError("fusion: multiplicity out of range");
    int total = cat.N(a, b, c) + m;
    cat.set_N(a, b, c, std::min(total, 255));
  }
  bool have_fpdim = false;
  if (j.contains("fpdim")) {
    if (!j["fpdim"].is_array() || int(j["fpdim"].size()) != r) throw ParseError("fpdim: expected rank numbers");
    for (int a = 0; a < r; ++a) cat.fpdim[a] = j["fpdim"][a].get<double>();
    have_fpdim = true;
  }
  validate_fusion(cat, 1e-10, have_fpdim);

  FConvention conv = FConvention::parse(j.value("fconvention", std::string("standard")));
  if (j.contains("fsymbols") && j.contains("fsymbol_file"))
    throw ParseError("give either fsymbols or fsymbol_file, not both");
  if (j.contains("fsymbols")) {
    std::vector<FEntry> entries;
    for (const auto& t : j["fsymbols"]) {
      if (!t.is_array() || t.size() != 8) throw ParseError("fsymbols: entries are [a,b,c,d,e,f,re,im]");
      FEntry en{detail::get_index(t[0], "fsymbols"), detail::get_index(t[1], "fsymbols"),
                detail::get_index(t[2], "fsymbols"), detail::get_index(t[3], "fsymbols"),
                detail::get_index(t[4], "fsymbols"), detail::get_index(t[5], "fsymbols"),
                cplx(t[6].get<double>(), t[7].get<double>())};
      entries.push_back(en);
    }
    install_fsymbols(cat, entries, conv);
  } else if (j.contains("fsymbol_file")) {
    std::filesystem::path p = j["fsymbol_file"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    auto [entries, fconv] = read_fsymbol_file(p.string());
    install_fsymbols(cat, entries, fconv);
  } else if (require_fsymbols) {
    throw ParseError("missing fsymbols or fsymbol_file");
  }
  if (require_fsymbols) require_complete_fsymbols(cat);
  return cat;
}

inline FusionCategory load_category(const std::string& path, bool require_fsymbols = true) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open category file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  std::string base = std::filesystem::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_category(j, base, require_fsymbols);
}

inline nlohmann::json category_to_json(const FusionCategory& cat) {
  nlohmann::json j;
  j["name"] = cat.name;
  j["fconvention"] = "standard";
  j["rank"] = cat.rank;
  j["labels"] = cat.labels;
  j["dual"] = cat.dual;
  j["fpdim"] = cat.fpdim;
  nlohmann::json fus = nlohmann::json::array();
  for (int a = 0; a < cat.rank; ++a)
    for (int b = 0; b < cat.rank; ++b)
      for (int c = 0; c < cat.rank; ++c)
        if (cat.N(a, b, c)) fus.push_back({a, b, c});
  j["fusion"] = fus;
  nlohmann::json fs = nlohmann::json::array();
  const int r = cat.rank;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = 0; d < r; ++d)
          for (int e = 0; e < r; ++e)
            for (int f = 0; f < r; ++f)
              if (cat.admissible(a, b, c, d, e, f) && cat.has_F(a, b, c, d, e, f)) {
                cplx v = cat.F(a, b, c, d, e, f);
                fs.push_back({a, b, c, d, e, f, v.real(), v.imag()});
              }
  j["fsymbols"] = fs;
  return j;
}

}  // namespace tubewha
