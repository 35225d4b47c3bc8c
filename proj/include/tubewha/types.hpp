#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tubewha {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

// Bad or unreadable input. The CLI maps these to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : InputError {
  using InputError::InputError;
};

struct ValidationError : InputError {
  using InputError::InputError;
};

struct MultiplicityError : ValidationError {
  using ValidationError::ValidationError;
};

struct Tolerances {
  double ring = 1e-10;  // fusion-ring identities
  double fsym = 1e-8;   // anything built from F-symbols
  double drop = 1e-14;  // sparse pruning
};

inline void prune(VecC& v, double drop = 1e-14) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) < drop) v[i] = 0.0;
}

// 64-bit FNV-1a, used for category and dump fingerprints.
class Fnv1a {
 public:
  void add(const void* data, size_t n) {
    auto p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ULL;
    }
  }
  void add(const std::string& s) { add(s.data(), s.size()); }
  template <class T>
  void add_pod(const T& v) {
    add(&v, sizeof(T));
  }
  uint64_t value() const { return h_; }
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    uint64_t v = h_;
    for (int i = 15; i >= 0; --i) {
      out[i] = digits[v & 15];
      v >>= 4;
    }
    return out;
  }

 private:
  uint64_t h_ = 14695981039346656037ULL;
};

}  // namespace tubewha
