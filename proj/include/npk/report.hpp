#pragma once

#include <map>
#include <string>
#include <vector>

#include "npk/scalar.hpp"

namespace npk {

enum class Convention { Gray, Standard };

inline const char* to_string(Convention c) { return c == Convention::Gray ? "gray" : "standard"; }

struct IdentityReport {
  std::string name;
  std::string anchor;  // the relation being checked, in words
  double residual = 0;
  double tol = 0;
  bool pass = false;
  bool skipped = false;
  std::vector<int> witness;  // frame indices of the worst tuple
  std::string note;
  std::map<std::string, std::string> values;  // extracted constants, e.g. alpha
};

// Running max-norm of a family of differences. On the exact backend a check
// passes only when every difference is exactly zero.
template <class F>
class Residual {
 public:
  explicit Residual(double scale = 1.0) : scale_(scale > 0 ? scale : 1.0) {}

  void add(const F& diff, const std::vector<int>& idx) {
    double a = std::abs(to_double(diff)) / scale_;
    if (!is_zero(diff, 0.0)) nonzero_ = true;
    if (a > worst_ || (witness_.empty() && nonzero_)) {
      worst_ = a;
      witness_ = idx;
    }
  }
  void add_double(double a, const std::vector<int>& idx) {
    a /= scale_;
    if (a > worst_) worst_ = a, witness_ = idx;
    if (a != 0) nonzero_ = true;
  }

  double value() const { return worst_; }

  IdentityReport report(const std::string& name, const std::string& anchor, double tol) const {
    IdentityReport r;
    r.name = name;
    r.anchor = anchor;
    r.residual = worst_;
    r.tol = tol;
    if constexpr (FieldTraits<F>::exact) r.pass = !nonzero_;
    else r.pass = worst_ <= tol;
    if (!r.pass) r.witness = witness_;
    return r;
  }

 private:
  double scale_;
  double worst_ = 0;
  bool nonzero_ = false;
  std::vector<int> witness_;
};

}  // namespace npk
