#pragma once

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "npk/error.hpp"

namespace npk {

using Rational = mpq_class;

enum class Backend { Exact, Float };

template <class F>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::Float;
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
  static int sign(double x, double tol) { return is_zero(x, tol) ? 0 : (x > 0 ? 1 : -1); }
  static std::optional<double> sqrt(double x) {
    if (x < 0) return std::nullopt;
    return std::sqrt(x);
  }
};

template <>
struct FieldTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::Exact;
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& q) { return q; }
  static bool is_zero(const Rational& x, double) { return sgn(x) == 0; }
  static int sign(const Rational& x, double) { return sgn(x); }
  // Only perfect squares have a rational root.
  static std::optional<Rational> sqrt(const Rational& x);
};

template <class F>
double to_double(const F& x) { return FieldTraits<F>::to_double(x); }

template <class F>
bool is_zero(const F& x, double tol) { return FieldTraits<F>::is_zero(x, tol); }

template <class F>
int sign_of(const F& x, double tol) { return FieldTraits<F>::sign(x, tol); }

template <class F>
F from_rational(const Rational& q) { return FieldTraits<F>::from_rational(q); }

// Accepts "p", "p/q", "-p/q" and decimals such as "0.25" (converted exactly).
Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& q);

// A value tagged with its backend; the boundary type used by file IO and the CLI.
class Scalar {
 public:
  Scalar() : v_(Rational(0)) {}
  explicit Scalar(Rational q) : v_(std::move(q)) {}
  explicit Scalar(double d);

  Backend backend() const { return std::holds_alternative<Rational>(v_) ? Backend::Exact : Backend::Float; }
  bool exact() const { return backend() == Backend::Exact; }
  const Rational& rational() const;
  double to_double() const;
  std::string str() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar operator-() const;
  bool operator==(const Scalar& o) const;

 private:
  std::variant<Rational, double> v_;
};

}  // namespace npk
