#include "npk/scalar.hpp"

#include <cctype>

namespace npk {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NullPivotExhausted: return "NullPivotExhausted";
    case ErrorKind::InconsistentAssignment: return "InconsistentAssignment";
    case ErrorKind::NullLength: return "NullLength";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::NotConstantType: return "NotConstantType";
    case ErrorKind::ZeroParameter: return "ZeroParameter";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NotTwistorialType: return "NotTwistorialType";
    case ErrorKind::NotScalar: return "NotScalar";
    case ErrorKind::MissingConnection: return "MissingConnection";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::InvarianceViolation: return "InvarianceViolation";
    case ErrorKind::ReductivityViolation: return "ReductivityViolation";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::IrrationalValue: return "IrrationalValue";
    case ErrorKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

bool is_load_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::MissingField:
    case ErrorKind::NotFound:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::JacobiViolation:
    case ErrorKind::InvarianceViolation:
    case ErrorKind::ReductivityViolation:
    case ErrorKind::DegenerateMetric:
    case ErrorKind::NonFinite:
      return true;
    default:
      return false;
  }
}

std::optional<Rational> FieldTraits<Rational>::sqrt(const Rational& x) {
  if (sgn(x) < 0) return std::nullopt;
  mpz_class n = x.get_num(), d = x.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty number");
  auto bad = [&] { return Error(ErrorKind::ParseError, "not a rational literal: '" + raw + "'"); };
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos || s.find_first_of("eE") != std::string::npos) throw bad();
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    mpz_class num;
    if (digits[0] == '+') digits.erase(0, 1);
    if (num.set_str(digits, 10) != 0) throw bad();
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  try {
    if (q.set_str(s, 10) != 0) throw bad();
  } catch (const std::invalid_argument&) {
    throw bad();
  }
  if (sgn(q.get_den()) == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + raw + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Scalar::Scalar(double d) : v_(d) {
  if (!std::isfinite(d)) throw Error(ErrorKind::NonFinite, "non-finite scalar");
}

const Rational& Scalar::rational() const {
  if (!exact()) throw Error(ErrorKind::PreconditionFailed, "scalar is not exact");
  return std::get<Rational>(v_);
}

double Scalar::to_double() const {
  return exact() ? std::get<Rational>(v_).get_d() : std::get<double>(v_);
}

std::string Scalar::str() const {
  if (exact()) return format_rational(std::get<Rational>(v_));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v_));
  return buf;
}

namespace {
template <class Op>
Scalar combine(const Scalar& a, const Scalar& b, Op op) {
  if (a.exact() && b.exact()) return Scalar(Rational(op(a.rational(), b.rational())));
  return Scalar(op(a.to_double(), b.to_double()));
}
}  // namespace

Scalar Scalar::operator+(const Scalar& o) const { return combine(*this, o, [](auto x, auto y) { return x + y; }); }
Scalar Scalar::operator-(const Scalar& o) const { return combine(*this, o, [](auto x, auto y) { return x - y; }); }
Scalar Scalar::operator*(const Scalar& o) const { return combine(*this, o, [](auto x, auto y) { return x * y; }); }
Scalar Scalar::operator/(const Scalar& o) const {
  if (o.exact() ? sgn(o.rational()) == 0 : o.to_double() == 0.0)
    throw Error(ErrorKind::NumericalBreakdown, "division by zero");
  return combine(*this, o, [](auto x, auto y) { return x / y; });
}
Scalar Scalar::operator-() const {
  return exact() ? Scalar(Rational(-rational())) : Scalar(-to_double());
}
bool Scalar::operator==(const Scalar& o) const {
  if (exact() && o.exact()) return rational() == o.rational();
  return to_double() == o.to_double();
}

}  // namespace npk
