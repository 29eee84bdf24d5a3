#include "npk/modelio.hpp"

#include <fstream>

namespace npk {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::MissingField, key);
  return j.at(key);
}

int as_int(const Json& v) {
  if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, "expected an integer, got " + v.dump());
  return v.get<int>();
}

std::vector<int> int_list(const Json& v) {
  if (!v.is_array()) throw Error(ErrorKind::ParseError, "expected an index list");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(as_int(x));
  return out;
}

template <class F>
Mat<F> mat_from_json(const Json& v, int n, const char* what) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " must have " + std::to_string(n) + " rows");
  Mat<F> m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != n)
      throw Error(ErrorKind::ShapeMismatch, std::string(what) + " row " + std::to_string(i));
    for (int k = 0; k < n; ++k) m(i, k) = scalar_from_json<F>(v[i][k]);
  }
  return m;
}

template <class F>
Json mat_to_json(const Mat<F>& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(scalar_to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::NotFound, "cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string file_kind(const Json& j) {
  const auto& k = field(j, "kind");
  if (!k.is_string()) throw Error(ErrorKind::ParseError, "kind must be a string");
  auto s = k.get<std::string>();
  if (s != "model" && s != "curvature_point" && s != "threeform") throw Error(ErrorKind::ParseError, "unknown kind " + s);
  return s;
}

bool json_is_exact(const Json& j) {
  if (j.is_number_float()) return false;
  if (j.is_array() || j.is_object())
    for (const auto& x : j)
      if (!json_is_exact(x)) return false;
  return true;
}

template <>
Rational scalar_from_json<Rational>(const Json& v) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw Error(ErrorKind::ParseError, "exact value expected (integer or \"p/q\"), got " + v.dump());
}

template <>
double scalar_from_json<double>(const Json& v) {
  if (v.is_number()) {
    double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorKind::NonFinite, "non-finite value");
    return d;
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    try {
      return parse_rational(s).get_d();
    } catch (const Error&) {
      size_t used = 0;
      double d = 0;
      try {
        d = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty()) throw Error(ErrorKind::ParseError, "not a number: " + s);
      if (!std::isfinite(d)) throw Error(ErrorKind::NonFinite, "non-finite value");
      return d;
    }
  }
  throw Error(ErrorKind::ParseError, "number expected, got " + v.dump());
}

template <>
Json scalar_to_json<Rational>(const Rational& x) {
  if (x.get_den() == 1 && x.get_num().fits_slong_p()) return Json(x.get_num().get_si());
  return Json(format_rational(x));
}

template <>
Json scalar_to_json<double>(const double& x) { return Json(x); }

CatalogEntry entry_from_json(const Json& j) {
  if (file_kind(j) != "model") throw Error(ErrorKind::ParseError, "not a model file");
  CatalogEntry e;
  auto& md = e.model;
  md.name = field(j, "name").get<std::string>();
  e.id = md.name;
  const int N = as_int(field(j, "dim"));
  if (N < 1) throw Error(ErrorKind::ShapeMismatch, "dim must be positive");
  if (j.contains("basis"))
    for (const auto& l : j.at("basis")) md.labels.push_back(l.get<std::string>());
  md.c = Tensor<Rational>(3, N);
  for (const auto& b : field(j, "brackets")) {
    if (!b.is_array() || b.size() != 4) throw Error(ErrorKind::ParseError, "bracket entries are [i,j,k,value]");
    int i = as_int(b[0]), k2 = as_int(b[1]), k = as_int(b[2]);
    if (i < 0 || k2 < 0 || k < 0 || i >= N || k2 >= N || k >= N) throw Error(ErrorKind::ShapeMismatch, "bracket index");
    Rational v = scalar_from_json<Rational>(b[3]);
    md.c(i, k2, k) += v;
    md.c(k2, i, k) -= v;
  }
  const auto& sp = field(j, "split");
  md.h = int_list(field(sp, "h"));
  md.m = int_list(field(sp, "m"));
  const int n = static_cast<int>(md.m.size());
  md.g = mat_from_json<Rational>(field(j, "metric"), n, "metric");
  md.J = mat_from_json<Rational>(field(j, "J"), n, "J");
  if (j.contains("hv")) md.split = HVSplit{int_list(field(j.at("hv"), "H")), int_list(field(j.at("hv"), "V"))};
  if (j.contains("metadata"))
    for (auto& [k, v] : j.at("metadata").items()) md.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  if (j.contains("expected"))
    for (auto& [k, v] : j.at("expected").items())
      e.expected[k] = {field(v, "value").get<std::string>(), field(v, "source").get<std::string>()};
  if (j.contains("notes")) e.notes = j.at("notes").get<std::string>();
  if (j.contains("gate"))
    for (const auto& s : j.at("gate")) e.gate.push_back(s.get<std::string>());
  return e;
}

Json entry_to_json(const CatalogEntry& e) {
  const auto& md = e.model;
  Json j;
  j["kind"] = "model";
  j["name"] = md.name;
  j["dim"] = md.dim_g();
  j["basis"] = md.labels;
  Json br = Json::array();
  const int N = md.dim_g();
  for (int i = 0; i < N; ++i)
    for (int k2 = i + 1; k2 < N; ++k2)
      for (int k = 0; k < N; ++k)
        if (md.c(i, k2, k) != 0) br.push_back({i, k2, k, scalar_to_json(md.c(i, k2, k))});
  j["brackets"] = br;
  j["split"] = {{"h", md.h}, {"m", md.m}};
  j["metric"] = mat_to_json(md.g);
  j["J"] = mat_to_json(md.J);
  if (md.split) j["hv"] = {{"H", md.split->H}, {"V", md.split->V}};
  j["metadata"] = md.metadata;
  Json ex = Json::object();
  for (const auto& [k, v] : e.expected) ex[k] = {{"value", v.value}, {"source", v.source}};
  j["expected"] = ex;
  j["notes"] = e.notes;
  j["gate"] = e.gate;
  return j;
}

template <class F>
CurvaturePoint<F> point_from_json(const Json& j) {
  if (file_kind(j) != "curvature_point") throw Error(ErrorKind::ParseError, "not a curvature point file");
  CurvaturePoint<F> cp;
  if (j.contains("label")) cp.label = j.at("label").get<std::string>();
  const int n = as_int(field(j, "dim"));
  cp.g = mat_from_json<F>(field(j, "metric"), n, "metric");
  cp.J = mat_from_json<F>(field(j, "J"), n, "J");
  const auto& dj = field(j, "nabla_J");
  if (!dj.is_array() || static_cast<int>(dj.size()) != n) throw Error(ErrorKind::ShapeMismatch, "nabla_J needs dim matrices");
  for (const auto& m : dj) cp.DJ.push_back(mat_from_json<F>(m, n, "nabla_J"));
  if (j.contains("nabla2_J")) {
    std::vector<std::vector<Mat<F>>> d2;
    for (const auto& row : j.at("nabla2_J")) {
      d2.emplace_back();
      for (const auto& m : row) d2.back().push_back(mat_from_json<F>(m, n, "nabla2_J"));
    }
    cp.D2J = std::move(d2);
  }
  const auto& cv = field(j, "curvature");
  std::string conv = cv.contains("convention") ? cv.at("convention").get<std::string>() : "standard";
  if (conv != "standard" && conv != "gray") throw Error(ErrorKind::ParseError, "unknown convention " + conv);
  cp.R = Tensor<F>(4, n, SymmetryClass::CurvatureLike);
  for (const auto& c : field(cv, "components")) {
    if (!c.is_array() || c.size() != 5) throw Error(ErrorKind::ParseError, "curvature entries are [w,x,y,z,value]");
    int idx[4];
    for (int s = 0; s < 4; ++s) {
      idx[s] = as_int(c[s]);
      if (idx[s] < 0 || idx[s] >= n) throw Error(ErrorKind::ShapeMismatch, "curvature index");
    }
    F v = scalar_from_json<F>(c[4]);
    if (conv == "gray") v = -v;
    cp.R(idx[0], idx[1], idx[2], idx[3]) = v;
  }
  if (j.contains("frame")) cp.frame.eps = int_list(j.at("frame"));
  require_complete(cp);
  return cp;
}

template <class F>
Json point_to_json(const CurvaturePoint<F>& cp) {
  Json j;
  j["kind"] = "curvature_point";
  j["label"] = cp.label;
  j["dim"] = cp.dim();
  j["metric"] = mat_to_json(cp.g);
  j["J"] = mat_to_json(cp.J);
  Json dj = Json::array();
  for (const auto& m : cp.DJ) dj.push_back(mat_to_json(m));
  j["nabla_J"] = dj;
  if (cp.D2J) {
    Json d2 = Json::array();
    for (const auto& row : *cp.D2J) {
      Json r = Json::array();
      for (const auto& m : row) r.push_back(mat_to_json(m));
      d2.push_back(r);
    }
    j["nabla2_J"] = d2;
  }
  Json comps = Json::array();
  for (size_t i = 0; i < cp.R.size(); ++i)
    if (cp.R.flat(i) != 0) {
      auto idx = cp.R.index_of(i);
      comps.push_back({idx[0], idx[1], idx[2], idx[3], scalar_to_json(cp.R.flat(i))});
    }
  j["curvature"] = {{"convention", "standard"}, {"components", comps}};
  if (!cp.frame.eps.empty()) j["frame"] = cp.frame.eps;
  return j;
}

template <class F>
ThreeForm<F> threeform_from_json(const Json& j) {
  if (file_kind(j) != "threeform") throw Error(ErrorKind::ParseError, "not a three-form file");
  const int n = as_int(field(j, "dim"));
  if (j.contains("assignments")) {
    PseudoFrame fr;
    fr.eps = int_list(field(j, "eps"));
    fr.adapted = true;
    if (fr.dim() != n || n % 2) throw Error(ErrorKind::ShapeMismatch, "eps must have dim entries, dim even");
    Mat<F> J = j.contains("J") ? mat_from_json<F>(j.at("J"), n, "J") : standard_J<F>(n / 2);
    std::vector<Assignment<F>> as;
    for (const auto& a : j.at("assignments")) {
      if (!a.is_array() || a.size() != 4) throw Error(ErrorKind::ParseError, "assignments are [i,j,k,value]");
      as.push_back({as_int(a[0]), as_int(a[1]), as_int(a[2]), scalar_from_json<F>(a[3])});
    }
    return extend_by_type(as, J, fr);
  }
  ThreeForm<F> t;
  t.g = mat_from_json<F>(field(j, "metric"), n, "metric");
  t.J = mat_from_json<F>(field(j, "J"), n, "J");
  t.eta = Tensor<F>(3, n, SymmetryClass::Alternating);
  if (j.contains("eps")) t.frame.eps = int_list(j.at("eps"));
  for (const auto& c : field(j, "components")) {
    if (!c.is_array() || c.size() != 4) throw Error(ErrorKind::ParseError, "components are [i,j,k,value]");
    int a = as_int(c[0]), b = as_int(c[1]), d = as_int(c[2]);
    if (a < 0 || b < 0 || d < 0 || a >= n || b >= n || d >= n) throw Error(ErrorKind::ShapeMismatch, "component index");
    F v = scalar_from_json<F>(c[3]);
    t.eta(a, b, d) = v;
    t.eta(b, d, a) = v;
    t.eta(d, a, b) = v;
    t.eta(b, a, d) = -v;
    t.eta(a, d, b) = -v;
    t.eta(d, b, a) = -v;
  }
  return t;
}

template <class F>
Json threeform_to_json(const ThreeForm<F>& t) {
  Json j;
  j["kind"] = "threeform";
  j["dim"] = t.dim();
  j["metric"] = mat_to_json(t.g);
  j["J"] = mat_to_json(t.J);
  if (t.orthonormal()) j["eps"] = t.frame.eps;
  Json comps = Json::array();
  const int n = t.dim();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        if (t.eta(a, b, c) != 0) comps.push_back({a, b, c, scalar_to_json(t.eta(a, b, c))});
  j["components"] = comps;
  return j;
}

#define NPK_INSTANTIATE(F)                                   \
  template CurvaturePoint<F> point_from_json(const Json&);   \
  template Json point_to_json(const CurvaturePoint<F>&);     \
  template ThreeForm<F> threeform_from_json(const Json&);    \
  template Json threeform_to_json(const ThreeForm<F>&);

NPK_INSTANTIATE(double)
NPK_INSTANTIATE(Rational)
#undef NPK_INSTANTIATE

}  // namespace npk
