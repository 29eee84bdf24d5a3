#include "npk/suites.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace npk {

namespace {

const std::vector<std::string> kOrder = {"gray", "type", "einstein", "thmcurv", "canonical", "d2j",
                                         "threeform", "submersion", "twistor", "reducible", "quat"};

bool precondition_kind(ErrorKind k) { return !is_load_error(k); }

template <class F>
std::string show(const F& x) {
  if constexpr (FieldTraits<F>::exact) return format_rational(x);
  else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
  }
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, RunReport& out) : cfg_(cfg), out_(out) {
    for (const auto& s : cfg.suites)
      if (s == "all") all_ = true;
      else requested_.push_back(s);
  }

  bool wants(const std::string& suite) const {
    return all_ || std::find(requested_.begin(), requested_.end(), suite) != requested_.end();
  }
  bool named(const std::string& suite) const {
    return std::find(requested_.begin(), requested_.end(), suite) != requested_.end();
  }

  void add(const std::string& suite, const IdentityReport& r) { out_.checks.push_back({suite, r}); }
  void add(const std::string& suite, const std::vector<IdentityReport>& rs) {
    for (const auto& r : rs) add(suite, r);
  }
  void field(const std::string& k, const std::string& v) { out_.fields[k] = v; }

  // An inapplicable suite is skipped under "all" and is a precondition
  // failure when requested by name.
  void not_applicable(const std::string& suite, const std::string& why) {
    if (named(suite)) {
      out_.errors.push_back(suite + ": " + why);
      precondition_ = true;
    } else {
      IdentityReport r;
      r.name = suite;
      r.anchor = "suite";
      r.skipped = true;
      r.pass = true;
      r.note = why;
      add(suite, r);
    }
  }

  template <class Fn>
  void guarded(const std::string& suite, Fn&& fn) {
    if (!wants(suite)) return;
    try {
      fn();
    } catch (const Error& e) {
      out_.errors.push_back(suite + ": " + e.what());
      if (precondition_kind(e.kind())) precondition_ = true;
      else load_ = true;
    }
  }

  void finish() {
    bool failed = false;
    for (const auto& c : out_.checks)
      if (!c.report.pass && !c.report.skipped) failed = true;
    if (load_) out_.exit_code = kExitLoad;
    else if (precondition_) out_.exit_code = kExitPrecondition;
    else if (failed) out_.exit_code = kExitIdentity;
    else out_.exit_code = kExitOk;
  }

  const RunConfig& cfg() const { return cfg_; }
  double tol() const { return cfg_.tol; }

 private:
  const RunConfig& cfg_;
  RunReport& out_;
  bool all_ = false;
  std::vector<std::string> requested_;
  bool load_ = false, precondition_ = false;
};

template <class F>
bool scalar_multiple_of_identity(const Mat<F>& m, double tol) {
  const int n = m.rows();
  F c = m(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!is_zero(F(m(i, j) - (i == j ? c : F(0))), FieldTraits<F>::exact ? 0.0 : tol * std::max(1.0, max_abs(m))))
        return false;
  return true;
}

template <class F>
void threeform_checks(Runner& run, const ThreeForm<F>& t, const std::string& suite) {
  const double tol = run.tol();
  auto simple = [&](const std::string& name, const std::string& anchor, double res, bool pass) {
    IdentityReport r;
    r.name = name;
    r.anchor = anchor;
    r.residual = res;
    r.tol = tol;
    r.pass = pass;
    return r;
  };
  const bool exact = FieldTraits<F>::exact;
  const double as = antisymmetry_residual(t), ty = type_residual(t);
  run.add(suite, simple("three-form alternating", "eta is totally skew", as, exact ? as == 0 : as <= tol));
  run.add(suite, simple("three-form type", "eta(JX,JY,Z) = -eta(X,Y,Z)", ty, exact ? ty == 0 : ty <= tol));
  const bool nice = is_nice(t, tol);
  run.field("form_length", show(form_length(t)));
  run.field("nice", nice ? "true" : "false");

  auto sk = support_kernel(t, tol);
  run.field("support_dim", std::to_string(sk.dim_support));
  run.field("kernel_dim", std::to_string(sk.dim_kernel));
  if (sk.dim_support > 0) {
    auto r = simple("support J-invariant", "J Sigma = Sigma, dim_C Sigma >= 3", 0.0,
                    sk.support_j_invariant && sk.dim_support >= 6);
    r.values["dim_support"] = std::to_string(sk.dim_support);
    run.add(suite, r);
    if (sk.support_nondegenerate)
      run.add(suite, simple("support is kernel complement", "Sigma = K^perp", 0.0, sk.support_is_kernel_perp));
  }

  auto sp = r_from_threeform(t, tol);
  const double rs = std::max(1.0, max_abs(sp.r));
  run.add(suite, simple("r symmetric", "g(rX,Y) = g(X,rY)", sp.symmetry_residual / rs, sp.symmetry_residual <= tol * rs));
  run.add(suite, simple("r commutes with J", "[J, r] = 0", sp.j_commutator / rs, sp.j_commutator <= tol * rs));
  run.add(suite, simple("r trace routes", "g(rX,Y) = -tr(A_Y A_X)", sp.trace_route_residual / rs,
                        sp.trace_route_residual <= tol * rs));
  std::ostringstream spec;
  for (size_t i = 0; i < sp.clusters.size(); ++i) {
    const auto& c = sp.clusters[i];
    char buf[80];
    if (std::abs(c.value.imag()) > 1e-9) std::snprintf(buf, sizeof buf, "%.12g%+.12gi:%d", c.value.real(), c.value.imag(), c.algebraic);
    else std::snprintf(buf, sizeof buf, "%.12g:%d", c.value.real(), c.algebraic);
    spec << (i ? ", " : "") << buf;
  }
  run.field("r_spectrum", "{" + spec.str() + "}");
  run.field("decomposable", sp.decomposable ? "true" : "false");
  run.field("diagonalizable", sp.diagonalizable ? "true" : "false");

  if (t.dim() == 8 && nice) {
    auto nf = normal_form_dim8(t, tol);
    auto r = simple("dim-8 kernel", "kernel plane spanned by X, JX, non-isotropic", nf.kernel_residual,
                    nf.kernel_residual <= 1e-8 && nf.kernel_nonisotropic && sk.dim_kernel == 2);
    run.add(suite, r);
  }
  if (t.dim() == 10 && t.orthonormal()) {
    run.field("dim10_class", to_string(classify_dim10(sp)));
    if (nice) {
      auto nf = normal_form_dim10(t);
      run.field("normal_form_case", nf.kind == Dim10Case::First ? "i" : "ii");
      run.field("normal_form_alpha", show(nf.alpha));
      run.field("normal_form_beta", show(nf.beta));
      run.add(suite, simple("dim-10 normal form", "eta rebuilt from the normal form and its frame",
                            nf.reconstruction_residual, nf.reconstruction_residual <= 1e-8));
    }
  }
}

// Checks on a single point, shared by models and curvature point files.
template <class F>
void point_suites(Runner& run, const CurvaturePoint<F>& cp, const Reductive<F>* red) {
  const double tol = run.tol();
  const Convention conv = run.cfg().convention;
  const int n = cp.dim();
  auto nk = nearly_kaehler_check(cp, tol);
  run.field("dim", std::to_string(n));
  run.field("nearly_kaehler", nk.nearly ? "true" : "false");
  run.field("strict", nk.strict ? "true" : "false");
  run.field("kaehler", nk.kaehler ? "true" : "false");
  const bool strict6 = n == 6 && nk.strict;

  run.guarded("gray", [&] {
    run.add("gray", point_invariants(cp, tol));
    run.add("gray", gray_identities(cp, conv, tol));
  });
  run.guarded("type", [&] {
    if (!strict6) return run.not_applicable("type", "needs a strict nearly Kaehler point of dimension 6");
    auto ct = constant_type(cp, tol, run.cfg().seed);
    run.add("type", std::vector<IdentityReport>{ct.polarized, ct.sampled, ct.sign_rule});
    run.field("alpha", show(ct.alpha));
    run.field("signature", ct.signature.str());
  });
  run.guarded("einstein", [&] {
    if (!strict6) return run.not_applicable("einstein", "needs a strict nearly Kaehler point of dimension 6");
    auto ein = einstein_check(cp, conv, tol);
    run.add("einstein", ein.report);
    run.field("lambda", show(ein.lambda));
    auto ct = constant_type(cp, tol, run.cfg().seed);
    Residual<F> r(std::max(1.0, std::abs(to_double(ct.alpha))));
    r.add(F(ein.lambda - F(5) * ct.alpha), {});
    auto rep = r.report("Einstein constant", "Ric = 5 alpha g", tol);
    rep.values["alpha"] = show(ct.alpha);
    rep.values["lambda"] = show(ein.lambda);
    run.add("einstein", rep);
  });
  run.guarded("thmcurv", [&] {
    if (!nk.nearly) return run.not_applicable("thmcurv", "needs a nearly Kaehler point");
    run.add("thmcurv", thm_curv_identity(cp, conv, tol));
    auto rp = ricci_pair(cp, conv, tol);
    run.add("thmcurv", rp.routes);
    if (nk.strict && scalar_multiple_of_identity(rp.r, tol)) {
      Residual<F> r(std::max(1.0, max_abs(rp.ric)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.add(F(rp.ric(i, j) - F(5) * rp.ric_star(i, j)), {i, j});
      run.add("thmcurv", r.report("Ric = 5 Ric*", "single r-eigenvalue", tol));
    }
  });
  run.guarded("canonical", [&] {
    auto rp = ricci_pair(cp, conv, tol);
    run.add("canonical", rp.j_commuting);
    run.add("canonical", canonical_curvature(cp, conv, tol).reports);
    if (red) run.add("canonical", canonical_connection_reports(*red, cp, nomizu(*red, cp.g), conv, tol));
  });
  run.guarded("d2j", [&] {
    if (!cp.D2J) return run.not_applicable("d2j", "point carries no second derivatives of J");
    run.add("d2j", second_derivative_identities(cp, conv, tol));
  });
  run.guarded("threeform", [&] {
    if (n % 2) return run.not_applicable("threeform", "odd dimension");
    threeform_checks(run, threeform_from_nabla_j(cp.DJ, cp.g, cp.J), "threeform");
  });
}

// The nearly Kaehler split used by the codimension-2 suites: the model itself
// when strict, else the flip of a Kaehler twistor split.
template <class F>
struct NkSplit {
  std::optional<SubmersionSplit<F>> split;
  bool from_flip = false;
  std::string why;
};

template <class F>
bool flip_candidate(const SubmersionSplit<F>& s, double tol, std::string& why) {
  auto nk = nearly_kaehler_check(s.point, tol);
  if (!nk.kaehler) {
    why = "twistor flip needs a Kaehler point";
    return false;
  }
  if (!j_invariant(s)) {
    why = "split is not J-invariant";
    return false;
  }
  return true;
}

template <class F>
NkSplit<F> nk_split(const SubmersionSplit<F>& s, double tol) {
  NkSplit<F> out;
  auto nk = nearly_kaehler_check(s.point, tol);
  if (nk.strict) {
    out.split = s;
    return out;
  }
  if (!flip_candidate(s, tol, out.why)) {
    out.why = "needs a strict nearly Kaehler point or a Kaehler twistor split (" + out.why + ")";
    return out;
  }
  auto fl = twistor_flip(s, tol);
  if (!fl.nk.strict) {
    out.why = "flipped point is not strict";
    return out;
  }
  out.split = fl.flipped;
  out.from_flip = true;
  return out;
}

template <class F>
void codim2(Runner& run, const std::string& suite, const SubmersionSplit<F>& s) {
  auto a = asquare_and_omega(s, run.tol());
  run.add(suite, a.reports);
  run.field("kappa", show(a.kappa));
  run.field("kappa_fiber", show(F(F(-4) * a.kappa)));
  run.field("eps_V", std::to_string(a.eps_v));
  auto fc = fiber_curvature(s, run.tol());
  run.add(suite, fc.reports);
  run.field("K_fiber", show(fc.K));
  run.field("alpha", show(fc.alpha));
  run.field(suite == "twistor" ? "flipped_signature" : "split_signature", gram_check(s.point.g).str());
}

template <class F>
void model_suites(Runner& run, const CatalogEntry& e) {
  const double tol = run.tol();
  validate(e.model);
  auto red = reductive_data<F>(e.model);
  auto cp = point_at_origin<F>(e.model);
  run.field("model", e.model.name);
  run.field("signature", gram_check(cp.g).str());
  point_suites(run, cp, &red);

  std::optional<SubmersionSplit<F>> split;
  if (e.model.split) split = make_split<F>(e.model);
  const char* nosplit = "model declares no H+V split";

  run.guarded("submersion", [&] {
    if (!split) return run.not_applicable("submersion", nosplit);
    run.add("submersion", split_reports(*split, tol));
    run.add("submersion", oneill_tensors(*split, tol).reports);
    for (auto [p, q] : std::vector<std::pair<long, long>>{{1, 2}, {2, 1}, {3, 1}, {-1, 1}})
      run.add("submersion", canonical_variation(*split, from_rational<F>(Rational(p, q)), tol).reports);
    if (nearly_kaehler_check(split->point, tol).kaehler)
      run.add("submersion", kahler_submersion_conditions(*split, tol));
  });
  run.guarded("twistor", [&] {
    if (!split) return run.not_applicable("twistor", nosplit);
    std::string why;
    if (!flip_candidate(*split, tol, why)) return run.not_applicable("twistor", why);
    run.add("twistor", kahler_submersion_conditions(*split, tol));
    auto fl = twistor_flip(*split, tol);
    run.add("twistor", fl.reports);
    run.field("flipped_strict", fl.nk.strict ? "true" : "false");
    if (!fl.nk.strict) return;
    run.add("twistor", gray_identities(fl.flipped.point, run.cfg().convention, tol));
    run.add("twistor", r_eigenbundles(fl.flipped, tol));
    codim2(run, "twistor", fl.flipped);
  });
  run.guarded("reducible", [&] {
    if (!split) return run.not_applicable("reducible", nosplit);
    auto ns = nk_split(*split, tol);
    if (!ns.split) return run.not_applicable("reducible", ns.why);
    run.add("reducible", reducible_case_identities(*ns.split, tol));
    if (!ns.from_flip) codim2(run, "reducible", *ns.split);
  });
  run.guarded("quat", [&] {
    if (!split) return run.not_applicable("quat", nosplit);
    auto ns = nk_split(make_split<double>(e.model), tol);
    if (!ns.split) return run.not_applicable("quat", ns.why);
    auto q = quaternionic_triple(*ns.split, std::max(tol, 1e-9), run.cfg().seed);
    run.add("quat", q.reports);
    run.field("triple_eps", std::to_string(q.eps[0]) + "," + std::to_string(q.eps[1]) + "," + std::to_string(q.eps[2]));
  });
}

template <class F>
void file_point_suites(Runner& run, const CurvaturePoint<F>& cp) {
  point_suites<F>(run, cp, nullptr);
  for (const char* s : {"submersion", "twistor", "reducible", "quat"})
    run.guarded(s, [&] { run.not_applicable(s, "needs a model with an H+V split"); });
}

template <class F>
void file_threeform_suites(Runner& run, const ThreeForm<F>& t) {
  for (const auto& s : kOrder) {
    if (s == "threeform") run.guarded(s, [&] { threeform_checks(run, t, "threeform"); });
    else run.guarded(s, [&] { run.not_applicable(s, "target is a three-form"); });
  }
}

std::string strip_builtin(const std::string& t) { return t.rfind("builtin:", 0) == 0 ? t.substr(8) : t; }

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    auto v = kOrder;
    v.push_back("all");
    return v;
  }();
  return names;
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.tol > 0)) throw Error(ErrorKind::ParseError, "tol must be positive");
  if (cfg.suites.empty()) throw Error(ErrorKind::ParseError, "no suites selected");
  for (const auto& s : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw Error(ErrorKind::ParseError, "unknown suite " + s);
  if (cfg.format != "text" && cfg.format != "json") throw Error(ErrorKind::ParseError, "format is text or json");
}

RunReport run_suites(const RunConfig& cfg) {
  RunReport out;
  out.target = cfg.target;
  Runner run(cfg, out);
  try {
    validate_config(cfg);
    const auto ids = builtin_ids();
    const std::string id = strip_builtin(cfg.target);
    const bool builtin = std::find(ids.begin(), ids.end(), id) != ids.end() || cfg.target.rfind("builtin:", 0) == 0;
    if (builtin || !std::filesystem::exists(cfg.target)) {
      if (!builtin && !std::filesystem::exists(cfg.target))
        throw Error(ErrorKind::NotFound, "no builtin or file named " + cfg.target);
      out.kind = "model";
      auto e = load_builtin(id);
      if (cfg.backend == Backend::Exact) model_suites<Rational>(run, e);
      else model_suites<double>(run, e);
    } else {
      Json j = read_json_file(cfg.target);
      out.kind = file_kind(j);
      const bool exact = cfg.backend == Backend::Exact;
      if (exact && !json_is_exact(j))
        throw Error(ErrorKind::ParseError, "file has floating-point values; use --backend float");
      if (out.kind == "model") {
        auto e = entry_from_json(j);
        if (exact) model_suites<Rational>(run, e);
        else model_suites<double>(run, e);
      } else if (out.kind == "curvature_point") {
        if (exact) file_point_suites(run, point_from_json<Rational>(j));
        else file_point_suites(run, point_from_json<double>(j));
      } else {
        if (exact) file_threeform_suites(run, threeform_from_json<Rational>(j));
        else file_threeform_suites(run, threeform_from_json<double>(j));
      }
    }
  } catch (const Error& e) {
    out.errors.push_back(e.what());
    out.exit_code = is_load_error(e.kind()) ? kExitLoad : kExitPrecondition;
    return out;
  }
  run.finish();
  return out;
}

Json report_to_json(const RunReport& r, const RunConfig& cfg) {
  Json j;
  j["version"] = 1;
  j["target"] = r.target;
  j["kind"] = r.kind;
  j["backend"] = cfg.backend == Backend::Exact ? "exact" : "float";
  j["convention"] = {{"stored", "standard"}, {"identities", to_string(cfg.convention)}};
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    const auto& x = c.report;
    Json cj = {{"suite", c.suite}, {"name", x.name},       {"anchor", x.anchor}, {"residual", x.residual},
               {"tol", x.tol},     {"pass", x.pass},       {"skipped", x.skipped}, {"witness", x.witness}};
    if (!x.note.empty()) cj["note"] = x.note;
    if (!x.values.empty()) cj["values"] = x.values;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["fields"] = r.fields;
  j["errors"] = r.errors;
  j["exit_code"] = r.exit_code;
  return j;
}

std::string report_to_text(const RunReport& r) {
  std::ostringstream os;
  os << "target " << r.target << (r.kind.empty() ? "" : " (" + r.kind + ")") << "\n";
  int pass = 0, fail = 0, skip = 0;
  for (const auto& c : r.checks) {
    const auto& x = c.report;
    const char* tag = x.skipped ? "SKIP" : (x.pass ? "PASS" : "FAIL");
    x.skipped ? ++skip : (x.pass ? ++pass : ++fail);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x.residual);
    os << "[" << tag << "] " << c.suite << ": " << x.name;
    if (!x.skipped) os << "  residual " << buf;
    if (!x.witness.empty()) os << "  witness (" << join(x.witness, ",") << ")";
    if (!x.note.empty()) os << "  -- " << x.note;
    os << "\n";
  }
  for (const auto& [k, v] : r.fields) os << "  " << k << " = " << v << "\n";
  for (const auto& e : r.errors) os << "error: " << e << "\n";
  os << pass << " passed, " << fail << " failed, " << skip << " skipped; exit " << r.exit_code << "\n";
  return os.str();
}

}  // namespace npk
