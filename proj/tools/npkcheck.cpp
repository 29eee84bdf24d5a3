// npkcheck: run identity suites on catalog models, curvature points and
// three-forms.
#include <CLI11.hpp>

#include <iostream>

#include "npk/suites.hpp"

using namespace npk;

namespace {

Backend parse_backend(const std::string& s) {
  if (s == "exact") return Backend::Exact;
  if (s == "float") return Backend::Float;
  throw Error(ErrorKind::ParseError, "backend is exact or float");
}

template <class F>
int threeform_tool(const std::string& mode, const Json& j, double tol) {
  auto t = threeform_from_json<F>(j);
  auto sp = r_from_threeform(t, tol);
  auto sk = support_kernel(t, tol);
  std::printf("dim %d, length %s, nice %s\n", t.dim(), [&] {
    if constexpr (FieldTraits<F>::exact) return format_rational(form_length(t));
    else return std::to_string(form_length(t));
  }().c_str(), is_nice(t, tol) ? "yes" : "no");
  std::printf("support dim %d, kernel dim %d, support J-invariant %s\n", sk.dim_support, sk.dim_kernel,
              sk.support_j_invariant ? "yes" : "no");
  std::printf("r spectrum:");
  for (const auto& c : sp.clusters) {
    if (std::abs(c.value.imag()) > 1e-9) std::printf(" %.10g%+.10gi", c.value.real(), c.value.imag());
    else std::printf(" %.10g", c.value.real() == 0 ? 0.0 : c.value.real());
    std::printf(" (x%d", c.algebraic);
    if (c.geometric != c.algebraic) std::printf(", geometric %d", c.geometric);
    std::printf(")");
  }
  std::printf("\ndecomposable %s\n", sp.decomposable ? "yes" : "no");
  if (t.dim() == 10 && t.orthonormal()) std::printf("class %s\n", to_string(classify_dim10(sp)));

  if (mode == "normal-form") {
    if (!is_nice(t, tol)) throw Error(ErrorKind::PreconditionFailed, "normal form needs a form of nonzero length");
    if (t.dim() == 10) {
      auto nf = normal_form_dim10(t);
      std::printf("case %s\nalpha %.12g\nbeta %.12g\n", nf.kind == Dim10Case::First ? "i" : "ii", nf.alpha, nf.beta);
      std::printf("eps");
      for (int e : nf.eps) std::printf(" %+d", e);
      std::printf("\nreconstruction residual %.3e\n", nf.reconstruction_residual);
    } else if (t.dim() == 8) {
      auto nf = normal_form_dim8(t, tol);
      std::printf("kernel plane residual %.3e, non-isotropic %s\n", nf.kernel_residual,
                  nf.kernel_nonisotropic ? "yes" : "no");
    } else {
      throw Error(ErrorKind::PreconditionFailed, "normal forms exist for dimensions 8 and 10");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npkcheck: identity checks for nearly pseudo-Kaehler geometry"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string backend = "exact", convention = "gray";
  auto* run = app.add_subcommand("run", "run identity suites on a target");
  run->add_option("--target", cfg.target, "builtin id, builtin:<id>, or a JSON file")->required();
  run->add_option("--suite", cfg.suites, "suite name, repeatable (default all)")->take_all();
  run->add_option("--tol", cfg.tol, "tolerance for float comparisons");
  run->add_option("--seed", cfg.seed, "seed for sampled checks");
  run->add_option("--format", cfg.format, "text or json");
  run->add_option("--backend", backend, "exact or float");
  run->add_option("--convention", convention, "curvature convention of the identities: gray or standard");

  std::string tf_mode, tf_file, tf_backend = "exact";
  double tf_tol = 1e-10;
  auto* tf = app.add_subcommand("threeform", "normal form and r-spectrum of a three-form file");
  tf->add_option("mode", tf_mode, "normal-form or spectrum")->required()->check(CLI::IsMember({"normal-form", "spectrum"}));
  tf->add_option("file", tf_file, "three-form JSON file")->required();
  tf->add_option("--backend", tf_backend, "exact or float");
  tf->add_option("--tol", tf_tol, "tolerance");

  auto* list = app.add_subcommand("list", "list builtin models with their expected results");

  std::string ex_id, ex_out;
  bool ex_point = false;
  auto* ex = app.add_subcommand("export", "write a builtin model (or its origin point) as JSON");
  ex->add_option("id", ex_id, "builtin id")->required();
  ex->add_option("--out", ex_out, "output file (default stdout)");
  ex->add_flag("--point", ex_point, "export the curvature point at the origin instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitLoad;
  }

  try {
    if (*run) {
      if (cfg.suites.empty()) cfg.suites = {"all"};
      cfg.backend = parse_backend(backend);
      if (convention == "gray") cfg.convention = Convention::Gray;
      else if (convention == "standard") cfg.convention = Convention::Standard;
      else throw Error(ErrorKind::ParseError, "convention is gray or standard");
      validate_config(cfg);
      auto rep = run_suites(cfg);
      if (cfg.format == "json") std::cout << report_to_json(rep, cfg).dump(2) << "\n";
      else std::cout << report_to_text(rep);
      return rep.exit_code;
    }
    if (*tf) {
      Json j = read_json_file(tf_file);
      if (parse_backend(tf_backend) == Backend::Exact && json_is_exact(j))
        return threeform_tool<Rational>(tf_mode, j, tf_tol);
      return threeform_tool<double>(tf_mode, j, tf_tol);
    }
    if (*list) {
      for (const auto& e : list_builtins()) {
        std::printf("%-20s dim %d  %s\n", e.id.c_str(), e.model.dim_m(), e.notes.c_str());
        for (const auto& [k, v] : e.expected) std::printf("    %-26s %-40s [%s]\n", k.c_str(), v.value.c_str(), v.source.c_str());
      }
      return 0;
    }
    if (*ex) {
      auto e = load_entry(ex_id);
      Json j = ex_point ? point_to_json(point_at_origin<Rational>(e.model)) : entry_to_json(e);
      if (ex_out.empty()) std::cout << j.dump(2) << "\n";
      else write_json_file(ex_out, j);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_load_error(e.kind()) ? kExitLoad : kExitPrecondition;
  }
  return 0;
}
