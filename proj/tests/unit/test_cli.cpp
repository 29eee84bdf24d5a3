#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace {

const std::string kCli = NPK_CLI_PATH;
const std::string kSource = NPK_SOURCE_DIR;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = kCli + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

nlohmann::json cli_json(const std::string& args, int& code) {
  Run r = cli(args + " --format json");
  code = r.code;
  return nlohmann::json::parse(r.out);
}

std::string fixture(const std::string& name) { return kSource + "/fixtures/" + name; }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("full run on su3-flag exits 0") {
  Run r = cli("run --target su3-flag --tol 1e-10");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "0 failed"));
  CHECK(cli("run --target builtin:su3-flag --backend float").code == 0);
}

TEST_CASE("twistor suite on cp3-twistor reports kappa, alpha and the fiber curvature") {
  int code = -1;
  auto j = cli_json("run --target cp3-twistor --suite twistor --tol 1e-10", code);
  CHECK(code == 0);
  CHECK(j["version"] == 1);
  CHECK(j["convention"].contains("identities"));
  const auto& f = j["fields"];
  CHECK(f["alpha"] == "2");
  CHECK(f["kappa"] == "-2");
  CHECK(f["K_fiber"] == "8");
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("anchor"));
    CHECK(c.contains("residual"));
    CHECK(c.contains("tol"));
    CHECK(c.contains("pass"));
    CHECK(c.contains("witness"));
  }
}

TEST_CASE("injected fault exits 4 and names the 4-tuple") {
  Run r = cli("run --target " + fixture("su3_flag_fault.json") + " --suite gray");
  CHECK(r.code == 4);
  CHECK(contains(r.out, "witness (0,1,0,1)"));
  int code = -1;
  auto j = cli_json("run --target " + fixture("su3_flag_fault.json") + " --suite gray", code);
  CHECK(code == 4);
  bool found = false;
  for (const auto& c : j["checks"])
    if (!c["pass"].get<bool>()) {
      CHECK(c["witness"].size() == 4);
      found = true;
    }
  CHECK(found);
  // The unperturbed point passes.
  CHECK(cli("run --target " + fixture("su3_flag_point.json")).code == 0);
}

TEST_CASE("load errors exit 2") {
  CHECK(cli("run --target /nonexistent/model.json").code == 2);
  CHECK(cli("run --target nope").code == 2);
  CHECK(cli("run --target su3-flag --suite bogus").code == 2);
  CHECK(cli("run --target su3-flag --tol -1").code == 2);
  CHECK(cli("run --target su3-flag --backend fast").code == 2);
  CHECK(cli("run").code == 2);
  auto p = std::filesystem::temp_directory_path() / "npk_cli_float_form.json";
  std::ofstream(p) << R"({"kind": "threeform", "dim": 6, "eps": [1,1,1,1,1,1], "assignments": [[0,1,2,0.5]]})";
  CHECK(cli("run --target " + p.string()).code == 2);
  CHECK(cli("run --target " + p.string() + " --backend float").code == 0);
  auto bad = std::filesystem::temp_directory_path() / "npk_cli_bad.json";
  std::ofstream(bad) << "{";
  CHECK(cli("run --target " + bad.string()).code == 2);
}

TEST_CASE("a named suite that does not apply exits 3") {
  Run r = cli("run --target gxg-su2 --suite twistor");
  CHECK(r.code == 3);
  CHECK(contains(r.out, "twistor"));
  CHECK(cli("run --target flat --suite quat").code == 3);
  // Under "all" the same suite is skipped.
  CHECK(cli("run --target gxg-su2").code == 0);
}

TEST_CASE("identity failures exit 4") {
  CHECK(cli("run --target su3-flag-misscaled").code == 4);
}

TEST_CASE("reports are deterministic") {
  int a = -1, b = -1;
  auto j1 = cli_json("run --target para-twistor --seed 11", a);
  auto j2 = cli_json("run --target para-twistor --seed 11", b);
  CHECK(a == b);
  CHECK(j1 == j2);
  CHECK(j1["seed"] == 11);
}

TEST_CASE("three-form tools") {
  Run c1 = cli("threeform spectrum " + fixture("dim10_case1.json"));
  CHECK(c1.code == 0);
  CHECK(contains(c1.out, "twistorial-candidate"));
  CHECK(contains(c1.out, "4 (x4) 16 (x4) 20 (x2)"));
  Run b0 = cli("threeform normal-form " + fixture("dim10_beta0.json"));
  CHECK(b0.code == 0);
  CHECK(contains(b0.out, "splits-off-Kähler"));
  CHECK(contains(b0.out, "beta 0"));
  Run c2 = cli("threeform normal-form " + fixture("dim10_case2.json"));
  CHECK(c2.code == 0);
  CHECK(contains(c2.out, "not-decomposable"));
  CHECK(contains(c2.out, "case ii"));
  CHECK(cli("threeform spectrum /nonexistent.json").code == 2);
  CHECK(cli("threeform transform " + fixture("dim10_case1.json")).code == 2);
}

TEST_CASE("list and export") {
  Run l = cli("list");
  CHECK(l.code == 0);
  for (const char* id : {"su3-flag", "gxg-su2", "gxg-sl2r", "cp3-twistor"}) CHECK(contains(l.out, id));
  auto p = std::filesystem::temp_directory_path() / "npk_cli_export.json";
  CHECK(cli("export gxg-sl2r --out " + p.string()).code == 0);
  CHECK(cli("run --target " + p.string() + " --suite gray --suite einstein").code == 0);
  CHECK(cli("export nope").code == 2);
}
