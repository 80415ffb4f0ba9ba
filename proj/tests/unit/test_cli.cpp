#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "torus_vrep/cli.hpp"
#include "torus_vrep/io.hpp"

using namespace tvr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "torus_vrep_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string binary() {
  const char* b = std::getenv("TORUS_VREP_BIN");
  return b ? b : "";
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("solve of a free particle") {
  const auto dir = scratch("solve");
  const int code = run({"solve", "--n", "1", "--cutoff", "8", "--potential", "zero", "--out", dir.string()});
  CHECK(code == kExitOk);
  const auto j = Json::parse(slurp(dir / "result.json"));
  CHECK(j["schema"] == "torus-vrep/1");
  CHECK(j["energy"].get<double>() == 0.0);
  CHECK(j["degeneracy"] == 1);
  const auto csv = slurp(dir / "profile.csv");
  CHECK(csv.rfind("x,rho,v\n", 0) == 0);
}

TEST_CASE("identical configuration gives byte-identical output") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> common{"solve", "--n", "2", "--cutoff", "4", "--spinful", "--interaction", "delta",
                                        "--potential", "cosine", "--amplitude", "2", "--seed", "7"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(run(args) == kExitOk);
  args = common;
  args.insert(args.end(), {"--out", b.string(), "--workers", "1"});
  REQUIRE(run(args) == kExitOk);
  CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
  CHECK(slurp(a / "profile.csv") == slurp(b / "profile.csv"));
}

TEST_CASE("emitted densities reload to the same object") {
  const auto dir = scratch("example");
  REQUIRE(run({"example", "cosine", "--amplitude", "0.5", "--n", "2", "--out", dir.string()}) == kExitOk);
  const auto rho = density_from_json(read_json((dir / "cosine.json").string()));
  CHECK(rho.n_particles() == 2);
  CHECK(dump_json(density_to_json(rho, 256)) == slurp(dir / "cosine.json"));
}

TEST_CASE("verify kinetic bounds for the delta comb") {
  const auto dir = scratch("verify");
  const int code = run({"verify", "kinetic-bounds", "--potential", "delta", "--gamma", "1", "--eps", "0.1", "--n", "1",
                        "--cutoff", "3", "--out", dir.string()});
  CHECK(code == kExitOk);
  const auto j = Json::parse(slurp(dir / "result.json"));
  CHECK(j["bound"]["a"].get<double>() == 0.1);
  CHECK(j["bound"]["b"].get<double>() > 0.0);
  CHECK(j["report"]["samples"] == 500);
  CHECK(j["pass"] == true);
}

TEST_CASE("undersized explicit constants fail verification with exit 2") {
  const auto dir = scratch("verify_fail");
  const int code = run({"verify", "coercivity", "--potential", "cosine", "--amplitude", "80", "--bound-a", "0.1",
                        "--bound-b", "0", "--cutoff", "3", "--out", dir.string()});
  CHECK(code == kExitValidation);
  CHECK(Json::parse(slurp(dir / "result.json"))["pass"] == false);
}

TEST_CASE("invalid arguments exit with 2") {
  const auto dir = scratch("invalid");
  CHECK(run({"solve", "--n", "0", "--out", dir.string()}) == kExitValidation);
  CHECK(run({"solve", "--potential", "file", "--out", dir.string()}) == kExitValidation);
  CHECK(run({"solve", "--n", "9", "--cutoff", "1", "--out", dir.string()}) == kExitValidation);
  CHECK(run({"frobnicate"}) == kExitValidation);
  CHECK(run({"example", "nonsense"}) == kExitValidation);
}

TEST_CASE("config file supplies options and flags take precedence") {
  const auto dir = scratch("config");
  std::ofstream(dir / "run.cfg") << "n = 2\ncutoff = 3\npotential = zero\n";
  REQUIRE(run({"solve", "--config", (dir / "run.cfg").string(), "--cutoff", "4", "--out", dir.string()}) == kExitOk);
  const auto j = Json::parse(slurp(dir / "result.json"));
  CHECK(j["model"]["n_particles"] == 2);
  CHECK(j["model"]["cutoff"] == 4);
}

TEST_CASE("malformed config exits with 2 and names the field") {
  const auto bin = binary();
  if (bin.empty()) SKIP("TORUS_VREP_BIN not set");
  const auto dir = scratch("bad_config");
  std::ofstream(dir / "run.cfg") << "n = many\n";
  const int code = shell(bin + " solve --config " + (dir / "run.cfg").string() + " --out " + dir.string() + " > " +
                         (dir / "stdout").string() + " 2> " + (dir / "stderr").string());
  CHECK(code == kExitValidation);
  CHECK(slurp(dir / "stderr").find("--n") != std::string::npos);

  const auto bad_json = dir / "rho.json";
  std::ofstream(bad_json) << "{\"kind\": \"density\", \"n_particles\": 1, \"cutoff\": 1, \"coeff_re\": [1.0]}";
  const int code2 = shell(bin + " invert --density " + bad_json.string() + " --out " + dir.string() + " > " +
                          (dir / "stdout").string() + " 2> " + (dir / "stderr").string());
  CHECK(code2 == kExitValidation);
  CHECK(slurp(dir / "stderr").find("coeff_re") != std::string::npos);
}

TEST_CASE("Englisch example piped into invert writes a certificate") {
  const auto bin = binary();
  if (bin.empty()) SKIP("TORUS_VREP_BIN not set");
  const auto dir = scratch("pipeline");
  const int code = shell(bin + " example englisch --a 1 --b 0.5 --alpha 0.25 --cutoff 8 | " + bin +
                         " invert --cutoff 8 --out " + dir.string() + " > " + (dir / "stdout").string());
  CHECK((code == kExitOk || code == kExitNonConvergence));
  const auto cert = Json::parse(slurp(dir / "certificate.json"));
  CHECK(cert.contains("D"));
  CHECK(cert.contains("P"));
  CHECK(cert["weak_duality"] == true);
  CHECK(slurp(dir / "trace.csv").rfind("iter,G,mismatch,step\n", 0) == 0);
  const auto v = potential_from_json(read_json((dir / "potential.json").string()));
  CHECK(v.cutoff() == 8);
}

TEST_CASE("nrep writes the reconstruction table") {
  const auto dir = scratch("nrep");
  REQUIRE(run({"example", "cosine", "--amplitude", "0.5", "--n", "3", "--out", dir.string()}) == kExitOk);
  REQUIRE(run({"nrep", "--density", (dir / "cosine.json").string(), "--out", dir.string()}) == kExitOk);
  const auto j = Json::parse(slurp(dir / "result.json"));
  CHECK(j["bound_holds"] == true);
  CHECK(j["reconstruction_error"].get<double>() < 1e-10);
  CHECK(slurp(dir / "nrep.csv").rfind("x,rho_in,rho_reconstructed,abs_phi_0,abs_phi_1,abs_phi_2\n", 0) == 0);
}
