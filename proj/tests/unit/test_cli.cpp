#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "recourse_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  fs::create_directories(kDir);
  fs::path log = kDir / "log.txt";
  std::string cmd = std::string(RECOURSE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(log)};
}

fs::path out(const std::string& name) { return kDir / name; }

}  // namespace

TEST_CASE("scan1d verdicts and exit codes") {
  Run q = cli("scan1d --model quad --utility diff --tau 1 --delta 2 --out " + out("quad").string());
  CHECK(q.code == 0);
  auto cert = nlohmann::json::parse(slurp(out("quad") / "certificate.json"));
  CHECK(cert["verdict"] == "impossible");
  CHECK(cert["config"]["problem"]["model"] == "quad");
  CHECK(cert["input_hash"].get<std::string>().size() == 16);
  CHECK(cli("scan1d --model quad --expect-possible --out " + out("quad2").string()).code == 2);

  Run n = cli("scan1d --model notch --utility diff --tau 0.6 --delta 1 --out " + out("notch").string());
  CHECK(n.code == 0);
  fs::path phi = out("notch") / "phi.csv";
  REQUIRE(fs::exists(phi));
  CHECK(slurp(phi).rfind("# config ", 0) == 0);
  Run v = cli("verify --model notch --utility diff --tau 0.6 --delta 1 --phi " + phi.string() + " --out " +
              out("notch_verify").string());
  CHECK(v.code == 0);
  auto verdicts = nlohmann::json::parse(slurp(out("notch_verify") / "verdicts.json"));
  CHECK(verdicts["violated"] == 0);
}

TEST_CASE("attribute") {
  Run ig = cli("attribute --model gauss --method ig --x 1 --out " + out("ig").string());
  REQUIRE(ig.code == 0);
  CHECK(std::abs(std::stod(ig.out) - (std::exp(-1.0) - 1.0)) < 1e-6);
  Run vg = cli("attribute --model linear --param beta=1,2,3 --method vg --x 0,0,0 --out " + out("vg").string());
  CHECK(vg.out == "1\n2\n3\n");
  Run shap = cli("attribute --model linear --param beta=1,2,3 --method shap --x 1,1,1 --out " + out("shap").string());
  CHECK(shap.out == "1\n2\n3\n");
  CHECK(cli("attribute --model nope --out " + out("nope").string()).code != 0);
}

TEST_CASE("verify report-only and probe") {
  CHECK(cli("verify --model quad --method zero --out " + out("zero").string()).code == 2);
  CHECK(cli("verify --model quad --method zero --report-only --out " + out("zero").string()).code == 0);
  Run p = cli("probe --model circle --utility class --tau 0 --delta 1 --method projection --out " + out("probe").string());
  CHECK(p.code == 0);
  auto j = nlohmann::json::parse(slurp(out("probe") / "jumps.json"));
  CHECK(j["jumps"].size() >= 1);
}

TEST_CASE("configuration files") {
  fs::create_directories(kDir);
  std::ofstream(kDir / "good.toml") << "[problem]\nmodel = \"quad\"\ntau = 1.0\ndelta = 2.0\n\n[grid]\nn = 11\n";
  std::ofstream(kDir / "unknown.toml") << "[problem]\nmodle = \"quad\"\n";
  std::ofstream(kDir / "type.toml") << "[problem]\ntau = \"one\"\n";
  std::ofstream(kDir / "broken.toml") << "[problem\nmodel = 1\n";
  CHECK(cli("verify --method sg --report-only --config " + (kDir / "good.toml").string() + " --out " +
            out("cfg").string())
            .code == 0);
  auto j = nlohmann::json::parse(slurp(out("cfg") / "verdicts.json"));
  CHECK(j["total"] == 11);
  // Flags override the file.
  cli("verify --method sg --report-only --tau 2 --config " + (kDir / "good.toml").string() + " --out " +
      out("cfg2").string());
  CHECK(nlohmann::json::parse(slurp(out("cfg2") / "verdicts.json"))["config"]["problem"]["tau"] == 2.0);
  Run u = cli("battery --config " + (kDir / "unknown.toml").string());
  CHECK(u.code == 1);
  CHECK(u.out.find("problem.modle") != std::string::npos);
  CHECK(cli("battery --config " + (kDir / "type.toml").string()).code == 1);
  Run b = cli("battery --config " + (kDir / "broken.toml").string());
  CHECK(b.code == 1);
  CHECK(b.out.find("broken.toml:1:") != std::string::npos);
  CHECK(cli("frobnicate").code == 1);
}

TEST_CASE("battery and axes") {
  Run b = cli("battery --out " + out("battery").string());
  CHECK(b.code == 0);
  CHECK(nlohmann::json::parse(slurp(out("battery") / "battery.json"))["all_passed"] == true);
  Run a = cli("axes --model circle_sq --utility flip --tau 0 --delta 1 --constraint sparse:1 --representation exact "
              "--out " + out("axes").string());
  CHECK(a.code == 0);
  CHECK(a.out.find("impossible") != std::string::npos);
}
