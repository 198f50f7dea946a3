// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.
//
// End-to-end tests of the command-line tool run as a subprocess. The binary
// path is injected at configure time via BLDUALITY_BIN.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(BLDUALITY_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.stdout_text.append(buf.data(), n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/blduality_cli_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("unknown subcommand exits 1 with usage") {
  RunResult r = run_cli("definitely-not-a-subcommand");
  CHECK(r.exit_code == 1);
  RunResult none = run_cli("");
  CHECK(none.exit_code == 1);
}

TEST_CASE("malformed JSON exits 2 without a report") {
  std::string path = write_temp("bad.json", "{\"p\": [0.5, ");
  RunResult r = run_cli("sdpi " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.stdout_text.empty());
}

TEST_CASE("schema violation exits 2") {
  std::string path = write_temp("noqx.json", "{\"channel\":{\"rows\":[[1.0]]}}");
  RunResult r = run_cli("sdpi " + path);
  CHECK(r.exit_code == 2);
  std::string neg =
      write_temp("neg.json",
                 "{\"qx\":{\"p\":[1.5,-0.5]},"
                 "\"channel\":{\"rows\":[[1,0],[0,1]]}}");
  CHECK(run_cli("sdpi " + neg).exit_code == 2);
}

TEST_CASE("report carries schema tag, digest, units and both unit systems") {
  std::string path = write_temp("wyner.json", "{\"sigma\":[[1,0.5],[0.5,1]]}");
  RunResult r = run_cli("wyner " + path);
  REQUIRE(r.exit_code == 0);
  nlohmann::json rep = nlohmann::json::parse(r.stdout_text);
  CHECK(rep.at("schema") == "blduality/1");
  CHECK(rep.at("subcommand") == "wyner");
  CHECK(rep.at("units") == "nats");
  CHECK(rep.contains("inputs_digest"));
  CHECK(rep.at("inputs_digest").is_string());
  double nats = rep.at("values").at("value_nats").get<double>();
  double bits = rep.at("values").at("value_bits").get<double>();
  CHECK(nats == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-6));
  CHECK(bits == doctest::Approx(nats / std::log(2.0)).epsilon(1e-12));
  CHECK(rep.at("tolerances").contains("wyner"));
}

TEST_CASE("--out writes the same report to a file") {
  std::string in = write_temp("sdpi_in.json",
                              "{\"qx\":{\"p\":[0.5,0.5]},"
                              "\"channel\":{\"rows\":[[0.9,0.1],[0.1,0.9]]}}");
  std::string out = "/tmp/blduality_cli_report_out.json";
  std::remove(out.c_str());
  RunResult r = run_cli("sdpi " + in + " --out " + out);
  REQUIRE(r.exit_code == 0);
  std::ifstream f(out);
  REQUIRE(f.good());
  std::string file_text((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  CHECK(file_text == r.stdout_text);
  nlohmann::json rep = nlohmann::json::parse(file_text);
  CHECK(rep.at("values").at("c_star").get<double>() ==
        doctest::Approx(1.5625).epsilon(1e-3));
}

TEST_CASE("reports are byte-identical across repeated runs, any worker count") {
  std::string in = write_temp(
      "fwd.json",
      "{\"qx\":{\"p\":[0.4,0.6]},"
      "\"channels\":[{\"rows\":[[0.8,0.2],[0.3,0.7]]}],"
      "\"refs\":[{\"w\":[0.5,0.5],\"normalized\":true}],\"c\":[1.3]}");
  RunResult a = run_cli("forward-constant " + in + " --seed 11 --workers 1");
  RunResult b = run_cli("forward-constant " + in + " --seed 11 --workers 4");
  RunResult c = run_cli("forward-constant " + in + " --seed 11 --workers 4");
  REQUIRE(a.exit_code == 0);
  CHECK(a.stdout_text == b.stdout_text);
  CHECK(b.stdout_text == c.stdout_text);

  std::string rev = write_temp(
      "rev.json",
      "{\"mac\":{\"rows\":[[1,0],[0,1],[0,1],[1,0]]},"
      "\"q_marginals\":[{\"p\":[0.5,0.5]},{\"p\":[0.5,0.5]}],"
      "\"r_y\":{\"w\":[0.5,0.5],\"normalized\":true},\"c\":[1,1]}");
  RunResult d = run_cli("reverse-constant " + rev + " --seed 2 --workers 2");
  RunResult e = run_cli("reverse-constant " + rev + " --seed 2 --workers 3");
  REQUIRE(d.exit_code == 0);
  CHECK(d.stdout_text == e.stdout_text);
}

TEST_CASE("different inputs give different digests, same input same digest") {
  std::string a = write_temp("dig_a.json", "{\"sigma\":[[1,0.2],[0.2,1]]}");
  std::string b = write_temp("dig_b.json", "{\"sigma\":[[1,0.3],[0.3,1]]}");
  nlohmann::json ra = nlohmann::json::parse(run_cli("wyner " + a).stdout_text);
  nlohmann::json rb = nlohmann::json::parse(run_cli("wyner " + b).stdout_text);
  nlohmann::json ra2 = nlohmann::json::parse(run_cli("wyner " + a).stdout_text);
  CHECK(ra.at("inputs_digest") != rb.at("inputs_digest"));
  CHECK(ra.at("inputs_digest") == ra2.at("inputs_digest"));
}

TEST_CASE("numerical failure (unbounded objective) exits 3") {
  std::string in = write_temp(
      "unbounded.json",
      "{\"M\":[[0.0]],\"c0\":0.0,\"c\":[0.3],"
      "\"channels\":[{\"A\":[[1.0]],\"sigma\":[[1.0]]}]}");
  RunResult r = run_cli("gaussian-f0 " + in);
  CHECK(r.exit_code == 3);
}

TEST_CASE("tolerance overrides are echoed in the report") {
  std::string in = write_temp("sh.json",
                              "{\"p_joint\":{\"p\":[0.125,0.125,0.125,0.125,"
                              "0.125,0.125,0.125,0.125]},\"m\":3}");
  RunResult r = run_cli("shearer " + in + " --tol shearer=1e-9");
  REQUIRE(r.exit_code == 0);
  nlohmann::json rep = nlohmann::json::parse(r.stdout_text);
  CHECK(rep.at("tolerances").at("shearer").get<double>() ==
        doctest::Approx(1e-9));
}

TEST_CASE("selftest quick passes and honors a designed-to-fail override") {
  RunResult ok = run_cli("selftest quick");
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("PASS") != std::string::npos);

  RunResult bad = run_cli("selftest quick --tol sdpi_bsc=0");
  CHECK(bad.exit_code == 3);
  CHECK(bad.stdout_text.find("FAIL") != std::string::npos);
  CHECK(bad.stdout_text.find("special_ineq") != std::string::npos);
  CHECK(bad.stdout_text.find("seed") != std::string::npos);
}
