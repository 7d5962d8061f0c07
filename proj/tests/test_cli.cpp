// Copyright 2026 The pevmech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

namespace {

using Json = nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the tool through the shell; `env` is an optional VAR=VALUE prefix.
CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += std::string(MECH_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("allocate reports the welfare-maximizing allocation") {
  const CliResult r =
      run_cli("allocate --scenario bundled:table1 --format json");
  REQUIRE(r.exit_code == 0);
  const Json j = Json::parse(r.output);
  CHECK(j["chosen"] == "tau_prime");
  CHECK(j["welfare"] == 0.5);
  CHECK(j["ledger"]["entries"].size() == 3);

  const CliResult table = run_cli("allocate --scenario bundled:table1");
  CHECK(table.exit_code == 0);
  CHECK(table.output.find("tau_prime") != std::string::npos);
}

TEST_CASE("report overrides steer the chosen allocation") {
  const CliResult r = run_cli(
      "allocate --scenario bundled:table1 --report-pos 0:tau:0.6 "
      "--format json");
  REQUIRE(r.exit_code == 0);
  const Json j = Json::parse(r.output);
  CHECK(j["chosen"] == "tau");
  CHECK(j["welfare"] == 0.6);

  // Malformed or out-of-range specs are usage errors.
  CHECK(run_cli("allocate --scenario bundled:table1 --report-pos 0:tau")
            .exit_code == 2);
  CHECK(run_cli("allocate --scenario bundled:table1 --report-pos 0:tau:1.5")
            .exit_code == 2);
  CHECK(run_cli("allocate --scenario bundled:table1 --report-pos 9:tau:0.5")
            .exit_code == 2);
}

TEST_CASE("usage mistakes exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("allocate").exit_code == 2);  // --scenario is required
  CHECK(run_cli("allocate --scenario bundled:no_such_bundle").exit_code == 2);
  CHECK(run_cli("allocate --scenario /nonexistent.json").exit_code == 2);
  CHECK(run_cli("allocate --scenario bundled:table1 --format yaml")
            .exit_code == 2);
  CHECK(run_cli("verify-truthful --scenario bundled:table1 --scope sideways")
            .exit_code == 2);
  CHECK(run_cli("verify-truthful --scenario bundled:table1 --pos-grid 0.5,1.5")
            .exit_code == 2);
  CHECK(run_cli("payments --scenario bundled:table1 --mechanism pev-trust")
            .exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("truthfulness sweeps set the violation exit code") {
  const CliResult bad = run_cli(
      "verify-truthful --scenario bundled:table1 --mechanism groves-zero "
      "--format json");
  REQUIRE(bad.exit_code == 3);
  const Json j = Json::parse(bad.output);
  REQUIRE(j.is_array());
  CHECK(j[0]["agent"] == 0);
  CHECK(j[0]["verdict"] == "manipulation_found");
  CHECK(j[0]["first_profitable"]["misreport"] == "alloc=tau pos=0.6 scale=0");
  CHECK_FALSE(j[0].contains("ledger"));  // slim per-agent summaries

  const CliResult good =
      run_cli("verify-truthful --scenario bundled:table1 --format json");
  CHECK(good.exit_code == 0);
  const Json g = Json::parse(good.output);
  CHECK(g[0]["verdict"] == "no_profitable_deviation_found");

  const CliResult one = run_cli(
      "verify-truthful --scenario bundled:table1 --mechanism groves-zero "
      "--agent 1 --format json");
  CHECK(one.exit_code == 0);
  CHECK(Json::parse(one.output).size() == 1);
}

TEST_CASE("participation check flags the negative spectator") {
  CHECK(run_cli("verify-ir --scenario bundled:ir_negative").exit_code == 3);
  const CliResult r =
      run_cli("verify-ir --scenario bundled:ir_negative --format json");
  REQUIRE(r.exit_code == 3);
  const Json j = Json::parse(r.output);
  CHECK(j["static_ok"] == false);
  CHECK(j["static_witness"]["agent"] == 0);
  CHECK(j["empirical_min_utility"] == -1.0);
  CHECK(run_cli("verify-ir --scenario bundled:table1").exit_code == 0);
}

TEST_CASE("multilinearity check prints the frozen witness") {
  const CliResult r =
      run_cli("check-multilinear --scenario bundled:table1_square");
  REQUIRE(r.exit_code == 3);
  CHECK(r.output.find("tau") != std::string::npos);
  CHECK(r.output.find("0.25") != std::string::npos);
  CHECK(r.output.find("0.5") != std::string::npos);
  CHECK(run_cli("check-multilinear --scenario bundled:table1").exit_code == 0);

  const CliResult j = run_cli(
      "check-multilinear --scenario bundled:table1_square --format json");
  REQUIRE(j.exit_code == 3);
  const Json doc = Json::parse(j.output);
  CHECK(doc["is_multilinear"] == false);
  CHECK(doc["witness"]["allocation"] == "tau");
  CHECK(doc["witness"]["point"] == Json::parse("[0.5, 1.0]"));
}

TEST_CASE("family search reports the tuned scenario") {
  const CliResult r = run_cli(
      "find-manipulation --scenario bundled:square_family --format json");
  REQUIRE(r.exit_code == 3);
  const Json j = Json::parse(r.output);
  CHECK(j["tuning"] == Json::parse("[1.0]"));
  CHECK(j["agent"] == 0);
  CHECK(j["misreport"] == "alloc=tau pos=0.6 scale=0");
  CHECK(j["tuned_scenario"]["mode"] == "plain");

  CHECK(run_cli("find-manipulation --scenario bundled:linear_family")
            .exit_code == 0);

  // Explicit tunables override the bundled ones.
  const CliResult tuned = run_cli(
      "find-manipulation --scenario bundled:linear_family "
      "--tune 1:tau_prime:0 --format json");
  CHECK(tuned.exit_code == 0);
  CHECK(run_cli("find-manipulation --scenario bundled:linear_family "
                "--tune 1:tau_prime:9")
            .exit_code == 2);
}

TEST_CASE("simulation seeds come from the flag or the environment") {
  const std::string args =
      "simulate --scenario bundled:table1 --replications 1 --format json";
  const CliResult flag = run_cli(args + " --seed 7");
  REQUIRE(flag.exit_code == 0);
  const Json j = Json::parse(flag.output);
  CHECK(j["chosen"] == "tau_prime");
  CHECK(j["success"]["0"] == true);

  const CliResult env = run_cli(args, "MECH_SEED=7");
  CHECK(env.exit_code == 0);
  CHECK(env.output == flag.output);

  // The flag wins over the environment.
  const CliResult both = run_cli(args + " --seed 7", "MECH_SEED=99");
  CHECK(both.output == flag.output);

  CHECK(run_cli(args, "MECH_SEED=notanumber").exit_code == 2);
}

TEST_CASE("monte carlo summaries are deterministic") {
  const std::string args =
      "simulate --scenario bundled:table1 --replications 500 --seed 42 "
      "--format json";
  const CliResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  const Json j = Json::parse(a.output);
  CHECK(j["replications"] == 500);
  CHECK(j["seed"] == 42);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["closed_form"] == 0.0);
  CHECK(j["rows"][1]["closed_form"] == 0.5);
  CHECK(run_cli(args).output == a.output);
}

TEST_CASE("trust ratings are printed per allocation") {
  const CliResult r =
      run_cli("aggregate-trust --scenario bundled:trust_weighted --format json");
  REQUIRE(r.exit_code == 0);
  const Json j = Json::parse(r.output);
  CHECK(j["a"] == Json::parse("[1.0, 0.87]"));
  CHECK(j["b"] == Json::parse("[0.63, 1.0]"));
  CHECK(j["null"] == Json::parse("[1.0, 1.0]"));

  CHECK(run_cli("aggregate-trust --scenario bundled:table1").exit_code == 2);
  CHECK(run_cli("payments --scenario bundled:trust_weighted --format json")
            .exit_code == 0);
}
