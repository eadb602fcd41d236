// Copyright 2026 The qtem Authors
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

#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <cmath>
#include <sstream>
#include <unistd.h>

#include "qtem/cli.hpp"

using namespace qtem::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string netlist(const std::string &name) {
    return std::string(QTEM_DATA_DIR) + "/netlists/" + name;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qtem_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUser);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"--version"}).code == kExitOk);
    CHECK(run({"frobnicate"}).code == kExitUser);
    CHECK(run({"protocol"}).code == kExitUser);
    CHECK(run({"protocol", "--k", "ten"}).code == kExitUser);
    CHECK(run({"--format", "xml", "qnd-check"}).code == kExitUser);
    CHECK(run({"spectrum", "/no/such/file.net"}).code == kExitUser);
    CHECK(run({"spectrum", netlist("lc.net"), "--stencil", "5"}).code == kExitUser);
    CHECK(run({"deflect", "--energy", "300", "--flux", "1phi0"}).code == kExitUser);
    CHECK(run({"deflect", "--energy", "300keV"}).code == kExitUser);
    CHECK(run({"dispersive", "--fr", "5GHz", "--fq", "5GHz", "--lambda", "0.01"}).code == kExitUser);
    CHECK(run({"dispersive", "--fr", "5GHz", "--fq", "6GHz", "--lambda", "0.2"}).code == kExitUser);
    CHECK(run({"scan", "--param", "bogus", "--from", "1", "--to", "2"}).code == kExitUser);
    CHECK(run({"spectrum", netlist("rf_squid.net"), "--exact-half-flux"}).code == kExitUser);
}

TEST_CASE("internal failures exit with 1") {
    const auto r = run({"spectrum", netlist("rf_squid.net"), "--grid", "-1phi0,1phi0,2001", "--check-refinement",
                        "--max-points", "2001"});
    CHECK(r.code == kExitInternal);
    CHECK(r.err.find("refinement") != std::string::npos);
    CHECK(run({"--out", "/no/such/dir/out.csv", "qnd-check"}).code == kExitInternal);
}

TEST_CASE("netlist errors name the line") {
    TempDir dir;
    const auto p = dir.path / "bad.net";
    std::ofstream(p) << "L Lr 1 0 1nH\nC Cr 1 0 1 pancake\n";
    const auto r = run({"spectrum", p.string()});
    CHECK(r.code == kExitUser);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("spectrum CSV") {
    const auto r = run({"spectrum", netlist("lc.net"), "--levels", "3"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,energy_J,energy_GHz,parity");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("spectrum JSON for the flux qubit") {
    const auto r = run({"--format", "json", "spectrum", netlist("flux_qubit.net"), "--exact-half-flux"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["levels"][0]["parity"] == "even");
    CHECK(j["levels"][1]["parity"] == "odd");
    CHECK(j["double_well"]["delta_phi_over_phi0"].get<double>() == doctest::Approx(0.7254).epsilon(1e-3));
    CHECK(j["flux_matrix_element"]["off_diagonal_Wb"].get<double>() > 0);
}

TEST_CASE("output file and manifest") {
    TempDir dir;
    const auto out = (dir.path / "p.csv").string();
    const auto r = run({"--seed", "11", "--out", out, "protocol", "--k", "4", "--delta", "0.2", "--trials", "1000"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(m["command"] == "protocol");
    CHECK(m["rng"]["algorithm"] == "philox4x32-10");
    CHECK(m["rng"]["master_seed"] == 11);
    CHECK(m["constants_version"] == "CODATA-2018");
    CHECK(m["parameters"]["k"] == 4);
    CHECK(m.contains("tool_version"));
    CHECK(m.contains("timestamp"));
    for (const auto &e : fs::directory_iterator(dir.path)) {
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
    }
}

TEST_CASE("replay reproduces outputs byte for byte") {
    TempDir dir;
    const std::vector<std::vector<std::string>> commands = {
        {"spectrum", netlist("flux_qubit.net")},
        {"--format", "json", "spectrum", netlist("flux_qubit.net"), "--wavefunctions"},
        {"dispersive", "--fr", "5GHz", "--fq", "6GHz", "--lambda", "0.01"},
        {"deflect", "--energy", "300keV", "--charge", "ne", "--tau", "1ps", "--fr", "5GHz"},
        {"budget", "--temperature", "20mK", "--fr", "5GHz"},
        {"--seed", "3", "protocol", "--k", "10", "--delta", "0.3", "--trials", "20000"},
        {"scan", "--param", "delta", "--from", "0.01", "--to", "0.3", "--points", "4", "--k", "5"},
    };
    int i = 0;
    for (auto args : commands) {
        const auto first = (dir.path / ("a" + std::to_string(i))).string();
        const auto second = (dir.path / ("b" + std::to_string(i))).string();
        ++i;
        args.insert(args.begin(), {"--out", first});
        REQUIRE(run(args).code == kExitOk);
        REQUIRE(run({"replay", first + ".manifest.json", "--out", second}).code == kExitOk);
        CHECK(slurp(first) == slurp(second));
    }
}

TEST_CASE("Monte Carlo output does not depend on workers") {
    const std::vector<std::string> base = {"--seed", "9", "protocol", "--k", "10", "--delta", "0.3",
                                           "--trials", "30000", "--range-size", "2048"};
    auto one = base, four = base;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    CHECK(run(one).out == run(four).out);
    auto other = base;
    other[1] = "10";
    CHECK(run(other).out != run(base).out);
}

TEST_CASE("constants print") {
    const auto r = run({"--constants", "print"});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["version"] == "CODATA-2018");
}

TEST_CASE("scan families") {
    const auto k = run({"scan", "--param", "k", "--from", "1", "--to", "4", "--delta", "0.01"});
    REQUIRE(k.code == kExitOk);
    CHECK(k.out.rfind("k,delta,eta,analytic_p,classical_p,mc_freq,mc_ci_low,mc_ci_high,failure_freq,trials,seed,ratio\n", 0) == 0);
    const auto phi = run({"scan", "--param", "phi", "--from", "0phi0", "--to", "2phi0", "--points", "3"});
    REQUIRE(phi.code == kExitOk);
    CHECK(phi.out.find("\n4.1356676969238") != std::string::npos);
    CHECK(run({"scan", "--param", "q", "--from", "0e", "--to", "60e", "--energy", "300keV"}).code == kExitOk);
    CHECK(run({"scan", "--param", "Z_r", "--from", "50ohm", "--to", "5kohm", "--log"}).code == kExitOk);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3, 6.62607015e-34, -2.5e300, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("atomic write replaces the target") {
    TempDir dir;
    const auto p = (dir.path / "x.txt").string();
    atomic_write(p, "first");
    atomic_write(p, "second");
    CHECK(slurp(p) == "second");
}

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("LC levels are uniformly spaced") {
    const auto rows = csv_rows(run({"spectrum", netlist("lc.net"), "--levels", "3"}).out);
    REQUIRE(rows.size() == 4);
    const double e0 = std::stod(rows[1][1]), e1 = std::stod(rows[2][1]), e2 = std::stod(rows[3][1]);
    CHECK((e2 - e1) == doctest::Approx(e1 - e0).epsilon(1e-8));
}

TEST_CASE("dispersive report") {
    const auto zero = nlohmann::json::parse(run({"dispersive", "--fr", "5GHz", "--fq", "6GHz", "--lambda", "0"}).out);
    CHECK(zero["qubit_shift_per_photon"]["J"] == 0.0);
    const auto r = nlohmann::json::parse(run({"dispersive", "--fr", "5GHz", "--fq", "6GHz", "--lambda", "0.01"}).out);
    CHECK(r["delta"]["GHz"].get<double>() == doctest::Approx(1).epsilon(1e-12));
    CHECK(r["qubit_shift_per_photon"]["GHz"].get<double>() * 1e9 == doctest::Approx(200e3).epsilon(1e-10));
    CHECK(r["qubit_shift_per_photon"].contains("ueV"));
    CHECK(r["blocks"].size() == 19);

    const auto sweep = csv_rows(run({"dispersive", "--fr", "5GHz", "--fq", "6GHz", "--sweep", "1e-3,1e-2,1e-1",
                                     "--nmax", "8"}).out);
    REQUIRE(sweep.size() == 4);
    CHECK(sweep[0][3] == "fitted_slope");
    CHECK(std::stod(sweep[1][4]) == doctest::Approx(3).epsilon(0.05));
}

TEST_CASE("analytic-only protocol row") {
    const auto rows = csv_rows(run({"protocol", "--k", "10", "--delta", "0.01", "--eta", "1", "--trials", "0"}).out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == rows[1].size());
    CHECK(std::stod(rows[1][3]) == doctest::Approx(std::pow(std::sin(0.05), 2)).epsilon(1e-14));
    CHECK(rows[1][5].empty());
    CHECK(rows[1][9] == "0");
}

TEST_CASE("k scan approaches the quantum advantage") {
    const auto rows = csv_rows(run({"scan", "--param", "k", "--from", "1", "--to", "64", "--delta", "0.01"}).out);
    REQUIRE(rows.size() == 65);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int k = std::stoi(rows[i][0]);
        CHECK(k == static_cast<int>(i));
        if (k <= 30) CHECK(std::stod(rows[i].back()) == doctest::Approx(k).epsilon(0.02));
    }
}

TEST_CASE("deflection example") {
    const auto j = nlohmann::json::parse(
        run({"deflect", "--energy", "100eV", "--d", "1um", "--flux", "1phi0", "--drift", "100mm"}).out);
    CHECK(j["deflection"]["theta_rad"].get<double>() == doctest::Approx(6.1e-5).epsilon(0.02));
    CHECK(j["deflection"]["beam_shift_um"].get<double>() == doctest::Approx(6.1).epsilon(0.02));
}

TEST_CASE("CSV headers do not depend on values") {
    const auto a = csv_rows(run({"protocol", "--k", "3", "--delta", "0.2"}).out)[0];
    const auto b = csv_rows(run({"protocol", "--k", "9", "--delta", "1.5", "--trials", "100"}).out)[0];
    CHECK(a == b);
}
