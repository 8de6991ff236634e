#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rotlab/errors.hpp"
#include "scenario.hpp"
#include "tasks.hpp"

using namespace rotlab;
using namespace rotlab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rotlab_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_of(const json& doc) {
    try {
        parse_scenario(doc, "t", ".", {});
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return "";
}

RunOutcome run_doc(const json& doc, const fs::path& out, const Overrides& base = {}) {
    Overrides ov = base;
    ov.out = out;
    return run_scenario(parse_scenario(doc, "case", SCENARIO_DIR, ov));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

int run_exe(const std::string& args) {
    const std::string cmd = std::string(ROTLAB_EXE) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const json hessian_doc = json::parse(R"({
  "version": 1, "task": "hessian", "seed": 5,
  "model": {"shape": "fundamental+"},
  "state": {"random": {"count": 3}}
})");

}  // namespace

TEST_CASE("schema: locations of violations") {
    CHECK(error_of(json::parse(R"({"task": "hessian"})")).starts_with("/version"));
    CHECK(error_of(json::parse(R"({"version": 2, "task": "hessian"})")).starts_with("/version"));
    CHECK(error_of(json::parse(R"({"version": 1, "task": "fly"})")).starts_with("/task"));
    json d = hessian_doc;
    d["model"]["m"] = "heavy";
    CHECK(error_of(d).starts_with("/model/m: expected a number"));
    d = hessian_doc;
    d["model"]["shape"] = "cubic";
    CHECK(error_of(d).starts_with("/model/shape"));
    d = hessian_doc;
    d["state"]["random"]["colour"] = 1;
    CHECK(error_of(d).starts_with("/state/random/colour"));
    d = hessian_doc;
    d["magnetic"] = json::object();
    CHECK(error_of(d).starts_with("/magnetic: not used"));
    d = hessian_doc;
    d["extra"] = 1;
    CHECK(error_of(d).starts_with("/extra"));
    d = hessian_doc;
    d["model"]["l"] = -1.0;
    CHECK(error_of(d).starts_with("/model/l: must be > 0"));
    d = hessian_doc;
    d["state"] = json::parse(R"({"theta": 1.0, "phi": 0.0, "v": [0.8, 0.8, 0]})");
    CHECK(error_of(d).starts_with("/state/v"));
    const json free = json::parse(R"({"version": 1, "task": "verify-free", "model": {"shape": "smooth"}})");
    CHECK(error_of(free).starts_with("/model/shape"));
    const json toy = json::parse(R"({"version": 1, "task": "toy", "model": {"variant": "free", "case": "a"}})");
    CHECK(error_of(toy).starts_with("/model/R"));
}

TEST_CASE("schema: resolved document echoes defaults and overrides") {
    Overrides ov;
    ov.seed = 99;
    ov.oracle_fd = true;
    const Scenario sc = parse_scenario(hessian_doc, "h", ".", ov);
    CHECK(sc.seed == 99);
    CHECK(sc.engine == DerivativeEngine::finite_difference);
    const auto& r = sc.resolved;
    CHECK(r["seed"] == 99);
    CHECK(r["engine"] == "finite_difference");
    CHECK(r["name"] == "h");
    CHECK(r["model"]["m"] == 1.0);
    CHECK(r["model"]["kind"] == "rotator");
    CHECK(r["state"]["random"]["speed_max"] == 0.6);
    CHECK(r["run"]["rank_tol"] == 1e-8);
}

TEST_CASE("hessian task on the fundamental shape: rank 4 with kernel") {
    const auto out = scratch("hessian");
    const RunOutcome r = run_doc(hessian_doc, out);
    CHECK(r.exit_code == exit_ok);
    const auto& states = r.report["results"]["states"]["value"];
    REQUIRE(states.size() == 3);
    for (const auto& s : states) {
        CHECK(s["rank"] == 4);
        CHECK(s["kernel"].size() == 1);
        CHECK(s["sigma_ratio"].get<double>() <= 1e-10);
    }
    CHECK(r.report["results"]["states"]["op"] == "hessian_lab.hessian_report");
}

TEST_CASE("simulate: smooth shape integrates, fundamental shape is refused") {
    const auto out = scratch("simulate");
    json doc = json::parse(R"({
      "version": 1, "task": "simulate", "model": {"shape": "smooth"},
      "state": {"theta": 1.2, "phi": 0.3, "v": [0.1, -0.05, 0.2], "dtheta": 0.4, "dphi": 0.7},
      "run": {"t_end": 5.0, "sample_dt": 0.5}
    })");
    RunOutcome r = run_doc(doc, out);
    CHECK(r.exit_code == exit_ok);
    CHECK(r.report["files"] == json::array({"case.trajectory.csv"}));
    const auto rows = read_csv(out / "case.trajectory.csv");
    CHECK(rows.size() == 12);
    CHECK(rows.front().size() == 20);
    CHECK(r.report["results"]["drift"]["value"]["P"].get<double>() <= 1e-7);

    doc["model"]["shape"] = "fundamental-";
    r = run_doc(doc, out);
    CHECK(r.exit_code == exit_physics_refusal);
    CHECK(r.status == "refused");
    const auto& d = r.report["diagnostic"];
    CHECK(d["kind"] == "DegenerateHessian");
    CHECK(d["rank"] == 4);
    CHECK(d["kernel"].size() == 1);
    CHECK(std::abs(d["constraint_value"].get<double>()) <= 1e-12);
    // the refusal still carries the resolved scenario
    CHECK(r.report["scenario"]["model"]["shape"] == "fundamental-");
    CHECK(fs::exists(out / "case.report.json"));
}

TEST_CASE("verify-magnetic: minus-branch worked numbers") {
    const auto out = scratch("magnetic");
    json doc = json::parse(R"({
      "version": 1, "task": "verify-magnetic", "model": {"m": 1.0, "l": 2.0},
      "magnetic": {"R": 1.0, "branch": "minus", "e": 1.0, "H": 1.0,
                   "scan": {"radii": [0.5, 1.0], "fields": [1.0]}}
    })");
    RunOutcome r = run_doc(doc, out);
    CHECK(r.exit_code == exit_ok);
    const auto& res = r.report["results"];
    // mu = 2 sqrt 2 - 1, phidot = -(2/l)/mu
    CHECK(res["mu"]["value"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(res["phidot"]["value"].get<double>() == doctest::Approx(-1.0 / (2.0 * std::sqrt(2.0) - 1.0)).epsilon(1e-14));
    CHECK(r.report["checks"]["max_residual"]["value"].get<double>() <= 1e-8);
    CHECK(r.report["checks"]["max_residual"]["op"] == "dynamics.residual");
    const auto scan = read_csv(out / "case.branch_scan.csv");
    CHECK(scan.size() == 5);
    CHECK(scan.front().size() == 8);

    doc["magnetic"].erase("scan");
    doc["magnetic"]["branch"] = "plus";
    r = run_doc(doc, out);
    CHECK(r.exit_code == exit_physics_refusal);
    CHECK(r.report["diagnostic"]["kind"] == "InadmissibleError");
}

TEST_CASE("scan-f: rows, closed forms and per-point statuses") {
    const auto out = scratch("scan");
    const json doc = json::parse(R"({
      "version": 1, "task": "scan-f",
      "scan": {"shapes": ["fundamental+", "fundamental-", "rational_sqrt", "smooth"],
               "q_min": 0.0, "q_max": 3.0, "points": 13, "spacing": "linear"}
    })");
    const RunOutcome r = run_doc(doc, out);
    CHECK(r.exit_code == exit_ok);
    const auto rows = read_csv(out / "case.scan_f.csv");
    REQUIRE(rows.size() == 1 + 4 * 13);
    CHECK(rows[0] == std::vector<std::string>{"shape", "Q", "factor", "det", "sigma_ratio", "status"});
    int statuses = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double Q = std::stod(row[1]);
        if (row[5] != "ok") {
            ++statuses;
            // Q = 0 (rotationless) and sqrt Q >= 1 for the minus branch
            CHECK((Q == 0.0 || (row[0] == "fundamental-" && Q >= 1.0)));
            continue;
        }
        const double factor = std::stod(row[2]);
        if (row[0].starts_with("fundamental")) {
            CHECK(std::abs(factor) <= 1e-12);
            CHECK(std::stod(row[4]) <= 1e-10);
        } else if (row[0] == "rational_sqrt") {
            CHECK(factor == doctest::Approx(std::sqrt(Q) / (1.0 + std::sqrt(Q))).epsilon(1e-12));
            CHECK(std::stod(row[4]) >= 1e-6);
        } else {
            // f = sqrt(1 + Q): f'/f = 1/(2(1+Q)) and f''/f' = -1/(2(1+Q)) cancel
            CHECK(factor == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(statuses == 3 + 9);
    CHECK(r.report["results"]["points_with_status"]["value"] == statuses);
}

TEST_CASE("verify-free and toy tasks") {
    const auto out = scratch("free");
    json doc = json::parse(R"({
      "version": 1, "task": "verify-free", "model": {"shape": "fundamental-", "l": 2.0},
      "free": {"boost": [0.2, 0.1, -0.3], "profile": "spline:phase_profile.dat",
               "witness": {"omega": 0.5, "amp": 0.3, "nu": 0.2}},
      "run": {"grid": {"t0": 0, "t1": 10, "points": 41}}
    })");
    RunOutcome r = run_doc(doc, out);
    CHECK(r.exit_code == exit_ok);
    for (const auto& [k, c] : r.report["checks"].items()) CHECK_MESSAGE(c["pass"] == true, k);
    CHECK(r.report["results"]["witness"]["value"]["final_gap"].get<double>() > 0.1);

    doc["free"]["profile"] = "linear:omega=1.5";  // l phidot / 2 = 1.5
    r = run_doc(doc, out);
    CHECK(r.exit_code == exit_physics_refusal);

    const json toy = json::parse(R"({
      "version": 1, "task": "toy",
      "model": {"variant": "magnetic", "case": "b", "Kt": 1.0, "R": 0.5}
    })");
    r = run_doc(toy, out);
    CHECK(r.exit_code == exit_ok);
    CHECK(r.report["results"]["omega"]["value"].get<double>() == doctest::Approx(1.0));
    CHECK(r.report["checks"]["max_residual"]["pass"] == true);
}

TEST_CASE("determinism: identical scenario and seed give identical bytes") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    json doc = json::parse(R"({
      "version": 1, "task": "kernel", "seed": 21, "model": {"shape": "fundamental+"},
      "state": {"random": {"count": 5}},
      "field": {"E": [0.1, 0.2, 0.3], "H": [0.0, 0.5, -0.2], "e": 1.0}
    })");
    run_doc(doc, a);
    run_doc(doc, b);
    CHECK(slurp(a / "case.report.json") == slurp(b / "case.report.json"));

    Overrides other;
    other.seed = 22;
    run_doc(doc, b, other);
    CHECK(slurp(a / "case.report.json") != slurp(b / "case.report.json"));

    // the finite-difference engine reaches the same verdicts
    Overrides fd;
    fd.oracle_fd = true;
    const RunOutcome r = run_doc(doc, b, fd);
    CHECK(r.report["scenario"]["engine"] == "finite_difference");
    CHECK(r.report["results"]["states"]["value"].size() == 5);
}

TEST_CASE("executable: exit codes") {
    const auto dir = scratch("exe");
    const auto out = dir / "out";
    {
        std::ofstream(dir / "broken.json") << "{ not json";
        std::ofstream(dir / "wrong.json") << R"({"version": 1, "task": "hessian", "model": {"shape": 3}})";
    }
    CHECK(run_exe("run " + (dir / "broken.json").string()) == 2);
    CHECK(run_exe("run " + (dir / "wrong.json").string()) == 2);
    CHECK(run_exe("run " + (dir / "missing.json").string()) == 2);
    CHECK(run_exe("frobnicate") == 2);
    const std::string scen = SCENARIO_DIR;
    CHECK(run_exe("run " + scen + "/hessian_fundamental.json --out " + out.string()) == 0);
    CHECK(run_exe("run " + scen + "/simulate_fundamental.json --out " + out.string()) == 3);
    CHECK(run_exe("run " + scen + "/verify_magnetic_minus.json --seed 4 --oracle-fd --out " + out.string()) == 0);
    const json rep = json::parse(slurp(out / "verify_magnetic_minus.report.json"));
    CHECK(rep["scenario"]["seed"] == 4);
    CHECK(rep["scenario"]["engine"] == "finite_difference");
    // the batch exit status is the worst of its members
    CHECK(run_exe("batch " + scen + " --jobs 3 --out " + out.string()) == 3);
    CHECK(fs::exists(out / "scan_f.scan_f.csv"));
}
