// rotlab: scenario-driven front end.
//
//   rotlab run <file.json> [--seed N] [--oracle-fd] [--out DIR]
//   rotlab batch <dir> [--jobs N] [--seed N] [--oracle-fd] [--out DIR]
//
// Exit codes: 0 ok, 2 bad scenario or arguments, 3 physics refusal,
// 4 internal failure (including failed report checks).

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "scenario.hpp"
#include "tasks.hpp"

namespace fs = std::filesystem;
using namespace rotlab::cli;

namespace {

struct Line {
    std::string name;
    int code;
    std::string text;
};

Line run_file(const fs::path& file, const Overrides& ov) {
    try {
        const Scenario sc = load_scenario(file, ov);
        const RunOutcome r = run_scenario(sc);
        std::string text = r.status + " -> " + r.report_path.string();
        if (!r.message.empty()) text += " (" + r.message + ")";
        return {file.stem().string(), r.exit_code, text};
    } catch (const rotlab::ScenarioError& e) {
        return {file.stem().string(), exit_user_error, std::string("invalid scenario: ") + e.what()};
    } catch (const std::exception& e) {
        return {file.stem().string(), exit_internal, std::string("internal error: ") + e.what()};
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotlab: relativistic rotator laboratory"};
    app.require_subcommand(1);

    Overrides ov;
    std::uint64_t seed = 0;
    std::string out;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_flag("--oracle-fd", ov.oracle_fd, "finite-difference derivative engine");
        sub->add_option("--out", out, "output directory");
    };

    std::string file;
    auto* run = app.add_subcommand("run", "run one scenario file");
    run->add_option("file", file, "scenario JSON")->required();
    common(run);

    std::string dir;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* batch = app.add_subcommand("batch", "run every *.json scenario in a directory");
    batch->add_option("dir", dir, "scenario directory")->required();
    batch->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
    common(batch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_user_error;
    }
    if (run->count("--seed") || batch->count("--seed")) ov.seed = seed;
    if (!out.empty()) ov.out = fs::path(out);

    if (*run) {
        const Line l = run_file(file, ov);
        (l.code == 0 ? std::cout : std::cerr) << l.name << ": " << l.text << '\n';
        return l.code;
    }

    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    if (ec) {
        std::cerr << dir << ": " << ec.message() << '\n';
        return exit_user_error;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << dir << ": no scenario files\n";
        return exit_user_error;
    }

    std::vector<Line> lines(files.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, files.size()); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < files.size();) lines[i] = run_file(files[i], ov);
        });
    for (auto& t : pool) t.join();

    int worst = 0;
    for (const auto& l : lines) {
        std::cout << "[" << l.code << "] " << l.name << ": " << l.text << '\n';
        worst = std::max(worst, l.code);
    }
    return worst;
}
