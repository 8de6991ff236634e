#pragma once

// Task dispatch for the rotlab tool. Each run writes <name>.report.json and
// any data files into the scenario's output directory.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenario.hpp"

namespace rotlab::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_user_error = 2,
    exit_physics_refusal = 3,
    exit_internal = 4,
};

inline constexpr int kReportVersion = 1;

/// Collects claims for a report. Every entry names the library operation that
/// produced it.
class Report {
public:
    void result(const std::string& key, nlohmann::ordered_json value, const std::string& op);
    /// pass when value <= bound (NaN never passes)
    bool check_at_most(const std::string& key, double value, double bound, const std::string& op);
    /// pass when value >= bound
    bool check_at_least(const std::string& key, double value, double bound, const std::string& op);
    void file(const std::string& name) { files_.push_back(name); }

    bool all_passed() const { return failed_ == 0; }
    const nlohmann::ordered_json& results() const { return results_; }
    const nlohmann::ordered_json& checks() const { return checks_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    nlohmann::ordered_json results_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json checks_ = nlohmann::ordered_json::object();
    std::vector<std::string> files_;
    int failed_ = 0;
};

struct RunOutcome {
    int exit_code = exit_ok;
    std::string status;  // ok, refused, check_failed, error
    std::string message;
    std::filesystem::path report_path;
    nlohmann::ordered_json report;
};

/// Runs the task, writes the report (also on refusal) and returns the exit
/// code. Never throws for physics or internal errors.
RunOutcome run_scenario(const Scenario& sc);

}  // namespace rotlab::cli
