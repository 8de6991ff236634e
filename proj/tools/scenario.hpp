#pragma once

// Scenario documents for the rotlab command-line tool. Parsing validates the
// whole document and records every value it consumes (defaults included) into
// `resolved`, which reports embed verbatim.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotlab/chart.hpp"
#include "rotlab/dynamics.hpp"
#include "rotlab/field.hpp"
#include "rotlab/toy_rotator.hpp"

namespace rotlab::cli {

inline constexpr int kSchemaVersion = 1;

struct RandomStateSpec {
    double speed_max = 0.6;
    double rot_scale = 1.0;
};

struct StateSpec {
    std::optional<ChartState> explicit_state;
    std::optional<RandomStateSpec> random;  // drawn from the scenario seed
    int count = 1;                          // number of random states
};

struct FieldSpec {
    UniformField field;
    double e = 1.0;
};

struct GridSpec {
    double t0 = 0.0;
    double t1 = 10.0;
    std::size_t points = 101;
};

struct FreeSpec {
    std::array<double, 3> boost{};
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    std::array<double, 4> x0{};
    std::string profile = "linear:omega=0.5";
    GridSpec grid;
    struct Witness {
        double omega, amp, nu;
    };
    std::optional<Witness> witness;
};

struct MagneticSpec {
    double R = 1.0;
    int branch = -1;
    std::optional<int> epsilon;
    double e = 1.0;
    double H = 1.0;
    double periods = 1.0;
    std::size_t samples = 16;
    double phi0 = 0.0;
    struct Scan {
        std::vector<double> radii, fields;
    };
    std::optional<Scan> scan;
};

struct ToySpec {
    ToyParams params;
    ToyCase which = ToyCase::a;
    double R = 1.0;
    std::string nu = "linear:omega=1";
    GridSpec grid;
};

struct ScanSpec {
    std::vector<std::string> shapes;
    double q_min = 1e-3;
    double q_max = 10.0;
    std::size_t points = 25;
    bool log_spacing = true;
};

struct Scenario {
    int version = kSchemaVersion;
    std::string name;
    std::string task;
    std::uint64_t seed = 1;
    DerivativeEngine engine = DerivativeEngine::forward;

    // rotator model (ignored by toy and scan-f)
    std::string shape;
    double m = 1.0;
    double l = 1.0;

    StateSpec state;
    std::optional<FieldSpec> field;
    double t_end = 10.0;
    IntegratorOptions integrator;
    double rank_tol = 1e-8;

    std::optional<FreeSpec> free;
    std::optional<MagneticSpec> magnetic;
    std::optional<ToySpec> toy;
    std::optional<ScanSpec> scan;

    std::filesystem::path output_dir;  // resolved directory for report files
    std::filesystem::path base_dir;    // directory of the scenario file
    nlohmann::ordered_json resolved;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    bool oracle_fd = false;
    std::optional<std::filesystem::path> out;
};

const std::vector<std::string>& task_names();

/// Throws ScenarioError whose message starts with the JSON-pointer location.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& default_name,
                        const std::filesystem::path& base_dir, const Overrides& ov);
Scenario load_scenario(const std::filesystem::path& file, const Overrides& ov);

}  // namespace rotlab::cli
