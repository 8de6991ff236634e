#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rotlab/analytic_solutions.hpp"
#include "rotlab/errors.hpp"
#include "rotlab/shape.hpp"

namespace rotlab::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ScenarioError((where.empty() ? "/" : where) + ": " + msg);
}

const json& empty_object() {
    static const json e = json::object();
    return e;
}

// Typed access to one JSON object. Every consumed value, including defaults,
// is mirrored into `out`; finish() rejects keys nobody asked for.
class Obj {
public:
    Obj(const json& j, std::string path, ordered_json& out) : j_(j), path_(std::move(path)), out_(out) {
        if (!j_.is_object()) fail(path_, "expected an object");
        if (!out_.is_object()) out_ = ordered_json::object();
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        seen_.insert(key);
        double v = 0.0;
        if (!j_.contains(key)) {
            if (!def) fail(at(key), "required number missing");
            v = *def;
        } else {
            const json& x = j_.at(key);
            if (!x.is_number()) fail(at(key), "expected a number");
            v = x.get<double>();
            if (!std::isfinite(v)) fail(at(key), "expected a finite number");
        }
        out_[key] = v;
        return v;
    }

    double positive(const std::string& key, std::optional<double> def = std::nullopt) {
        const double v = number(key, def);
        if (!(v > 0.0)) fail(at(key), "must be > 0");
        return v;
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt) {
        seen_.insert(key);
        std::int64_t v = 0;
        if (!j_.contains(key)) {
            if (!def) fail(at(key), "required integer missing");
            v = *def;
        } else {
            const json& x = j_.at(key);
            if (!x.is_number_integer()) fail(at(key), "expected an integer");
            v = x.get<std::int64_t>();
        }
        out_[key] = v;
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
        seen_.insert(key);
        std::uint64_t v = def;
        if (j_.contains(key)) {
            const json& x = j_.at(key);
            if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
                fail(at(key), "expected a non-negative integer");
            v = x.get<std::uint64_t>();
        }
        out_[key] = v;
        return v;
    }

    std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
        seen_.insert(key);
        std::string v;
        if (!j_.contains(key)) {
            if (!def) fail(at(key), "required string missing");
            v = *def;
        } else {
            const json& x = j_.at(key);
            if (!x.is_string()) fail(at(key), "expected a string");
            v = x.get<std::string>();
        }
        out_[key] = v;
        return v;
    }

    std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                       std::optional<std::string> def = std::nullopt) {
        const std::string v = string(key, std::move(def));
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(at(key), "'" + v + "' is not one of {" + list + "}");
        }
        return v;
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::size_t> size = std::nullopt,
                                std::optional<std::vector<double>> def = std::nullopt) {
        seen_.insert(key);
        std::vector<double> v;
        if (!j_.contains(key)) {
            if (!def) fail(at(key), "required array missing");
            v = *def;
        } else {
            const json& x = j_.at(key);
            if (!x.is_array()) fail(at(key), "expected an array of numbers");
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (!x[i].is_number()) fail(at(key) + "/" + std::to_string(i), "expected a number");
                v.push_back(x[i].get<double>());
                if (!std::isfinite(v.back())) fail(at(key) + "/" + std::to_string(i), "expected a finite number");
            }
        }
        if (size && v.size() != *size) fail(at(key), "expected " + std::to_string(*size) + " numbers");
        out_[key] = v;
        return v;
    }

    std::vector<std::string> strings(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail(at(key), "required array missing");
        const json& x = j_.at(key);
        if (!x.is_array() || x.empty()) fail(at(key), "expected a non-empty array of strings");
        std::vector<std::string> v;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!x[i].is_string()) fail(at(key) + "/" + std::to_string(i), "expected a string");
            v.push_back(x[i].get<std::string>());
        }
        out_[key] = v;
        return v;
    }

    template <std::size_t N>
    std::array<double, N> fixed(const std::string& key, std::array<double, N> def) {
        const auto v = numbers(key, N, std::vector<double>(def.begin(), def.end()));
        std::array<double, N> a{};
        std::copy(v.begin(), v.end(), a.begin());
        return a;
    }

    Obj child(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail(at(key), "required object missing");
        return Obj(j_.at(key), at(key), out_[key]);
    }

    // defaults of an absent sub-object still show up in the resolved echo
    Obj child_or_empty(const std::string& key) { return Obj(empty_object(), at(key), out_[key]); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown or unused key");
    }

private:
    const json& j_;
    std::string path_;
    ordered_json& out_;
    std::set<std::string> seen_;
};

Vec3 vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

GridSpec read_grid(Obj& run, GridSpec def) {
    GridSpec g = def;
    Obj o = run.has("grid") ? run.child("grid") : run.child_or_empty("grid");
    g.t0 = o.number("t0", def.t0);
    g.t1 = o.number("t1", def.t1);
    const auto pts = o.integer("points", static_cast<std::int64_t>(def.points));
    if (pts < 2) fail(o.at("points"), "need at least two points");
    g.points = static_cast<std::size_t>(pts);
    if (!(g.t1 > g.t0)) fail(o.at("t1"), "must exceed t0");
    o.finish();
    return g;
}

void read_state(Obj& root, Scenario& sc, bool allow_many) {
    if (!root.has("state")) fail("/state", "required object missing");
    Obj st = root.child("state");
    if (st.has("random")) {
        Obj r = st.child("random");
        RandomStateSpec rs;
        rs.speed_max = r.number("speed_max", rs.speed_max);
        if (!(rs.speed_max > 0.0 && rs.speed_max < 1.0)) fail(r.at("speed_max"), "must lie in (0, 1)");
        rs.rot_scale = r.positive("rot_scale", rs.rot_scale);
        const auto count = r.integer("count", 1);
        if (count < 1) fail(r.at("count"), "must be >= 1");
        if (count > 1 && !allow_many) fail(r.at("count"), "this task takes a single state");
        sc.state.count = static_cast<int>(count);
        sc.state.random = rs;
        r.finish();
    } else {
        ChartState s;
        s.x = vec3(st.fixed<3>("x", {0, 0, 0}));
        s.theta = st.number("theta");
        s.phi = st.number("phi");
        s.v = vec3(st.fixed<3>("v", {0, 0, 0}));
        s.dtheta = st.number("dtheta", 0.0);
        s.dphi = st.number("dphi", 0.0);
        s.t = st.number("t", 0.0);
        if (!(s.v.norm() < 1.0)) fail(st.at("v"), "|v| must be < 1");
        sc.state.explicit_state = s;
    }
    st.finish();
}

void read_field(Obj& root, Scenario& sc) {
    if (!root.has("field")) return;
    Obj f = root.child("field");
    FieldSpec fs;
    const auto E = f.fixed<3>("E", {0, 0, 0});
    const auto H = f.fixed<3>("H", {0, 0, 0});
    fs.field.E = vec3(E);
    fs.field.H = vec3(H);
    fs.e = f.number("e", 1.0);
    const std::string gauge = f.choice("gauge", {"symmetric", "shifted_xy"}, "symmetric");
    fs.field.gauge = gauge == "symmetric" ? Gauge::symmetric : Gauge::shifted_xy;
    f.finish();
    sc.field = fs;
}

void read_run(Obj& root, Scenario& sc, bool integration, bool grid, GridSpec grid_default, GridSpec* grid_out) {
    if (!root.has("run") && integration) fail("/run", "required object missing");
    Obj r = root.has("run") ? root.child("run") : root.child_or_empty("run");
    if (integration) {
        sc.t_end = r.number("t_end");
        IntegratorOptions& o = sc.integrator;
        o.rel_tol = r.positive("rel_tol", o.rel_tol);
        o.abs_tol = r.number("abs_tol", o.abs_tol);
        if (o.abs_tol < 0.0) fail(r.at("abs_tol"), "must be >= 0");
        o.sample_dt = r.number("sample_dt", 0.0);
        if (o.sample_dt < 0.0) fail(r.at("sample_dt"), "must be >= 0");
        o.initial_step = r.number("initial_step", 0.0);
        if (r.has("max_step")) o.max_step = r.positive("max_step");
        const auto ms = r.integer("max_steps", 5'000'000);
        if (ms < 1) fail(r.at("max_steps"), "must be >= 1");
        o.max_steps = static_cast<std::size_t>(ms);
    }
    if (integration || !grid) {
        sc.rank_tol = r.positive("rank_tol", sc.rank_tol);
        sc.integrator.rank_tol = sc.rank_tol;
    }
    if (grid && grid_out) *grid_out = read_grid(r, grid_default);
    r.finish();
}

void forbid(const json& doc, const std::string& task, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (doc.contains(k)) fail(std::string("/") + k, "not used by task '" + task + "'");
}

}  // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"simulate",        "hessian", "kernel", "verify-free",
                                                "verify-magnetic", "toy",     "scan-f"};
    return names;
}

Scenario parse_scenario(const json& doc, const std::string& default_name, const std::filesystem::path& base_dir,
                        const Overrides& ov) {
    Scenario sc;
    sc.base_dir = base_dir;
    ordered_json& out = sc.resolved;
    out = ordered_json::object();
    Obj root(doc, "", out);

    sc.version = static_cast<int>(root.integer("version"));
    if (sc.version != kSchemaVersion)
        fail("/version", "unsupported schema version " + std::to_string(sc.version) + " (expected " +
                             std::to_string(kSchemaVersion) + ")");
    sc.name = root.string("name", default_name);
    if (sc.name.empty() || sc.name.find('/') != std::string::npos) fail("/name", "must be a plain file stem");
    sc.task = root.choice("task", task_names());
    sc.seed = root.unsigned_integer("seed", 1);
    if (ov.seed) {
        sc.seed = *ov.seed;
        out["seed"] = sc.seed;
    }
    sc.engine = ov.oracle_fd ? DerivativeEngine::finite_difference : DerivativeEngine::forward;
    out["engine"] = ov.oracle_fd ? "finite_difference" : "forward";

    const std::string& task = sc.task;

    // model
    const bool toy = task == "toy";
    if (!doc.contains("model") && task != "scan-f" && task != "verify-magnetic") fail("/model", "required object missing");
    {
        Obj m = doc.contains("model") ? root.child("model") : root.child_or_empty("model");
        const std::string kind = m.choice("kind", {"rotator", "toy"}, toy ? "toy" : "rotator");
        if (toy != (kind == "toy")) fail(m.at("kind"), "task '" + task + "' needs model kind '" + (toy ? "toy" : "rotator") + "'");
        if (toy) {
            ToySpec ts;
            ts.params.variant = parse_toy_variant(m.choice("variant", {"free", "electric", "magnetic"}));
            ts.params.m = m.positive("m", 1.0);
            ts.params.l = m.positive("l", 2.0);
            ts.params.K = m.number("K", 0.0);
            ts.params.Kt = m.number("Kt", 0.0);
            ts.params.coef = m.positive("coef", 0.125);
            ts.which = parse_toy_case(m.choice("case", {"indeterminate", "a", "b", "c"}));
            if (ts.which == ToyCase::indeterminate) {
                ts.nu = m.string("nu", ts.nu);
                try {
                    (void)PhaseProfile::parse(ts.nu, base_dir);
                } catch (const std::runtime_error& e) {
                    fail(m.at("nu"), e.what());
                }
            } else {
                ts.R = m.positive("R");
            }
            sc.toy = ts;
        } else {
            const bool shape_needed = task != "scan-f" && task != "verify-magnetic";
            sc.shape = m.string("shape", shape_needed ? std::nullopt : std::optional<std::string>("fundamental+"));
            try {
                (void)ShapeFunction::parse(sc.shape);
            } catch (const std::runtime_error& e) {
                fail(m.at("shape"), e.what());
            }
            sc.m = m.positive("m", 1.0);
            sc.l = m.positive("l", 1.0);
            if (task == "verify-free" && sc.shape != "fundamental+" && sc.shape != "fundamental-")
                fail(m.at("shape"), "verify-free needs fundamental+ or fundamental-");
            if (task == "verify-magnetic" && sc.shape != "fundamental+")
                fail(m.at("shape"), "the co-rotating circles belong to fundamental+");
        }
        m.finish();
    }

    if (task == "simulate") {
        forbid(doc, task, {"free", "magnetic", "scan"});
        read_state(root, sc, false);
        read_field(root, sc);
        read_run(root, sc, true, false, {}, nullptr);
    } else if (task == "hessian" || task == "kernel") {
        forbid(doc, task, {"free", "magnetic", "scan"});
        read_state(root, sc, true);
        read_field(root, sc);
        read_run(root, sc, false, false, {}, nullptr);
    } else if (task == "verify-free") {
        forbid(doc, task, {"state", "field", "magnetic", "scan"});
        FreeSpec fs;
        if (doc.contains("free")) {
            Obj f = root.child("free");
            fs.boost = f.fixed<3>("boost", fs.boost);
            if (!(vec3(fs.boost).norm() < 1.0)) fail(f.at("boost"), "|boost| must be < 1");
            fs.axis = f.fixed<3>("axis", fs.axis);
            fs.x0 = f.fixed<4>("x0", fs.x0);
            fs.profile = f.string("profile", fs.profile);
            try {
                (void)PhaseProfile::parse(fs.profile, base_dir);
            } catch (const std::runtime_error& e) {
                fail(f.at("profile"), e.what());
            }
            if (f.has("witness")) {
                Obj w = f.child("witness");
                fs.witness = FreeSpec::Witness{w.number("omega"), w.number("amp"), w.number("nu")};
                w.finish();
            }
            f.finish();
        }
        sc.free = fs;
        read_run(root, sc, false, true, GridSpec{0.0, 20.0, 201}, &sc.free->grid);
    } else if (task == "verify-magnetic") {
        forbid(doc, task, {"state", "field", "free", "scan", "run"});
        Obj g = root.child("magnetic");
        MagneticSpec ms;
        ms.R = g.positive("R");
        ms.branch = g.choice("branch", {"plus", "minus"}) == "plus" ? 1 : -1;
        if (g.has("epsilon")) {
            const auto e = g.integer("epsilon");
            if (e != 1 && e != -1) fail(g.at("epsilon"), "must be +1 or -1");
            ms.epsilon = static_cast<int>(e);
        }
        ms.e = g.number("e", ms.e);
        ms.H = g.number("H", ms.H);
        ms.periods = g.positive("periods", ms.periods);
        const auto n = g.integer("samples", 16);
        if (n < 1) fail(g.at("samples"), "must be >= 1");
        ms.samples = static_cast<std::size_t>(n);
        ms.phi0 = g.number("phi0", 0.0);
        if (g.has("scan")) {
            Obj s = g.child("scan");
            MagneticSpec::Scan scan{s.numbers("radii"), s.numbers("fields")};
            if (scan.radii.empty()) fail(s.at("radii"), "must not be empty");
            if (scan.fields.empty()) fail(s.at("fields"), "must not be empty");
            ms.scan = scan;
            s.finish();
        }
        g.finish();
        sc.magnetic = ms;
    } else if (task == "toy") {
        forbid(doc, task, {"state", "field", "free", "magnetic", "scan"});
        read_run(root, sc, false, true, GridSpec{0.0, 10.0, 41}, &sc.toy->grid);
    } else if (task == "scan-f") {
        forbid(doc, task, {"state", "field", "free", "magnetic", "run"});
        Obj s = root.child("scan");
        ScanSpec ss;
        ss.shapes = s.strings("shapes");
        for (std::size_t i = 0; i < ss.shapes.size(); ++i) {
            try {
                (void)ShapeFunction::parse(ss.shapes[i]);
            } catch (const std::runtime_error& e) {
                fail(s.at("shapes") + "/" + std::to_string(i), e.what());
            }
        }
        ss.q_min = s.number("q_min", ss.q_min);
        ss.q_max = s.number("q_max", ss.q_max);
        const auto pts = s.integer("points", 25);
        if (pts < 1) fail(s.at("points"), "must be >= 1");
        ss.points = static_cast<std::size_t>(pts);
        ss.log_spacing = s.choice("spacing", {"log", "linear"}, "log") == "log";
        if (ss.q_min < 0.0) fail(s.at("q_min"), "must be >= 0");
        if (ss.q_max < ss.q_min) fail(s.at("q_max"), "must be >= q_min");
        if (ss.log_spacing && !(ss.q_min > 0.0)) fail(s.at("q_min"), "log spacing needs q_min > 0");
        s.finish();
        sc.scan = ss;
    }

    // output block: only the directory, which is not part of the resolved
    // scenario (reports must not depend on where they are written)
    sc.output_dir = ".";
    if (doc.contains("output")) {
        ordered_json sink;
        Obj o(doc.at("output"), "/output", sink);
        const std::string dir = o.string("dir", ".");
        o.finish();
        std::filesystem::path p(dir);
        sc.output_dir = p.is_relative() ? base_dir / p : p;
        out.erase("output");
    }
    if (ov.out) sc.output_dir = *ov.out;
    {
        std::set<std::string> known{"version", "name", "task",  "seed",     "model",  "state", "field",
                                    "run",     "free", "magnetic", "scan", "output"};
        for (auto it = doc.begin(); it != doc.end(); ++it)
            if (!known.count(it.key())) fail("/" + it.key(), "unknown key");
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file, const Overrides& ov) {
    std::ifstream in(file);
    if (!in) throw ScenarioError(file.string() + ": cannot open");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ScenarioError(file.string() + ": not valid JSON: " + e.what());
    }
    try {
        return parse_scenario(doc, file.stem().string(), file.parent_path().empty() ? "." : file.parent_path(), ov);
    } catch (const ScenarioError& e) {
        throw ScenarioError(file.string() + ": " + e.what());
    }
}

}  // namespace rotlab::cli
