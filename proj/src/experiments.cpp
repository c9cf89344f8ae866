#include "qprobe/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qprobe/entanglement.hpp"
#include "qprobe/metrology.hpp"
#include "qprobe/util.hpp"

namespace qprobe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kVersion = "0.1.0";

std::string g17(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_tags(const std::string& csv)
{
    std::vector<std::string> out;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<ParamTag> parse_tag_list(const std::string& csv)
{
    std::vector<ParamTag> tags;
    for (const auto& name : split_tags(csv)) {
        try {
            tags.push_back(param_tag_from_string(name));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (tags.empty()) throw ConfigError("tags: empty tag list");
    return tags;
}

// Appends the exact sub-/super-radiant cells to a regular (s, phi) grid.
struct CellList {
    std::vector<double> s, phi;
    std::vector<CellKind> kind;
    int subradiant = -1, superradiant = -1;
};

CellList build_cells(const ModelParams& m, const std::vector<double>& s_values,
                     const std::vector<double>& phi_values)
{
    CellList cells;
    for (double s : s_values)
        for (double phi : phi_values) {
            cells.s.push_back(s);
            cells.phi.push_back(phi);
            cells.kind.push_back(CellKind::grid);
        }
    const InitialStateParam sub = subradiant_param(m);
    const InitialStateParam super = superradiant_param(m);
    cells.subradiant = static_cast<int>(cells.s.size());
    cells.s.push_back(sub.s);
    cells.phi.push_back(sub.phi);
    cells.kind.push_back(CellKind::subradiant);
    cells.superradiant = static_cast<int>(cells.s.size());
    cells.s.push_back(super.s);
    cells.phi.push_back(super.phi);
    cells.kind.push_back(CellKind::superradiant);
    return cells;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

nlohmann::json config_to_json(const ExperimentConfig& cfg)
{
    return nlohmann::json{{"kind", cfg.kind},
                          {"a1", cfg.a1},
                          {"a2", cfg.a2},
                          {"rabi", cfg.rabi},
                          {"lambda", cfg.lambda},
                          {"horizon", cfg.horizon},
                          {"grid_points", cfg.grid_points},
                          {"s_grid", cfg.s_grid},
                          {"phi_grid", cfg.phi_grid},
                          {"target_angle", cfg.target_angle},
                          {"segments", cfg.segments},
                          {"eps_max", cfg.eps_max},
                          {"restarts", cfg.restarts},
                          {"seed", cfg.seed},
                          {"objective", cfg.objective},
                          {"output_dir", cfg.output_dir},
                          {"s", cfg.s},
                          {"phi", cfg.phi},
                          {"tags", cfg.tags},
                          {"panels", cfg.panels},
                          {"pair_grid", cfg.pair_grid}};
}

} // namespace

ModelParams ExperimentConfig::model() const
{
    ModelParams m;
    m.a1 = a1;
    m.a2 = a2;
    m.rabi = rabi;
    m.lambda = lambda;
    m.horizon = horizon;
    return m;
}

ExperimentConfig parse_config(const std::string& json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");

    ExperimentConfig cfg;
    const std::set<std::string> known = {
        "kind",     "a1",      "a2",        "rabi",    "lambda",  "horizon", "grid_points",
        "s_grid",   "phi_grid", "target_angle", "segments", "eps_max", "restarts", "seed",
        "objective", "output_dir", "s",     "phi",     "tags",    "panels",  "pair_grid"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);
        try {
            if (key == "kind") cfg.kind = value.get<std::string>();
            else if (key == "a1") cfg.a1 = value.get<double>();
            else if (key == "a2") cfg.a2 = value.get<double>();
            else if (key == "rabi") cfg.rabi = value.get<double>();
            else if (key == "lambda") cfg.lambda = value.get<double>();
            else if (key == "horizon") cfg.horizon = value.get<double>();
            else if (key == "grid_points") cfg.grid_points = value.get<int>();
            else if (key == "s_grid") cfg.s_grid = value.get<int>();
            else if (key == "phi_grid") cfg.phi_grid = value.get<int>();
            else if (key == "target_angle") cfg.target_angle = value.get<double>();
            else if (key == "segments") cfg.segments = value.get<int>();
            else if (key == "eps_max") cfg.eps_max = value.get<double>();
            else if (key == "restarts") cfg.restarts = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "objective") cfg.objective = value.get<std::string>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else if (key == "s") cfg.s = value.get<double>();
            else if (key == "phi") cfg.phi = value.get<double>();
            else if (key == "tags") cfg.tags = value.get<std::string>();
            else if (key == "panels") cfg.panels = value.get<std::string>();
            else if (key == "pair_grid") cfg.pair_grid = value.get<int>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("config key has the wrong type: " + key);
        }
    }

    static const std::set<std::string> kinds = {"fisher-sweep", "qsl-sweep", "qsl-map",
                                                "optimize-sweep", "flows"};
    if (!kinds.count(cfg.kind))
        throw ConfigError("unknown experiment kind: '" + cfg.kind + "'");
    if (cfg.kind == "optimize-sweep" || cfg.kind == "flows") {
        try {
            control_objective_from_string(cfg.objective);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (cfg.kind == "flows") {
        parse_tag_list(cfg.tags);
        if (cfg.panels != "uncontrolled" && cfg.panels != "triptych")
            throw ConfigError("panels must be 'uncontrolled' or 'triptych'");
        if (cfg.pair_grid < 2) throw ConfigError("pair_grid must be >= 2");
        if (!(cfg.s >= -1.0 && cfg.s <= 1.0 && cfg.phi >= 0.0 && cfg.phi <= kPi))
            throw ConfigError("initial state (s, phi) outside its domain");
    }
    if (cfg.grid_points < 1) throw ConfigError("grid_points must be >= 1");
    if (cfg.s_grid < 2 || cfg.phi_grid < 1) throw ConfigError("sweep grid too small");
    if (cfg.segments < 1 || cfg.restarts < 1) throw ConfigError("segments/restarts must be >= 1");
    if (!(cfg.eps_max > 0.0)) throw ConfigError("eps_max must be positive");
    if (!(cfg.target_angle > 0.0 && cfg.target_angle <= kPi / 2.0 + 1e-12))
        throw ConfigError("target_angle must lie in (0, pi/2]");
    try {
        cfg.model().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

FisherSweepResult fisher_sweep(const ModelParams& m, const std::vector<double>& s_values,
                               const std::vector<double>& phi_values, int grid_points,
                               int threads)
{
    const CellList cells = build_cells(m, s_values, phi_values);
    const std::vector<ParamTag> all_tags = {ParamTag::time, ParamTag::rabi, ParamTag::width,
                                            ParamTag::phase};

    FisherSweepResult result;
    result.s = cells.s;
    result.phi = cells.phi;
    result.cell_kind = cells.kind;
    result.subradiant_cell = cells.subradiant;
    result.superradiant_cell = cells.superradiant;
    for (ParamTag tag : all_tags) result.f_tot[tag].resize(cells.s.size());

    const ControlPulse pulse = ControlPulse::zero(m.horizon);
    parallel_for(cells.s.size(), threads, [&](std::size_t i) {
        const Trajectory traj = simulate(m, {cells.s[i], cells.phi[i]}, pulse, grid_points,
                                         {ParamTag::rabi, ParamTag::width, ParamTag::phase});
        for (ParamTag tag : all_tags)
            result.f_tot[tag][i] = total_qfi(qfi_curve(traj, tag));
    });
    return result;
}

QslSweepResult qsl_sweep(const ModelParams& m, const std::vector<double>& s_values,
                         const std::vector<double>& phi_values, double target_angle,
                         int grid_points, double horizon_factor, int threads)
{
    const CellList cells = build_cells(m, s_values, phi_values);

    QslSweepResult result;
    result.s = cells.s;
    result.phi = cells.phi;
    result.cell_kind = cells.kind;
    result.subradiant_cell = cells.subradiant;
    result.superradiant_cell = cells.superradiant;
    result.tau_fisher.resize(cells.s.size());
    result.tau_opnorm.resize(cells.s.size());

    ModelParams extended = m;
    extended.horizon = m.horizon * horizon_factor;
    const int long_grid = static_cast<int>(grid_points * horizon_factor);
    const ControlPulse pulse = ControlPulse::zero(extended.horizon);

    parallel_for(cells.s.size(), threads, [&](std::size_t i) {
        const ProbeAmplitudes x0 = amplitudes_from_param({cells.s[i], cells.phi[i]});
        const Trajectory traj = propagate(extended, x0, pulse, long_grid);
        result.tau_fisher[i] = qsl_fisher(traj, target_angle, m.horizon);
        result.tau_opnorm[i] = qsl_opnorm(traj, target_angle, m.horizon);
    });
    return result;
}

std::vector<OptimizeSweepRow> optimize_sweep(const ModelParams& m, ControlObjective objective,
                                             const std::vector<double>& s_values,
                                             const std::vector<double>& phi_values, int segments,
                                             double eps_max, int restarts, std::uint64_t seed,
                                             int grid_points, int threads)
{
    if (objective == ControlObjective::concurrence)
        throw std::invalid_argument("optimize_sweep: needs a Fisher-information objective");
    const ParamTag tag =
        objective == ControlObjective::qfi_rabi ? ParamTag::rabi : ParamTag::width;

    std::vector<OptimizeSweepRow> rows;
    for (double phi : phi_values)
        for (double s : s_values) rows.push_back({s, phi, 0.0, 0.0, 0.0, 0.0});

    const ControlPulse zero = ControlPulse::zero(m.horizon);
    // Parallelism lives inside optimize(); sweep points run serially so the
    // restart pool stays saturated.
    for (auto& row : rows) {
        const Trajectory traj = simulate(m, {row.s, row.phi}, zero, grid_points, {tag});
        const FisherCurve curve = qfi_curve(traj, tag);
        row.f_horizon_uncontrolled = curve.values.back();
        row.f_max_uncontrolled = *std::max_element(curve.values.begin(), curve.values.end());
        row.f_tot_uncontrolled = total_qfi(curve);

        ControlProblem problem;
        problem.model = m;
        problem.x0 = {row.s, row.phi};
        problem.objective = objective;
        problem.segments = segments;
        problem.eps_max = eps_max;
        problem.restarts = restarts;
        problem.seed = seed;
        row.f_horizon_optimized = optimize(problem, threads).objective_value;
    }
    return rows;
}

FlowsReport flows_report(const ExperimentConfig& cfg, int threads)
{
    const ModelParams m = cfg.model();
    const std::vector<ParamTag> tags = parse_tag_list(cfg.tags);
    const InitialStateParam x0{cfg.s, cfg.phi};
    const Povm povm = single_excitation_povm();

    std::vector<std::pair<std::string, ControlPulse>> panels;
    panels.emplace_back("uncontrolled", ControlPulse::zero(m.horizon));
    if (cfg.panels == "triptych") {
        ControlProblem problem;
        problem.model = m;
        problem.x0 = x0;
        problem.segments = cfg.segments;
        problem.eps_max = cfg.eps_max;
        problem.restarts = cfg.restarts;
        problem.seed = cfg.seed;
        problem.objective = control_objective_from_string(cfg.objective);
        panels.emplace_back("qfi_control", optimize(problem, threads).pulse);
        problem.objective = ControlObjective::concurrence;
        panels.emplace_back("concurrence_control", optimize(problem, threads).pulse);
    }

    FlowsReport report;
    for (const auto& [name, pulse] : panels) {
        FlowsPanel panel;
        panel.name = name;
        panel.pulse = pulse;

        std::vector<ParamTag> sim_tags = tags;
        const Trajectory traj = simulate(m, x0, pulse, cfg.grid_points, sim_tags);
        panel.times = traj.times;

        for (ParamTag tag : tags) {
            const FisherCurve fc = qfi_curve(traj, tag);
            panel.curves["qfi_" + std::string(to_string(tag))] = fc.values;
            panel.curves["cfi_" + std::string(to_string(tag))] =
                classical_fisher_curve(traj, tag, povm).values;
        }
        panel.curves["concurrence"] = concurrence_curve(traj);

        BlpOptions blp_opts;
        blp_opts.threads = threads;
        const BlpResult blp = blp_measure(m, pulse, cfg.pair_grid, blp_opts);
        panel.blp_first = blp.first;
        panel.blp_second = blp.second;
        panel.blp_value = blp.value;
        const Trajectory da =
            propagate(m, amplitudes_from_param(blp.first), pulse, cfg.grid_points);
        const Trajectory db =
            propagate(m, amplitudes_from_param(blp.second), pulse, cfg.grid_points);
        panel.curves["distinguishability"] = distinguishability_curve(da, db);

        for (const auto& [label, values] : panel.curves)
            panel.flows[label] = incoming_flow(panel.times, values, label);
        report.panels.push_back(std::move(panel));
    }
    return report;
}

namespace {

std::string fisher_sweep_csv(const FisherSweepResult& r)
{
    std::string csv = "s,phi,tag,f_tot\r\n";
    const ParamTag order[] = {ParamTag::time, ParamTag::rabi, ParamTag::width, ParamTag::phase};
    for (std::size_t i = 0; i < r.s.size(); ++i)
        for (ParamTag tag : order)
            csv += g17(r.s[i]) + "," + g17(r.phi[i]) + "," + to_string(tag) + "," +
                   g17(r.f_tot.at(tag)[i]) + "\r\n";
    return csv;
}

std::string qsl_sweep_csv(const QslSweepResult& r)
{
    std::string csv = "s,phi,tau_f,tau_op,traveled,saturated\r\n";
    for (std::size_t i = 0; i < r.s.size(); ++i) {
        const bool saturated = r.tau_fisher[i].saturated || r.tau_opnorm[i].saturated;
        csv += g17(r.s[i]) + "," + g17(r.phi[i]) + "," + g17(r.tau_fisher[i].tau) + "," +
               g17(r.tau_opnorm[i].tau) + "," + g17(r.tau_opnorm[i].traveled) + "," +
               (saturated ? "1" : "0") + "\r\n";
    }
    return csv;
}

std::string qsl_map_csv(const QslMap& map)
{
    // Log-scale contrast column: ln(tau) shifted so the fastest cell sits at 0.
    double min_tau = std::numeric_limits<double>::infinity();
    for (const auto& cell : map.cells)
        if (!cell.saturated) min_tau = std::min(min_tau, cell.tau);
    std::string csv = "s,phi,tau_op,log_tau_op_shifted,saturated\r\n";
    for (std::size_t i = 0; i < map.s_values.size(); ++i)
        for (std::size_t j = 0; j < map.phi_values.size(); ++j) {
            const QslResult& cell = map.at(static_cast<int>(i), static_cast<int>(j));
            const double shifted =
                cell.saturated ? std::numeric_limits<double>::infinity()
                               : std::log(cell.tau) - std::log(min_tau);
            csv += g17(map.s_values[i]) + "," + g17(map.phi_values[j]) + "," + g17(cell.tau) +
                   "," + g17(shifted) + "," + (cell.saturated ? "1" : "0") + "\r\n";
        }
    return csv;
}

std::string optimize_sweep_csv(const std::vector<OptimizeSweepRow>& rows)
{
    std::string csv =
        "s,phi,f_horizon_uncontrolled,f_max_uncontrolled,f_tot_uncontrolled,"
        "f_horizon_optimized\r\n";
    for (const auto& row : rows)
        csv += g17(row.s) + "," + g17(row.phi) + "," + g17(row.f_horizon_uncontrolled) + "," +
               g17(row.f_max_uncontrolled) + "," + g17(row.f_tot_uncontrolled) + "," +
               g17(row.f_horizon_optimized) + "\r\n";
    return csv;
}

} // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& output_dir_override, int threads,
                                        bool dry_run)
{
    const ModelParams m = cfg.model();
    const std::filesystem::path dir =
        output_dir_override.empty() ? cfg.output_dir : output_dir_override;
    if (dry_run) return {};
    std::filesystem::create_directories(dir);

    std::map<std::string, std::string> files; // name -> contents

    if (cfg.kind == "fisher-sweep") {
        const auto result = fisher_sweep(m, linspace(-1.0, 1.0, cfg.s_grid),
                                         linspace(0.0, kPi, cfg.phi_grid), cfg.grid_points,
                                         threads);
        files["fisher_sweep.csv"] = fisher_sweep_csv(result);
    } else if (cfg.kind == "qsl-sweep") {
        const auto result =
            qsl_sweep(m, linspace(-1.0, 1.0, cfg.s_grid), linspace(0.0, kPi, cfg.phi_grid),
                      cfg.target_angle, cfg.grid_points, 10.0, threads);
        files["qsl_sweep.csv"] = qsl_sweep_csv(result);
    } else if (cfg.kind == "qsl-map") {
        QslMapOptions opts;
        opts.target_angle = cfg.target_angle;
        opts.grid_points_per_horizon = cfg.grid_points;
        opts.threads = threads;
        const QslMap map = qsl_opnorm_map(m, linspace(-1.0, 1.0, cfg.s_grid),
                                          linspace(0.0, kPi, cfg.phi_grid), opts);
        files["qsl_map.csv"] = qsl_map_csv(map);
    } else if (cfg.kind == "optimize-sweep") {
        const auto rows = optimize_sweep(
            m, control_objective_from_string(cfg.objective), linspace(-1.0, 1.0, cfg.s_grid),
            linspace(0.0, kPi, cfg.phi_grid), cfg.segments, cfg.eps_max, cfg.restarts, cfg.seed,
            cfg.grid_points, threads);
        files["optimize_sweep.csv"] = optimize_sweep_csv(rows);
    } else if (cfg.kind == "flows") {
        const FlowsReport report = flows_report(cfg, threads);
        for (const auto& panel : report.panels) {
            std::string series = "t,source,value\r\n";
            for (const auto& [label, values] : panel.curves)
                for (std::size_t i = 0; i < panel.times.size(); ++i)
                    series += g17(panel.times[i]) + "," + label + "," + g17(values[i]) + "\r\n";
            files["flows_series_" + panel.name + ".csv"] = series;

            std::string intervals = "source,t_start,t_end\r\n";
            for (const auto& [label, flow] : panel.flows)
                for (const auto& [lo, hi] : flow.intervals)
                    intervals += label + "," + g17(lo) + "," + g17(hi) + "\r\n";
            files["flows_intervals_" + panel.name + ".csv"] = intervals;

            std::string overlaps = "source_a,source_b,overlap_fraction\r\n";
            for (const auto& [la, fa] : panel.flows)
                for (const auto& [lb, fb] : panel.flows) {
                    if (la == lb) continue;
                    overlaps += la + "," + lb + "," + g17(overlap_fraction(fa, fb)) + "\r\n";
                }
            files["flows_overlaps_" + panel.name + ".csv"] = overlaps;

            std::string pulse = "segment,amplitude\r\n";
            for (int k = 0; k < panel.pulse.segments(); ++k)
                pulse += std::to_string(k) + "," + g17(panel.pulse.amplitudes[k]) + "\r\n";
            files["pulse_" + panel.name + ".csv"] = pulse;
        }
    } else {
        throw ConfigError("unknown experiment kind: '" + cfg.kind + "'");
    }

    std::vector<std::string> written;
    for (const auto& [name, contents] : files) {
        write_file(dir / name, contents);
        written.push_back(name);
    }

    nlohmann::json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["threads"] = threads;
    manifest["outputs"] = written;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    written.push_back("manifest.json");
    return written;
}

} // namespace qprobe
