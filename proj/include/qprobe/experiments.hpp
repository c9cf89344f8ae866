#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qprobe/control.hpp"
#include "qprobe/dynamics.hpp"
#include "qprobe/flows.hpp"
#include "qprobe/model.hpp"
#include "qprobe/nonmarkov.hpp"
#include "qprobe/speedlimits.hpp"

namespace qprobe {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One experiment, parsed from a flat JSON object. Unknown keys and type
// mismatches are rejected with ConfigError.
struct ExperimentConfig {
    std::string kind; // fisher-sweep | qsl-sweep | qsl-map | optimize-sweep | flows
    double a1 = 0.4;
    double a2 = 0.6;
    double rabi = 5.0;
    double lambda = 1.0;
    double horizon = 2.0;
    int grid_points = 2000;
    int s_grid = 41;
    int phi_grid = 5;
    double target_angle = 0.78539816339744830962; // pi/4
    int segments = 8;
    double eps_max = 20.0;
    int restarts = 20;
    std::uint64_t seed = 12345;
    std::string objective = "qfi_lambda_at_T";
    std::string output_dir = ".";
    // flows-only keys
    double s = 0.0;
    double phi = 0.0;
    std::string tags = "lambda";           // comma-separated estimation tags
    std::string panels = "uncontrolled";   // uncontrolled | triptych
    int pair_grid = 21;

    ModelParams model() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// ---- sweep results (in-memory; the CSV layer serializes them) ----

// One evaluated initial-state cell. The two special states are appended to
// the regular grid so the structural extrema are probed exactly.
enum class CellKind { grid, subradiant, superradiant };

struct FisherSweepResult {
    std::vector<double> s, phi;
    std::vector<CellKind> cell_kind;
    std::map<ParamTag, std::vector<double>> f_tot;
    int subradiant_cell = -1;
    int superradiant_cell = -1;
};

FisherSweepResult fisher_sweep(const ModelParams& m, const std::vector<double>& s_values,
                               const std::vector<double>& phi_values, int grid_points,
                               int threads = 1);

struct QslSweepResult {
    std::vector<double> s, phi;
    std::vector<CellKind> cell_kind;
    std::vector<QslResult> tau_fisher, tau_opnorm;
    int subradiant_cell = -1;
    int superradiant_cell = -1;
};

QslSweepResult qsl_sweep(const ModelParams& m, const std::vector<double>& s_values,
                         const std::vector<double>& phi_values, double target_angle,
                         int grid_points, double horizon_factor = 10.0, int threads = 1);

struct OptimizeSweepRow {
    double s = 0.0;
    double phi = 0.0;
    double f_horizon_uncontrolled = 0.0; // F(T) with zero pulse
    double f_max_uncontrolled = 0.0;     // max_t F(t) with zero pulse
    double f_tot_uncontrolled = 0.0;     // integral of F(t) with zero pulse
    double f_horizon_optimized = 0.0;    // F(T) under the optimized pulse
};

std::vector<OptimizeSweepRow> optimize_sweep(const ModelParams& m, ControlObjective objective,
                                             const std::vector<double>& s_values,
                                             const std::vector<double>& phi_values, int segments,
                                             double eps_max, int restarts, std::uint64_t seed,
                                             int grid_points, int threads = 1);

// ---- information-flow report (one panel per control scheme) ----

struct FlowsPanel {
    std::string name; // uncontrolled | qfi_control | concurrence_control
    ControlPulse pulse{{0.0}, 0.0};
    std::vector<double> times;
    // Curve label -> samples. Labels: qfi_<tag>, cfi_<tag>, distinguishability,
    // concurrence.
    std::map<std::string, std::vector<double>> curves;
    std::map<std::string, FlowIntervals> flows;
    InitialStateParam blp_first, blp_second; // pair behind the D(t) curve
    double blp_value = 0.0;
};

struct FlowsReport {
    std::vector<FlowsPanel> panels;
};

FlowsReport flows_report(const ExperimentConfig& cfg, int threads = 1);

// ---- run-to-files front end (CSV + manifest.json) ----

// Validates, runs and writes outputs into cfg.output_dir (or the override).
// Throws ConfigError for schema problems; std::exception subclasses for
// numerical failures.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& output_dir_override = "",
                                        int threads = 1, bool dry_run = false);

} // namespace qprobe
