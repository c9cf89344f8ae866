#include "qprobe/control.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qprobe/detail/nelder_mead.hpp"
#include "qprobe/entanglement.hpp"
#include "qprobe/metrology.hpp"
#include "qprobe/util.hpp"

namespace qprobe {

const char* to_string(ControlObjective objective)
{
    switch (objective) {
    case ControlObjective::qfi_rabi: return "qfi_R_at_T";
    case ControlObjective::qfi_width: return "qfi_lambda_at_T";
    case ControlObjective::concurrence: return "concurrence_at_T";
    }
    return "?";
}

ControlObjective control_objective_from_string(const std::string& name)
{
    if (name == "qfi_R_at_T") return ControlObjective::qfi_rabi;
    if (name == "qfi_lambda_at_T") return ControlObjective::qfi_width;
    if (name == "concurrence_at_T") return ControlObjective::concurrence;
    throw std::invalid_argument("unknown control objective: " + name);
}

void ControlProblem::validate() const
{
    model.validate();
    x0.validate();
    if (segments < 1) throw std::invalid_argument("ControlProblem: segments must be >= 1");
    if (restarts < 1) throw std::invalid_argument("ControlProblem: restarts must be >= 1");
    if (!(eps_max > 0.0)) throw std::invalid_argument("ControlProblem: eps_max must be positive");
}

double evaluate_objective(const ControlProblem& problem, const ControlPulse& pulse)
{
    problem.validate();
    pulse.validate();
    if (!pulse.within_bounds(problem.eps_max + 1e-12))
        throw std::invalid_argument("evaluate_objective: pulse exceeds the amplitude bound");

    const ProbeAmplitudes x0 = amplitudes_from_param(problem.x0);
    // Only the terminal point matters; sample just the segment boundaries.
    const int grid_points = std::max(problem.segments, 2);
    if (problem.objective == ControlObjective::concurrence) {
        const Trajectory traj = propagate(problem.model, x0, pulse, grid_points);
        return concurrence(traj.states.back());
    }
    const ParamTag tag =
        problem.objective == ControlObjective::qfi_rabi ? ParamTag::rabi : ParamTag::width;
    const Trajectory traj = propagate(problem.model, x0, pulse, grid_points, {tag});
    const int last = traj.size() - 1;
    return qfi(density_from_amplitudes(traj.states[last]),
               parameter_derivative_rho(traj, tag, last));
}

ControlSolution optimize(const ControlProblem& problem, int threads)
{
    problem.validate();
    const int K = problem.segments;
    const std::vector<double> lower(K, -problem.eps_max);
    const std::vector<double> upper(K, problem.eps_max);

    detail::NelderMeadOptions nm_opts;
    nm_opts.max_iterations = problem.max_iterations;
    nm_opts.f_tol = 1e-10;
    nm_opts.x_tol = 1e-8;

    auto objective = [&](const std::vector<double>& amplitudes) {
        return evaluate_objective(problem, ControlPulse{amplitudes, problem.model.horizon});
    };

    std::vector<detail::NelderMeadResult> runs(problem.restarts);
    parallel_for(static_cast<std::size_t>(problem.restarts), threads, [&](std::size_t r) {
        std::vector<double> start(K, 0.0);
        if (r > 0) {
            // Each restart owns its own deterministic stream.
            std::mt19937_64 rng(problem.seed + 0x9E3779B97F4A7C15ULL * r);
            std::uniform_real_distribution<double> uniform(-problem.eps_max, problem.eps_max);
            for (double& a : start) a = uniform(rng);
        }
        runs[r] = detail::nelder_mead_maximize(objective, start, lower, upper, nm_opts);
    });

    std::size_t winner = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].value > runs[winner].value) winner = r;

    ControlSolution solution;
    solution.pulse = ControlPulse{runs[winner].x, problem.model.horizon};
    solution.history = runs[winner].history;
    solution.converged = runs[winner].converged;
    solution.restart_best.resize(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) solution.restart_best[r] = runs[r].value;
    // Fresh evaluation of the returned pulse; no stale cache.
    solution.objective_value = evaluate_objective(problem, solution.pulse);
    return solution;
}

} // namespace qprobe
