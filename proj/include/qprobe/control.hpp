#pragma once

#include <cstdint>
#include <vector>

#include "qprobe/dynamics.hpp"
#include "qprobe/model.hpp"

namespace qprobe {

// Terminal functional to maximize at t = horizon.
enum class ControlObjective { qfi_rabi, qfi_width, concurrence };

const char* to_string(ControlObjective objective);
ControlObjective control_objective_from_string(const std::string& name);

struct ControlProblem {
    ModelParams model;
    InitialStateParam x0;
    ControlObjective objective = ControlObjective::qfi_width;
    int segments = 8;
    double eps_max = 20.0;
    int restarts = 20;
    std::uint64_t seed = 0;
    int max_iterations = 0; // 0 = optimizer default

    void validate() const;
};

struct ControlSolution {
    ControlPulse pulse;
    double objective_value = 0.0;
    std::vector<double> history;      // best-so-far values of the winning restart
    std::vector<double> restart_best; // best value reached by each restart
    bool converged = false;
};

// Terminal value of the problem's functional under the given pulse.
double evaluate_objective(const ControlProblem& problem, const ControlPulse& pulse);

// Multi-restart bounded Nelder-Mead over the K segment amplitudes. Restart 0
// starts from the zero pulse, the rest from uniform random pulses in
// [-eps_max, eps_max]^K; deterministic for a fixed seed, also with threads.
ControlSolution optimize(const ControlProblem& problem, int threads = 1);

} // namespace qprobe
