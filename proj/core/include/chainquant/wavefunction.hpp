#pragma once

#include <optional>
#include <vector>

#include "chainquant/quantizer.hpp"

namespace cq {

// psi_lambda(a) of the absolutely normalized recessive solution, lambda = -E.
struct WaveSample {
    double a = 0.0;
    cplx lambda = 0.0;
    cplx psi = 0.0;
    std::optional<cplx> psi_prime;
    double contraction_ratio = 0.0;
    bool converged = false;
    bool warm_started = false;
    int cycles = 0;
    Status status = Status::max_cycles;
};

struct WaveOptions {
    bool derivative = false;  // also solve the Neumann system for psi'
    bool warm_start = true;
};

// Solves the chains of the shifted potential and evaluates its Dirichlet determinant at V(a) - E.
// The scheme follows the symmetry of the shifted potential unless config asks for a custom order.
WaveSample wave_at(const Potential& p, double energy, double a, const IterationConfig& config,
                   WaveOptions opt = {});

std::vector<WaveSample> wave_profile(const Potential& p, double energy, const std::vector<double>& grid,
                                     const IterationConfig& config, WaveOptions opt = {});

}  // namespace cq
