#pragma once

#include <optional>
#include <stdexcept>

#include "chainquant/chain.hpp"

namespace cq {

struct DeterminantValue {
    double log_modulus = 0.0;
    double phase = 0.0;
    int windings = 0;  // factors whose principal log left the straight path from lambda = 0

    cplx log() const { return {log_modulus, phase}; }
    cplx value() const { return std::exp(log()); }
};

struct DeterminantZero : std::runtime_error {
    DeterminantZero(const std::string& w, int k_) : std::runtime_error(w), k(k_) {}
    int k;
};

struct TailDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zeta-regularized log D(lambda) over the chain and its semiclassical tail.
DeterminantValue log_det(const Chain& chain, cplx lambda);

// Relative change of log D under K_eval doubling.
double tail_stability(const Chain& chain, cplx lambda);

// Spectral zeta function sum_k E_k^{-s}, continued to s > -mu.
cplx zeta_value(const Chain& chain, double s);

// |prod_{first `terms` levels}(1 + lambda/E_k) / (D(lambda)/D(0)) - 1|
double fredholm_crosscheck(const Chain& chain, cplx lambda, int terms);

struct LevelOverride {
    int ell;
    std::size_t index;
    cplx value;
};

// Quantization phase of chain ell, built from the determinants of its two neighbours.
cplx sigma(const ChainSystem& system, int ell, cplx e, const std::optional<LevelOverride>& over = std::nullopt);

// Right-hand side of the exact quantization condition for level k of chain ell.
cplx quantization_rhs(const ChainSystem& system, int ell, int k);

// Bilinear identity between the Neumann and Dirichlet systems; zero on the exact spectra.
cplx wronskian_residual(const ChainSystem& neumann, const ChainSystem& dirichlet, cplx lambda);

}  // namespace cq
