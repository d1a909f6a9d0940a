#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chainquant/potential.hpp"
#include "chainquant/semiclassics.hpp"

namespace cq {

// Independent reference values; used by tests and `validate`, never by the solver.
struct OracleResult {
    std::vector<cplx> values;
    std::vector<cplx> derivatives;  // psi' where the method produces it
    std::string method;
    std::string resolution;
    double error_estimate = 0.0;
};

struct DiagonalizeOptions {
    int basis = 200;     // harmonic-oscillator states before parity restriction
    double omega = 0.0;  // basis frequency, 0 picks one from the degree
};

// Half-line levels of an even potential from a parity-restricted oscillator basis.
OracleResult diagonalize(const Potential& p, Sector sector, int count, DiagonalizeOptions opt = {});

struct IntegrationOptions {
    double contrast = 20.0;  // integral of Re Pi over [0, q_start]; e^{2*20} > 1e16
    double rtol = 1e-12;
};

// psi and psi' of the absolutely normalized recessive solution at q.
std::pair<cplx, cplx> recessive_solution(const Potential& p, cplx lambda, double q, IntegrationOptions opt = {});

// starting point used for a given lambda
double start_point(const Potential& p, cplx lambda, double contrast);

// Eigenvalue E (lambda = -E) near seed with psi(0) = 0 or psi'(0) = 0.
OracleResult shoot_complex(const Potential& p, Sector sector, cplx seed, IntegrationOptions opt = {});

// psi at each grid point for energy E.
OracleResult integrate_wave(const Potential& p, double energy, const std::vector<double>& grid,
                            IntegrationOptions opt = {});

// s minimizing sum |values - s * reference|^2
cplx fit_scale(const std::vector<cplx>& reference, const std::vector<cplx>& values);

}  // namespace cq
