#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chainquant/determinant.hpp"

namespace cq {

enum class Scheme { A, B, C, custom };
enum class Updating { immediate, synchronous };

struct IterationConfig {
    Scheme scheme = Scheme::A;
    std::vector<int> order;  // only for Scheme::custom
    bool mirror_pairs = false;  // custom schemes: substitute conjugate mirror levels as in scheme B
    bool enforce_symmetry = true;  // pair conjugate chains of real potentials
    Updating updating = Updating::immediate;
    double newton_tol = 1e-10;
    int max_cycles = 60;
    int k_max = 48;
    int k_eval = 512;
    int jobs = 1;
};

enum class Status { converged, max_cycles, diverging, newton_failure };

std::string to_string(Status s);
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct ConvergenceReport {
    std::vector<double> displacement;  // sup over explicit levels, one per cycle
    double ratio = 0.0;                // fitted contraction ratio
    bool ratio_reliable = false;
    std::optional<double> radius;  // Jacobian spectral radius, when computed
    Status status = Status::max_cycles;
    std::string message;
    std::vector<std::string> flags;  // collision reseeds and similar events

    bool converged() const { return status == Status::converged; }
};

// Chain system seeded with semiclassical levels of every rotated potential.
ChainSystem make_system(const Potential& p, Sector sector, const IterationConfig& config);

// Solves the quantization condition of chain ell against its frozen neighbours.
Chain solve_chain(const ChainSystem& system, int ell, const IterationConfig& config);

struct SchemeResult {
    ChainSystem system;
    ConvergenceReport report;
};

SchemeResult run_scheme(ChainSystem system, const IterationConfig& config);

// One full cycle of the configured scheme; throws NewtonError on failure.
ChainSystem iterate_once(const ChainSystem& system, const IterationConfig& config);

struct ContractionEstimate {
    double ratio = 0.0;
    bool reliable = false;
};

// Least-squares slope of log displacement against cycle index.
ContractionEstimate estimate_contraction(const std::vector<double>& history);

// Spectral radius of the Jacobian of x -> map(x) at x0, by central differences.
double spectral_radius_of_map(const std::function<std::vector<double>(const std::vector<double>&)>& map,
                              const std::vector<double>& x0, double h);

double linearized_radius(const ChainSystem& system, const IterationConfig& config);

// |Sigma - rhs| over every explicit level of every solved chain
double fixed_point_residual(const ChainSystem& system, const IterationConfig& config);

// chains solved by the scheme, in order; the others follow by conjugation
std::vector<int> scheme_order(const ChainSystem& system, const IterationConfig& config);

}  // namespace cq
