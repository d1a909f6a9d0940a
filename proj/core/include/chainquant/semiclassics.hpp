#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chainquant/potential.hpp"

namespace cq {

enum class Sector { neumann, dirichlet, full };

// parity of the quantum numbers k in a sector; full chains use every k
inline int sector_parity(Sector s) { return s == Sector::dirichlet ? 1 : 0; }
inline int sector_step(Sector s) { return s == Sector::full ? 1 : 2; }

struct TailTerm {
    Rational nu;
    cplx b;
};

// n(E) = sum_nu b_nu E^nu, principal branch E^nu = exp(nu log E).
struct SemiclassicalTail {
    std::vector<TailTerm> entries;
    Rational mu;

    int depth() const { return static_cast<int>(entries.size()); }
    cplx b(Rational nu) const;
    cplx count(cplx e) const;
    // d-th derivative of count
    cplx count_derivative(cplx e, int d) const;
};

struct HeatTraceHead {
    // (-nu, c_{-nu}) pairs: theta(t) ~ sum c_{-nu} t^{-nu}
    std::vector<std::pair<Rational, cplx>> entries;
};

HeatTraceHead heat_coeffs(const Potential& p, int depth);

// number of heat-trace exponents strictly above t^mu
int classical_depth(const Potential& p);

SemiclassicalTail bs_coeffs(const Potential& p);

// q^2 on the half line: n(E) = E/2 exactly
SemiclassicalTail harmonic_tail();

struct NewtonError : std::runtime_error {
    NewtonError(const std::string& what, int k_, cplx last_) : std::runtime_error(what), k(k_), last(last_) {}
    int k;
    cplx last;
};

// root of n(E) = k + 1/2
cplx bs_level(const SemiclassicalTail& tail, int k, std::optional<cplx> seed = std::nullopt);

std::vector<cplx> semiclassical_chain(const SemiclassicalTail& tail, Sector sector, int k_max);
std::vector<cplx> semiclassical_chain(const Potential& p, Sector sector, int k_max);

// quantum numbers of a sector up to k_max
std::vector<int> sector_indices(Sector sector, int k_max);

}  // namespace cq
