#pragma once

#include <memory>
#include <vector>

#include "chainquant/potential.hpp"
#include "chainquant/semiclassics.hpp"

namespace cq {

// Semiclassical continuation of a chain past k_max, frozen by construction.
struct TailModel {
    SemiclassicalTail tail;
    Sector sector = Sector::neumann;
    int k_max = 0;
    int k_eval = 0;
    std::vector<cplx> levels;  // k_max < k < k_eval
    cplx e_k;                  // level at k = k_eval
    cplx d1, d2, d3;           // dE/dk, d2E/dk2, d3E/dk3 at k_eval
};

std::shared_ptr<const TailModel> make_tail_model(const SemiclassicalTail& tail, Sector sector, int k_max,
                                                 int k_eval);

struct Chain {
    int ell = 0;
    Sector sector = Sector::neumann;
    std::vector<cplx> levels;  // one per k of the sector parity, k <= k_max
    std::shared_ptr<const TailModel> tail;
    cplx translation = 0.0;  // every level, explicit or not, moved by this amount

    int k_max() const { return tail->k_max; }
    std::vector<int> indices() const { return sector_indices(sector, tail->k_max); }
    // position in the plane where the chain is drawn
    cplx display(std::size_t i, double phi) const { return std::polar(1.0, ell * phi) * levels[i]; }
    Chain translated(cplx t) const;
};

Chain make_chain(int ell, Sector sector, std::vector<cplx> levels, std::shared_ptr<const TailModel> tail);

// All L chains of one sector.
struct ChainSystem {
    Potential potential{4};
    Sector sector = Sector::neumann;
    int group_order = 3;
    std::vector<Chain> chains;
    std::vector<int> partner;  // conjugate chain, or -1 when no symmetry is enforced
    int k_max = 48;
    int k_eval = 512;
    cplx beta_m1 = 0.0;
    int cycle = 0;

    int wrap(int ell) const { return ((ell % group_order) + group_order) % group_order; }
    const Chain& chain(int ell) const { return chains[wrap(ell)]; }
    Chain& chain(int ell) { return chains[wrap(ell)]; }
    double phi() const { return potential.symmetry_angle(); }
    bool is_real_chain(int ell) const { return partner[wrap(ell)] == wrap(ell); }
    double ground_scale() const;
};

}  // namespace cq
