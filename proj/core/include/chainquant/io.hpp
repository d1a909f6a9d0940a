#pragma once

#include <string>
#include <vector>

#include "chainquant/quantizer.hpp"
#include "chainquant/wavefunction.hpp"

namespace cq {

std::string to_string(Sector s);
Sector parse_sector(const std::string& s);

// {"degree": N, "coeffs": [[re, im], ...]}
std::string potential_to_json(const Potential& p);
Potential potential_from_json(const std::string& text);

// [{"nu": [num, den], "b": [re, im]}, ...]
std::string tail_to_json(const SemiclassicalTail& tail);
SemiclassicalTail tail_from_json(const std::string& text);

std::string snapshot_to_json(const ChainSystem& system);

// Rebuilds the tail models from the stored potential, k_max and k_eval.
// Throws if a stored tail disagrees with the one recomputed from the potential.
ChainSystem snapshot_from_json(const std::string& text);

// cycle,sup_displacement,ratio_estimate
std::string convergence_csv(const ConvergenceReport& report);

// ell,k,re,im,display_re,display_im for every explicit level
std::string levels_csv(const ChainSystem& system);

// a,re_psi,im_psi,ratio,converged
std::string wave_csv(const std::vector<WaveSample>& samples);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace cq
