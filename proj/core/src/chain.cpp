#include "chainquant/chain.hpp"

#include <stdexcept>

namespace cq {

std::shared_ptr<const TailModel> make_tail_model(const SemiclassicalTail& tail, Sector sector, int k_max,
                                                 int k_eval) {
    const int h = sector_step(sector);
    const int par = sector_parity(sector);
    int first = k_max + 1;
    while ((first - par) % h != 0) ++first;
    int kk = k_eval;
    while ((kk - par) % h != 0) ++kk;
    if (kk <= first) throw std::invalid_argument("K_eval must exceed k_max");

    auto m = std::make_shared<TailModel>();
    m->tail = tail;
    m->sector = sector;
    m->k_max = k_max;
    m->k_eval = kk;
    for (int k = first; k < kk; k += h) m->levels.push_back(bs_level(tail, k));
    m->e_k = bs_level(tail, kk);

    // derivatives of the inverse of n(E) = k + 1/2
    const cplx n1 = tail.count_derivative(m->e_k, 1);
    const cplx n2 = tail.count_derivative(m->e_k, 2);
    const cplx n3 = tail.count_derivative(m->e_k, 3);
    m->d1 = 1.0 / n1;
    m->d2 = -n2 * m->d1 * m->d1 * m->d1;
    m->d3 = -n3 * std::pow(m->d1, 4) - 3.0 * n2 * m->d1 * m->d1 * m->d2;
    return m;
}

Chain make_chain(int ell, Sector sector, std::vector<cplx> levels, std::shared_ptr<const TailModel> tail) {
    if (!tail) throw std::invalid_argument("chain needs a tail model");
    if (tail->sector != sector) throw std::invalid_argument("tail sector mismatch");
    if (levels.size() != sector_indices(sector, tail->k_max).size())
        throw std::invalid_argument("chain level count does not match k_max");
    Chain c;
    c.ell = ell;
    c.sector = sector;
    c.levels = std::move(levels);
    c.tail = std::move(tail);
    return c;
}

Chain Chain::translated(cplx t) const {
    Chain c = *this;
    for (auto& e : c.levels) e += t;
    c.translation += t;
    return c;
}

double ChainSystem::ground_scale() const {
    if (chains.empty() || chains[0].levels.empty()) return 1.0;
    return std::max(1.0, std::abs(chains[0].levels[0]));
}

}  // namespace cq
