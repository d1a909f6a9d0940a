#include "chainquant/determinant.hpp"

#include <cmath>

namespace cq {

namespace {

// +1/-1 when the segment E -> E + lambda crosses the negative real axis
int crossing(cplx e, cplx lambda) {
    const cplx f = e + lambda;
    const double a = e.imag(), b = f.imag();
    if (!((a > 0 && b < 0) || (a < 0 && b > 0))) return 0;
    const double t = a / (a - b);
    if (e.real() + t * lambda.real() >= 0) return 0;
    return a > 0 ? 1 : -1;
}

struct Accumulated {
    cplx sum = 0.0;
    int windings = 0;
};

void check_zero(cplx z, double scale, int k) {
    if (std::abs(z) < 1e-12 * scale) throw DeterminantZero("determinant zero at k=" + std::to_string(k), k);
}

// sum over levels plus the regularized remainder beyond k_eval
DeterminantValue log_det_impl(const Chain& chain, const TailModel& m, cplx lambda) {
    const int h = sector_step(chain.sector);
    const double scale = std::max(1.0, chain.levels.empty() ? 1.0 : std::abs(chain.levels[0]));
    const cplx shift = lambda + chain.translation;
    Accumulated acc;
    const auto ks = chain.indices();
    for (std::size_t i = 0; i < chain.levels.size(); ++i) {
        const cplx z = chain.levels[i] + lambda;
        check_zero(z, scale, ks[i]);
        acc.sum += std::log(z);
        acc.windings += crossing(chain.levels[i], lambda);
    }
    int k = ks.empty() ? sector_parity(chain.sector) : ks.back() + h;
    for (const cplx e : m.levels) {
        const cplx z = e + shift;
        check_zero(z, scale, k);
        acc.sum += std::log(z);
        acc.windings += crossing(e + chain.translation, lambda);
        k += h;
    }

    const cplx ep = m.e_k + shift;
    check_zero(ep, scale, m.k_eval);
    const cplx lep = std::log(ep);
    acc.sum += 0.5 * lep;

    // counterterm: n(E) re-expanded around E' = E_K + shift in powers of x = -shift
    const cplx x = -shift;
    if (std::abs(x) > 0.5 * std::abs(ep))
        throw TailDivergence("spectral argument too large for K_eval=" + std::to_string(m.k_eval));
    const double inv_h = 1.0 / h;
    for (const auto& term : m.tail.entries) {
        const double nu = term.nu.value();
        double binom = 1.0;
        cplx xm = 1.0;
        for (int j = 0; j < 200; ++j) {
            if (j > 0) {
                binom *= (nu - j + 1) / j;
                xm *= x;
            }
            if (binom == 0.0) break;
            const double rho = nu - j;
            if (std::abs(rho) < 1e-14) continue;
            const cplx t = term.b * binom * xm * std::exp(rho * lep) * (lep - 1.0 / rho);
            acc.sum -= inv_h * t;
            if (j > 0 && std::abs(t) < 1e-18 * (1.0 + std::abs(acc.sum))) break;
        }
    }

    // Euler-Maclaurin corrections for f(k) = log(E(k) + lambda)
    const cplx z = ep;
    const cplx f1 = m.d1 / z;
    const cplx f3 = m.d3 / z - 3.0 * m.d1 * m.d2 / (z * z) + 2.0 * m.d1 * m.d1 * m.d1 / (z * z * z);
    acc.sum += -(h / 12.0) * f1 + (h * h * h / 720.0) * f3;

    return {acc.sum.real(), acc.sum.imag(), acc.windings};
}

}  // namespace

DeterminantValue log_det(const Chain& chain, cplx lambda) { return log_det_impl(chain, *chain.tail, lambda); }

double tail_stability(const Chain& chain, cplx lambda) {
    const auto& m = *chain.tail;
    const auto doubled = make_tail_model(m.tail, m.sector, m.k_max, 2 * m.k_eval);
    const cplx a = log_det_impl(chain, m, lambda).log();
    const cplx b = log_det_impl(chain, *doubled, lambda).log();
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

cplx zeta_value(const Chain& chain, double s) {
    const auto& m = *chain.tail;
    if (chain.translation != cplx(0.0)) throw std::invalid_argument("zeta_value: translated chains not supported");
    if (s <= -m.tail.mu.value())
        throw std::domain_error("zeta_value: s below the reach of the semiclassical tail");
    const int h = sector_step(chain.sector);
    cplx sum = 0.0;
    auto pw = [s](cplx e) { return std::exp(-s * std::log(e)); };
    for (const cplx e : chain.levels) sum += pw(e);
    for (const cplx e : m.levels) sum += pw(e);
    const cplx ek = m.e_k;
    sum += 0.5 * pw(ek);
    const cplx lek = std::log(ek);
    for (const auto& term : m.tail.entries) {
        const double nu = term.nu.value();
        if (nu == 0.0) continue;
        if (std::abs(s - nu) < 1e-14) throw std::domain_error("zeta_value: pole at s = nu");
        sum += (1.0 / h) * term.b * nu * std::exp((nu - s) * lek) / (s - nu);
    }
    const cplx g1 = -s * std::exp((-s - 1) * lek);
    const cplx g2 = s * (s + 1) * std::exp((-s - 2) * lek);
    const cplx g3 = -s * (s + 1) * (s + 2) * std::exp((-s - 3) * lek);
    const cplx f1 = g1 * m.d1;
    const cplx f3 = g3 * m.d1 * m.d1 * m.d1 + 3.0 * g2 * m.d1 * m.d2 + g1 * m.d3;
    sum += -(h / 12.0) * f1 + (h * h * h / 720.0) * f3;
    return sum;
}

double fredholm_crosscheck(const Chain& chain, cplx lambda, int terms) {
    if (lambda == cplx(0.0)) return 0.0;
    const auto& m = *chain.tail;
    const int h = sector_step(chain.sector);
    cplx log_prod = 0.0;
    int used = 0;
    for (const cplx e : chain.levels) {
        if (used == terms) break;
        log_prod += std::log(1.0 + lambda / e);
        ++used;
    }
    for (const cplx e : m.levels) {
        if (used == terms) break;
        const cplx et = e + chain.translation;
        log_prod += std::log(1.0 + lambda / et);
        ++used;
    }
    int k = m.k_eval;
    cplx seed = m.e_k;
    while (used < terms) {
        seed = bs_level(m.tail, k, seed);
        log_prod += std::log(1.0 + lambda / (seed + chain.translation));
        ++used;
        k += h;
    }
    const cplx ratio = log_det(chain, lambda).log() - log_det(chain, 0.0).log();
    return std::abs(std::exp(log_prod - ratio) - 1.0);
}

cplx sigma(const ChainSystem& system, int ell, cplx e, const std::optional<LevelOverride>& over) {
    const double phi = system.phi();
    const int up = system.wrap(ell + 1);
    const int down = system.wrap(ell - 1);
    auto value = [&](int idx, cplx lambda) {
        if (over && system.wrap(over->ell) == idx) {
            Chain c = system.chains[idx];
            c.levels[over->index] = over->value;
            return log_det(c, lambda).log();
        }
        return log_det(system.chains[idx], lambda).log();
    };
    const cplx a = value(up, -std::polar(1.0, -phi) * e);
    const cplx b = value(down, -std::polar(1.0, phi) * e);
    return cplx(0.0, -1.0) * (a - b);
}

cplx quantization_rhs(const ChainSystem& system, int ell, int k) {
    const int n = system.potential.degree();
    const double sgn = system.sector == Sector::dirichlet ? -1.0 : 1.0;
    const double maslov = double(n - 2) / (2.0 * (n + 2));
    const double parity = (ell % 2 == 0) ? 1.0 : -1.0;
    return pi * (k + 0.5 + sgn * maslov) + parity * system.phi() * system.beta_m1;
}

cplx wronskian_residual(const ChainSystem& neumann, const ChainSystem& dirichlet, cplx lambda) {
    const double phi = neumann.phi();
    const cplx rot = std::polar(1.0, -phi);
    const cplx dp_rot = log_det(neumann.chain(1), rot * lambda).value();
    const cplx dm = log_det(dirichlet.chain(0), lambda).value();
    const cplx dp = log_det(neumann.chain(0), lambda).value();
    const cplx dm_rot = log_det(dirichlet.chain(1), rot * lambda).value();
    const cplx i(0.0, 1.0);
    // lambda-dependent only in the harmonic case
    const cplx beta = laurent_head(neumann.potential, lambda).beta_m1();
    return std::exp(i * phi / 4.0) * dp_rot * dm - std::exp(-i * phi / 4.0) * dp * dm_rot -
           2.0 * i * std::exp(i * phi * beta / 2.0);
}

}  // namespace cq
