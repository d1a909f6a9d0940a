#include "chainquant/semiclassics.hpp"

#include <cmath>
#include <functional>

namespace cq {

namespace {

// all (r_1..r_{N-1}) with sum j r_j = m
void for_each_composition(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> r(n - 1, 0);
    std::function<void(int, int)> rec = [&](int j, int rem) {
        if (j == n) {
            if (rem == 0) fn(r);
            return;
        }
        for (int rj = 0; rj * j <= rem; ++rj) {
            r[j - 1] = rj;
            rec(j + 1, rem - rj * j);
        }
        r[j - 1] = 0;
    };
    rec(1, m);
}

cplx cpow(cplx e, double nu) { return std::exp(nu * std::log(e)); }

}  // namespace

cplx SemiclassicalTail::b(Rational nu) const {
    for (const auto& t : entries)
        if (t.nu == nu) return t.b;
    return 0.0;
}

cplx SemiclassicalTail::count(cplx e) const {
    const cplx le = std::log(e);
    cplx s = 0.0;
    for (const auto& t : entries) s += t.b * std::exp(t.nu.value() * le);
    return s;
}

cplx SemiclassicalTail::count_derivative(cplx e, int d) const {
    const cplx le = std::log(e);
    cplx s = 0.0;
    for (const auto& t : entries) {
        const double nu = t.nu.value();
        double f = 1.0;
        for (int i = 0; i < d; ++i) f *= nu - i;
        if (f != 0.0) s += t.b * f * std::exp((nu - d) * le);
    }
    return s;
}

int classical_depth(const Potential& p) { return p.degree() + 2; }

HeatTraceHead heat_coeffs(const Potential& p, int depth) {
    const int n = p.degree();
    if (n < 3) throw std::invalid_argument("heat_coeffs needs N >= 3");
    if (depth < 0 || depth > classical_depth(p))
        throw std::invalid_argument("heat_coeffs: depth beyond the classical range t^{-nu}, -nu < mu");
    const Rational mu = p.growth_order();
    const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
    HeatTraceHead head;
    for (int m = 0; m < depth; ++m) {
        cplx c = 0.0;
        for_each_composition(n, m, [&](const std::vector<int>& r) {
            int k = 0;
            cplx term = 1.0;
            for (int j = 1; j < n; ++j) {
                const int rj = r[j - 1];
                k += rj;
                if (rj > 0) term *= std::pow(-p.coeff(j), rj) / std::tgamma(rj + 1.0);
            }
            if (term != cplx(0.0)) c += term * std::tgamma(double(n * k - m + 1) / n) / double(n);
        });
        head.entries.emplace_back(-mu + Rational(m, n), c * inv_sqrt_pi);
    }
    return head;
}

SemiclassicalTail bs_coeffs(const Potential& p) {
    const auto head = heat_coeffs(p, classical_depth(p));
    SemiclassicalTail tail;
    tail.mu = p.growth_order();
    for (const auto& [mnu, c] : head.entries) {
        const Rational nu = -mnu;
        tail.entries.push_back({nu, c / std::tgamma(1.0 + nu.value())});
    }
    return tail;
}

SemiclassicalTail harmonic_tail() {
    SemiclassicalTail t;
    t.mu = Rational(1);
    t.entries.push_back({Rational(1), cplx(0.5)});
    return t;
}

cplx bs_level(const SemiclassicalTail& tail, int k, std::optional<cplx> seed) {
    const cplx target = k + 0.5;
    const cplx lead = tail.b(tail.mu);
    cplx e = seed ? *seed : cpow(target / lead, 1.0 / tail.mu.value());
    cplx f = tail.count(e) - target;
    for (int it = 0; it < 100; ++it) {
        const cplx step = f / tail.count_derivative(e, 1);
        double t = 1.0;
        cplx e_new = e - step;
        cplx f_new = tail.count(e_new) - target;
        for (int h = 0; h < 6 && !(std::abs(f_new) <= std::abs(f)); ++h) {
            t *= 0.5;
            e_new = e - t * step;
            f_new = tail.count(e_new) - target;
        }
        e = e_new;
        f = f_new;
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) break;
        if (std::abs(t * step) <= 1e-14 * std::abs(e) || f == cplx(0.0)) return e;
    }
    throw NewtonError("semiclassical level k=" + std::to_string(k) + " did not converge", k, e);
}

std::vector<int> sector_indices(Sector sector, int k_max) {
    std::vector<int> ks;
    for (int k = sector_parity(sector); k <= k_max; k += sector_step(sector)) ks.push_back(k);
    return ks;
}

std::vector<cplx> semiclassical_chain(const SemiclassicalTail& tail, Sector sector, int k_max) {
    const auto ks = sector_indices(sector, k_max);
    std::vector<cplx> out(ks.size());
    // top down: deep wells have no asymptotic root at low k, so those
    // levels are continued from above and at worst extrapolated
    for (std::size_t j = ks.size(); j-- > 0;) {
        try {
            out[j] = bs_level(tail, ks[j], std::nullopt);
            continue;
        } catch (const NewtonError&) {
            if (j + 1 == ks.size()) throw;
        }
        try {
            out[j] = bs_level(tail, ks[j], out[j + 1]);
        } catch (const NewtonError&) {
            if (j + 2 >= ks.size()) throw;
            out[j] = 2.0 * out[j + 1] - out[j + 2];
        }
    }
    return out;
}

std::vector<cplx> semiclassical_chain(const Potential& p, Sector sector, int k_max) {
    return semiclassical_chain(bs_coeffs(p), sector, k_max);
}

}  // namespace cq
