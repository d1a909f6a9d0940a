#include "chainquant/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cq {

namespace {

namespace ode = boost::numeric::odeint;
using state = std::array<double, 4>;

Eigen::MatrixXd ho_hamiltonian(const Potential& p, int basis, double omega) {
    const int n = p.degree();
    const int mt = basis + n + 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mt, mt);
    for (int i = 1; i < mt; ++i) a(i - 1, i) = std::sqrt(static_cast<double>(i));
    const Eigen::MatrixXd ad = a.transpose();
    const Eigen::MatrixXd q = (a + ad) / std::sqrt(2.0 * omega);
    const Eigen::MatrixXd d = ad - a;
    Eigen::MatrixXd h = -(omega / 2.0) * d * d;
    Eigen::MatrixXd qp = Eigen::MatrixXd::Identity(mt, mt);
    for (int pw = 1; pw <= n; ++pw) {
        qp = qp * q;
        const double c = pw == n ? 1.0 : p.coeff(n - pw).real();
        if (c != 0.0) h += c * qp;
    }
    return h.topLeftCorner(basis, basis);
}

std::vector<double> parity_levels(const Eigen::MatrixXd& h, int parity, int count) {
    std::vector<int> idx;
    for (int i = parity; i < h.rows(); i += 2) idx.push_back(i);
    Eigen::MatrixXd sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = h(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: eigensolver failed");
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + std::min<Eigen::Index>(count, sub.rows()));
    return out;
}

cplx pi_of(const Potential& p, cplx lambda, double q) { return std::sqrt(p(q) + lambda); }

// Fujiwara bound on the roots of V + lambda
double root_bound(const Potential& p, cplx lambda) {
    const int n = p.degree();
    double r = 2.0 * std::pow(std::abs(lambda) / 2.0, 1.0 / n);
    for (int j = 1; j < n; ++j) r = std::max(r, 2.0 * std::pow(std::abs(p.coeff(j)), 1.0 / j));
    return r;
}

struct StartData {
    double q;
    cplx log_psi;
    cplx ratio;  // psi'/psi
    double truncation = 0.0;  // smallest term of the asymptotic series
};

// y = psi'/psi = sum_m c_m q^{N/2 - m/2} solves y' + y^2 = V + lambda order by order, c_0 = -1.
// log psi is the term-wise antiderivative with no constant, which is the absolute normalization.
StartData start_data(const Potential& p, cplx lambda, double q) {
    const int n = p.degree();
    auto rhs = [&](int m) -> cplx {
        if (m % 2) return 0.0;
        const int j = m / 2;
        if (j == 0) return 1.0;
        if (j < n) return p.coeff(j);
        return j == n ? lambda : cplx(0.0);
    };
    auto expo = [&](int m) { return 0.5 * n - 0.5 * m; };
    std::vector<cplx> c{-1.0};
    cplx log_psi = -std::pow(q, expo(0) + 1.0) / (expo(0) + 1.0);
    cplx ratio = -std::pow(q, expo(0));
    double best = std::numeric_limits<double>::infinity();
    int small = 0, rising = 0;
    for (int m = 1; m < 4000; ++m) {
        cplx acc = rhs(m);
        for (int i = 1; i < m; ++i) acc -= c[i] * c[m - i];
        if (m >= n + 2) acc -= c[m - n - 2] * expo(m - n - 2);
        c.push_back(acc / (2.0 * c[0]));
        const double e = expo(m);
        const cplx lt = std::abs(e + 1.0) < 1e-12 ? c[m] * std::log(q) : c[m] * std::pow(q, e + 1.0) / (e + 1.0);
        const cplx rt = c[m] * std::pow(q, e);
        const double size = std::abs(lt) + std::abs(rt) / std::max(1.0, std::abs(ratio));
        if (c[m] == cplx(0.0)) continue;
        if (size > best && size > 1e-300) {
            // asymptotic series turned around before reaching precision
            if (++rising >= 4) break;
        } else {
            rising = 0;
        }
        best = std::min(best, size);
        log_psi += lt;
        ratio += rt;
        small = size < 1e-17 * (1.0 + std::abs(log_psi)) ? small + 1 : 0;
        if (small >= 8) return {q, log_psi, ratio, size};
    }
    if (best > 1e-8)
        throw std::runtime_error("recessive data: asymptotic series stalls at " + std::to_string(best) +
                                 "; increase q_start");
    return {q, log_psi, ratio, best};
}

// integrate y'' = (V + lambda) y from q0 to q1 in place
void propagate(const Potential& p, cplx lambda, state& y, double q0, double q1, double rtol) {
    if (q0 == q1) return;
    auto rhs = [&](const state& s, state& ds, double q) {
        const cplx f = p(q) + lambda;
        const cplx v(s[0], s[1]);
        const cplx acc = f * v;
        ds[0] = s[2];
        ds[1] = s[3];
        ds[2] = acc.real();
        ds[3] = acc.imag();
    };
    auto stepper = ode::make_controlled(1e-300, rtol, ode::runge_kutta_fehlberg78<state>());
    const double dt = q1 < q0 ? -1e-3 : 1e-3;
    ode::integrate_adaptive(stepper, rhs, y, q0, q1, dt);
    for (double v : y)
        if (!std::isfinite(v) || std::abs(v) > 1e290)
            throw std::runtime_error("inward integration overflowed; lower the contrast or q_start");
}

}  // namespace

OracleResult diagonalize(const Potential& p, Sector sector, int count, DiagonalizeOptions opt) {
    if (!p.is_real()) throw std::invalid_argument("diagonalize needs real coefficients");
    if (!p.is_even())
        throw std::invalid_argument("diagonalize handles even potentials; use shoot_complex otherwise");
    if (sector == Sector::full) throw std::invalid_argument("diagonalize works per sector");
    const double omega = opt.omega > 0 ? opt.omega : std::max(2.0, double(p.degree()));
    const int par = sector_parity(sector);
    const auto coarse = parity_levels(ho_hamiltonian(p, opt.basis, omega), par, count);
    const auto fine = parity_levels(ho_hamiltonian(p, 2 * opt.basis, omega), par, count);
    double err = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
        err = std::max(err, std::abs(coarse[i] - fine[i]) / std::max(1.0, std::abs(fine[i])));
    if (err > 1e-8) throw std::runtime_error("diagonalize: basis doubling changed levels by " + std::to_string(err));
    OracleResult r;
    for (double e : fine) r.values.emplace_back(e);
    r.method = "diagonalization";
    std::ostringstream os;
    os << "oscillator basis " << 2 * opt.basis << ", omega " << omega;
    r.resolution = os.str();
    r.error_estimate = err;
    return r;
}

double start_point(const Potential& p, cplx lambda, double contrast) {
    const double floor_q = std::max(1.0, 1.1 * root_bound(p, lambda));
    double acc = 0.0, q = 0.0;
    const double dq = 1e-3;
    double prev = pi_of(p, lambda, 0.0).real();
    while (acc < contrast || q < floor_q) {
        const double cur = pi_of(p, lambda, q + dq).real();
        acc += 0.5 * (prev + cur) * dq;
        prev = cur;
        q += dq;
        if (q > 1e4) throw std::runtime_error("start_point: contrast not reached");
    }
    // large coefficients need a longer lever before the series settles
    for (int i = 0; i < 12; ++i, q *= 1.25) {
        try {
            if (start_data(p, lambda, q).truncation < 1e-12) return q;
        } catch (const std::runtime_error&) {
        }
    }
    return q;
}

std::pair<cplx, cplx> recessive_solution(const Potential& p, cplx lambda, double q, IntegrationOptions opt) {
    const double qs = std::max(start_point(p, lambda, opt.contrast), q + 0.5);
    const auto sd = start_data(p, lambda, qs);
    state y{1.0, 0.0, sd.ratio.real(), sd.ratio.imag()};
    propagate(p, lambda, y, qs, q, opt.rtol);
    const cplx scale = std::exp(sd.log_psi);
    return {scale * cplx(y[0], y[1]), scale * cplx(y[2], y[3])};
}

OracleResult shoot_complex(const Potential& p, Sector sector, cplx seed, IntegrationOptions opt) {
    if (sector == Sector::full) throw std::invalid_argument("shoot_complex works per sector");
    auto solve = [&](double contrast, cplx e0) {
        const double qs = start_point(p, -e0, contrast);
        auto f = [&](cplx e) {
            const cplx lambda = -e;
            const cplx ratio = start_data(p, lambda, qs).ratio;
            state y{1.0, 0.0, ratio.real(), ratio.imag()};
            propagate(p, lambda, y, qs, 0.0, opt.rtol);
            return sector == Sector::dirichlet ? cplx(y[0], y[1]) : cplx(y[2], y[3]);
        };
        cplx e = e0;
        for (int it = 0; it < 50; ++it) {
            const double h = 1e-6 * std::max(1.0, std::abs(e));
            const cplx fe = f(e);
            const cplx d = (f(e + h) - f(e - h)) / (2.0 * h);
            const cplx step = fe / d;
            e -= step;
            if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(e))) return e;
        }
        throw std::runtime_error("shoot_complex: Newton did not converge");
    };
    const cplx e1 = solve(opt.contrast, seed);
    const cplx e2 = solve(2.0 * opt.contrast, e1);
    const double err = std::abs(e2 - e1);
    if (err > 1e-7 * std::max(1.0, std::abs(e2)))
        throw std::runtime_error("shoot_complex: q_start insufficient (doubling moved the root by " +
                                 std::to_string(err) + ")");
    OracleResult r;
    r.values = {e2};
    r.method = "shooting";
    r.resolution = "contrast " + std::to_string(2.0 * opt.contrast);
    r.error_estimate = err;
    return r;
}

OracleResult integrate_wave(const Potential& p, double energy, const std::vector<double>& grid,
                            IntegrationOptions opt) {
    if (!p.is_real()) throw std::invalid_argument("integrate_wave needs a real potential");
    OracleResult r;
    r.method = "integration";
    if (grid.empty()) return r;
    const cplx lambda = -energy;
    auto run = [&](double contrast, double rtol, std::vector<cplx>& psi, std::vector<cplx>& dpsi) {
        const double top = *std::max_element(grid.begin(), grid.end());
        const double qs = std::max(start_point(p, lambda, contrast), top + 0.5);
        const auto sd = start_data(p, lambda, qs);
        state y{1.0, 0.0, sd.ratio.real(), sd.ratio.imag()};
        std::vector<std::size_t> order(grid.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] > grid[b]; });
        psi.assign(grid.size(), 0.0);
        dpsi.assign(grid.size(), 0.0);
        double q = qs;
        const cplx scale = std::exp(sd.log_psi);
        for (auto i : order) {
            propagate(p, lambda, y, q, grid[i], rtol);
            q = grid[i];
            psi[i] = scale * cplx(y[0], y[1]);
            dpsi[i] = scale * cplx(y[2], y[3]);
        }
    };
    std::vector<cplx> ref, dref;
    run(2.0 * opt.contrast, opt.rtol / 10, ref, dref);
    run(opt.contrast, opt.rtol, r.values, r.derivatives);
    for (std::size_t i = 0; i < grid.size(); ++i)
        r.error_estimate = std::max(r.error_estimate, std::abs(r.values[i] - ref[i]) / std::abs(ref[i]));
    r.resolution = "contrast " + std::to_string(opt.contrast) + ", rtol " + std::to_string(opt.rtol);
    return r;
}

cplx fit_scale(const std::vector<cplx>& reference, const std::vector<cplx>& values) {
    if (reference.size() != values.size() || reference.empty())
        throw std::invalid_argument("fit_scale: size mismatch");
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += std::conj(reference[i]) * values[i];
        den += std::norm(reference[i]);
    }
    return num / den;
}

}  // namespace cq
