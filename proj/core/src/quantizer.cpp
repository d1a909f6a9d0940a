#include "chainquant/quantizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace cq {

std::string to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::max_cycles: return "max_cycles";
        case Status::diverging: return "diverging";
        case Status::newton_failure: return "newton_failure";
    }
    return "unknown";
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::A: return "A";
        case Scheme::B: return "B";
        case Scheme::C: return "C";
        case Scheme::custom: return "custom";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& s) {
    if (s == "A" || s == "a") return Scheme::A;
    if (s == "B" || s == "b") return Scheme::B;
    if (s == "C" || s == "c") return Scheme::C;
    if (s == "custom") return Scheme::custom;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

ChainSystem make_system(const Potential& p, Sector sector, const IterationConfig& config) {
    if (p.degree() < 3) throw std::invalid_argument("quantization needs N >= 3 (N = 2 is singular)");
    if (sector == Sector::full) throw std::invalid_argument("chain systems are per sector");
    if (config.k_max < 0) throw std::invalid_argument("k_max must be >= 0");

    ChainSystem sys;
    sys.potential = p;
    sys.sector = sector;
    sys.group_order = p.group_order();
    sys.k_max = config.k_max;
    sys.k_eval = config.k_eval;
    sys.beta_m1 = beta_m1(p);
    const int L = sys.group_order;
    const bool real = p.is_real() && config.enforce_symmetry;
    sys.partner.assign(L, -1);
    if (real)
        for (int l = 0; l < L; ++l) sys.partner[l] = (L - l) % L;

    for (int l = 0; l < L; ++l) {
        const auto tail = bs_coeffs(rotate(p, l));
        auto model = make_tail_model(tail, sector, config.k_max, config.k_eval);
        auto levels = semiclassical_chain(tail, sector, config.k_max);
        if (real && sys.partner[l] == l) {
            // a real chain may start from a complex semiclassical root at low k
            for (auto& e : levels) e = std::abs(e.imag()) > 1e-12 * std::abs(e) ? cplx(std::abs(e)) : cplx(e.real());
        }
        sys.chains.push_back(make_chain(l, sector, std::move(levels), std::move(model)));
    }
    if (real)
        for (int l = 0; l < L; ++l)
            if (sys.partner[l] > l)
                for (std::size_t i = 0; i < sys.chains[l].levels.size(); ++i)
                    sys.chains[sys.partner[l]].levels[i] = std::conj(sys.chains[l].levels[i]);
    return sys;
}

std::vector<int> scheme_order(const ChainSystem& system, const IterationConfig& config) {
    const int L = system.group_order;
    // the named schemes update one chain of each conjugate pair
    const bool real = system.potential.is_real() && system.partner[system.wrap(1)] >= 0;
    switch (config.scheme) {
        case Scheme::A:
        case Scheme::B:
            if (L != 3) throw std::invalid_argument("schemes A and B need L = 3");
            if (!real) throw std::invalid_argument("schemes A and B need a real potential with conjugate pairing");
            return {0, 1};
        case Scheme::C:
            if (L != 6) throw std::invalid_argument("scheme C needs L = 6");
            if (!real) throw std::invalid_argument("scheme C needs a real potential with conjugate pairing");
            return {0, 2, 3, 1};
        case Scheme::custom: {
            if (config.order.empty()) throw std::invalid_argument("custom scheme needs an order");
            std::vector<bool> covered(L, false);
            for (int l : config.order) {
                if (l < 0 || l >= L) throw std::invalid_argument("chain index out of range in order");
                covered[l] = true;
                if (system.partner[l] >= 0) covered[system.partner[l]] = true;
            }
            if (std::find(covered.begin(), covered.end(), false) != covered.end())
                throw std::invalid_argument("custom order leaves chains without an update rule");
            return config.order;
        }
    }
    return {};
}

namespace {

bool uses_mirror(const ChainSystem& sys, const IterationConfig& cfg, int ell) {
    const bool on = cfg.scheme == Scheme::B || (cfg.scheme == Scheme::custom && cfg.mirror_pairs);
    if (!on) return false;
    const int p = sys.partner[sys.wrap(ell)];
    if (p < 0 || p == sys.wrap(ell)) return false;
    return p == sys.wrap(ell + 1) || p == sys.wrap(ell - 1);
}

constexpr double inf = std::numeric_limits<double>::infinity();

// residual magnitude, infinite where the determinant cannot be evaluated
template <class F>
auto guarded(F&& f, cplx e) -> cplx {
    try {
        return f(e);
    } catch (const DeterminantZero&) {
        return {inf, inf};
    } catch (const TailDivergence&) {
        return {inf, inf};
    }
}

cplx newton_real(const std::function<double(double)>& f, double x, double tol, int ell, int k) {
    double fx = f(x);
    for (int it = 0; it < 60; ++it) {
        const double h = 1e-6 * std::max(std::abs(x), 1.0);
        const double d = (f(x + h) - f(x - h)) / (2 * h);
        if (!std::isfinite(d) || d == 0.0 || !std::isfinite(fx))
            throw NewtonError("chain " + std::to_string(ell) + " level k=" + std::to_string(k) + ": bad derivative", k, x);
        const double dx = fx / d;
        double t = 1.0;
        double xn = x - dx, fn = f(xn);
        for (int hv = 0; hv < 6 && !(std::abs(fn) < std::abs(fx)); ++hv) {
            t *= 0.5;
            xn = x - t * dx;
            fn = f(xn);
        }
        x = xn;
        fx = fn;
        if (std::abs(t * dx) < tol * std::max(std::abs(x), 1e-300)) return x;
    }
    throw NewtonError("chain " + std::to_string(ell) + " level k=" + std::to_string(k) + " did not converge", k, x);
}

cplx newton_complex(const std::function<cplx(cplx)>& f, cplx z, double tol, double sign_side, cplx rot, int ell,
                    int k) {
    auto side_ok = [&](cplx w) { return sign_side == 0.0 || (rot * w).imag() * sign_side > 0.0; };
    cplx fz = f(z);
    for (int it = 0; it < 60; ++it) {
        const double h = 1e-6 * std::max(std::abs(z), 1.0);
        const cplx fx = (f(z + h) - f(z - h)) / (2 * h);
        const cplx fy = (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h);
        Eigen::Matrix2d jac;
        jac << fx.real(), fy.real(), fx.imag(), fy.imag();
        const double det = jac.determinant();
        if (!std::isfinite(det) || det == 0.0)
            throw NewtonError("chain " + std::to_string(ell) + " level k=" + std::to_string(k) + ": singular Jacobian", k, z);
        const Eigen::Vector2d d = jac.inverse() * Eigen::Vector2d(fz.real(), fz.imag());
        const cplx dz(d[0], d[1]);
        double t = 1.0;
        bool accepted = false;
        cplx zn, fn;
        double t_acc = t;
        for (int hv = 0; hv <= 6; ++hv) {
            const cplx trial = z - t * dz;
            if (side_ok(trial)) {
                zn = trial;
                fn = f(trial);
                t_acc = t;
                accepted = true;
                if (std::abs(fn) < std::abs(fz)) break;
            }
            t *= 0.5;
        }
        t = t_acc;
        if (!accepted)
            throw NewtonError("chain " + std::to_string(ell) + " level k=" + std::to_string(k) +
                                  ": every damped step crosses the conjugate mirror",
                              k, z);
        z = zn;
        fz = fn;
        if (std::abs(t * dz) < tol * std::abs(z)) return z;
    }
    throw NewtonError("chain " + std::to_string(ell) + " level k=" + std::to_string(k) + " did not converge", k, z);
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mtx;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mtx);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct Solved {
    Chain chain;
    std::vector<std::string> flags;
};

Solved solve_chain_impl(const ChainSystem& sys, int ell, const IterationConfig& cfg) {
    const int l = sys.wrap(ell);
    const Chain& cur = sys.chains[l];
    const auto ks = cur.indices();
    const bool real = sys.is_real_chain(l);
    const bool mirror = uses_mirror(sys, cfg, l);
    const cplx rot = std::polar(1.0, l * sys.phi());
    Chain out = cur;

    parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) {
        const int k = ks[i];
        const cplx rhs = quantization_rhs(sys, l, k);
        if (real) {
            auto f = [&](double x) {
                const cplx r = guarded([&](cplx e) { return sigma(sys, l, e) - rhs; }, cplx(x));
                return r.real();
            };
            out.levels[i] = newton_real(f, cur.levels[i].real(), cfg.newton_tol, l, k);
        } else {
            auto f = [&](cplx e) {
                return guarded(
                    [&](cplx z) {
                        if (mirror) return sigma(sys, l, z, LevelOverride{sys.partner[l], i, std::conj(z)}) - rhs;
                        return sigma(sys, l, z) - rhs;
                    },
                    e);
            };
            // the side is set by the large-k tail; low seeds from the
            // semiclassics can sit across the mirror and get reflected back
            const double side = (rot * bs_level(cur.tail->tail, ks.back())).imag();
            const double sgn = !mirror ? 0.0 : (side > 0 ? 1.0 : (side < 0 ? -1.0 : 0.0));
            cplx z = cur.levels[i];
            if (sgn != 0.0 && (rot * z).imag() * sgn <= 0.0) {
                const cplx w = rot * z;
                z = cplx(w.real(), sgn * std::max(std::abs(w.imag()), 1e-3 * std::abs(w))) / rot;
            }
            out.levels[i] = newton_complex(f, z, cfg.newton_tol, sgn, rot, l, k);
        }
    });

    Solved res{std::move(out), {}};
    const double scale = sys.ground_scale();
    auto& lv = res.chain.levels;
    for (std::size_t j = 1; j < lv.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (std::abs(lv[i] - lv[j]) < 1e-8 * scale) {
                lv[j] = bs_level(cur.tail->tail, ks[j]);
                if (real) lv[j] = std::abs(lv[j].imag()) > 1e-12 * std::abs(lv[j]) ? cplx(std::abs(lv[j])) : cplx(lv[j].real());
                res.flags.push_back("cycle " + std::to_string(sys.cycle) + ": chain " + std::to_string(l) + " k=" +
                                    std::to_string(ks[j]) + " collided with k=" + std::to_string(ks[i]) +
                                    ", reseeded");
                break;
            }
    return res;
}

void set_chain(ChainSystem& sys, int l, const std::vector<cplx>& levels) {
    sys.chains[l].levels = levels;
    const int p = sys.partner[l];
    if (p >= 0 && p != l)
        for (std::size_t i = 0; i < levels.size(); ++i) sys.chains[p].levels[i] = std::conj(levels[i]);
}

ChainSystem cycle_impl(const ChainSystem& sys, const IterationConfig& cfg, std::vector<std::string>* flags) {
    const auto order = scheme_order(sys, cfg);
    ChainSystem next = sys;
    if (cfg.updating == Updating::immediate) {
        for (int l : order) {
            auto s = solve_chain_impl(next, l, cfg);
            set_chain(next, l, s.chain.levels);
            if (flags) flags->insert(flags->end(), s.flags.begin(), s.flags.end());
        }
    } else {
        std::vector<Solved> solved;
        for (int l : order) solved.push_back(solve_chain_impl(sys, l, cfg));
        for (std::size_t j = 0; j < order.size(); ++j) {
            set_chain(next, order[j], solved[j].chain.levels);
            if (flags) flags->insert(flags->end(), solved[j].flags.begin(), solved[j].flags.end());
        }
    }
    next.cycle = sys.cycle + 1;
    return next;
}

}  // namespace

Chain solve_chain(const ChainSystem& system, int ell, const IterationConfig& config) {
    return solve_chain_impl(system, ell, config).chain;
}

ChainSystem iterate_once(const ChainSystem& system, const IterationConfig& config) {
    return cycle_impl(system, config, nullptr);
}

SchemeResult run_scheme(ChainSystem system, const IterationConfig& config) {
    ConvergenceReport rep;
    scheme_order(system, config);  // validates the scheme against L before any work
    const double scale = system.ground_scale();
    for (int c = 0; c < config.max_cycles; ++c) {
        ChainSystem next;
        try {
            next = cycle_impl(system, config, &rep.flags);
        } catch (const NewtonError& e) {
            rep.status = Status::newton_failure;
            rep.message = "cycle " + std::to_string(system.cycle) + ": " + e.what();
            break;
        }
        double d = 0.0;
        for (std::size_t l = 0; l < next.chains.size(); ++l)
            for (std::size_t i = 0; i < next.chains[l].levels.size(); ++i)
                d = std::max(d, std::abs(next.chains[l].levels[i] - system.chains[l].levels[i]));
        system = std::move(next);
        rep.displacement.push_back(d);
        if (!std::isfinite(d) || d > 1e6 * scale) {
            rep.status = Status::diverging;
            rep.message = "displacement blew up at cycle " + std::to_string(system.cycle);
            break;
        }
        if (d < config.newton_tol * scale) {
            rep.status = Status::converged;
            break;
        }
    }
    if (rep.status == Status::max_cycles && rep.message.empty())
        rep.message = "no convergence within " + std::to_string(config.max_cycles) + " cycles";
    if (rep.displacement.size() >= 4) {
        const auto est = estimate_contraction(rep.displacement);
        rep.ratio = est.ratio;
        rep.ratio_reliable = est.reliable;
    }
    return {std::move(system), std::move(rep)};
}

ContractionEstimate estimate_contraction(const std::vector<double>& history) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (history[i] > 0 && std::isfinite(history[i])) {
            xs.push_back(static_cast<double>(i));
            ys.push_back(std::log(history[i]));
        }
    if (xs.size() < 4) throw std::invalid_argument("estimate_contraction needs at least 4 cycles");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    ContractionEstimate est;
    est.ratio = std::exp(slope);
    int rises = 0;
    for (std::size_t i = 1; i < history.size(); ++i) rises += history[i] > history[i - 1];
    const double corr = syy > 0 ? std::abs(sxy) / std::sqrt(sxx * syy) : 1.0;
    est.reliable = corr > 0.9 && rises <= static_cast<int>(history.size()) / 4;
    return est;
}

double spectral_radius_of_map(const std::function<std::vector<double>(const std::vector<double>&)>& map,
                              const std::vector<double>& x0, double h) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        auto xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        const auto fp = map(xp), fm = map(xm);
        for (Eigen::Index i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2 * h);
    }
    if (!jac.allFinite()) throw std::runtime_error("Jacobian has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> es(jac, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed on the Jacobian");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double linearized_radius(const ChainSystem& system, const IterationConfig& config) {
    const auto order = scheme_order(system, config);
    auto pack = [&](const ChainSystem& s) {
        std::vector<double> x;
        for (int l : order)
            for (const cplx e : s.chains[l].levels) {
                x.push_back(e.real());
                if (!s.is_real_chain(l)) x.push_back(e.imag());
            }
        return x;
    };
    auto unpack = [&](const std::vector<double>& x) {
        ChainSystem s = system;
        std::size_t p = 0;
        for (int l : order) {
            std::vector<cplx> lv(s.chains[l].levels.size());
            for (auto& e : lv) {
                const double re = x[p++];
                e = s.is_real_chain(l) ? cplx(re) : cplx(re, x[p++]);
            }
            set_chain(s, l, lv);
        }
        return s;
    };
    auto map = [&](const std::vector<double>& x) {
        try {
            return pack(iterate_once(unpack(x), config));
        } catch (const NewtonError& e) {
            throw std::runtime_error(std::string("linearization failed: ") + e.what());
        }
    };
    return spectral_radius_of_map(map, pack(system), 1e-6 * system.ground_scale());
}

double fixed_point_residual(const ChainSystem& system, const IterationConfig& config) {
    double worst = 0.0;
    for (int l : scheme_order(system, config)) {
        const auto ks = system.chains[l].indices();
        const bool mirror = uses_mirror(system, config, l);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const cplx e = system.chains[l].levels[i];
            const cplx s = mirror ? sigma(system, l, e, LevelOverride{system.partner[l], i, std::conj(e)})
                                  : sigma(system, l, e);
            const cplx r = s - quantization_rhs(system, l, ks[i]);
            worst = std::max(worst, system.is_real_chain(l) ? std::abs(r.real()) : std::abs(r));
        }
    }
    return worst;
}

}  // namespace cq
