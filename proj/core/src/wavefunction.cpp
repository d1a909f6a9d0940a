#include "chainquant/wavefunction.hpp"

#include <cmath>

namespace cq {

namespace {

IterationConfig config_for(const Potential& shifted, IterationConfig cfg) {
    if (cfg.scheme == Scheme::custom) return cfg;
    if (shifted.group_order() == 6) cfg.scheme = Scheme::C;
    else if (cfg.scheme == Scheme::C) cfg.scheme = Scheme::A;
    return cfg;
}

struct Solved {
    ChainSystem system;
    ConvergenceReport report;
};

Solved solve(const Potential& shifted, Sector sector, const IterationConfig& cfg, const ChainSystem* warm) {
    ChainSystem sys = make_system(shifted, sector, cfg);
    if (warm && warm->group_order == sys.group_order && warm->k_max == sys.k_max)
        for (std::size_t i = 0; i < sys.chains.size(); ++i) sys.chains[i].levels = warm->chains[i].levels;
    auto res = run_scheme(std::move(sys), cfg);
    return {std::move(res.system), std::move(res.report)};
}

struct Point {
    WaveSample sample;
    std::optional<ChainSystem> dirichlet;
};

Point wave_point(const Potential& p, double energy, double a, const IterationConfig& config, WaveOptions opt,
                 const ChainSystem* warm) {
    const Potential va = shift(p, a);
    const IterationConfig cfg = config_for(va, config);
    Point pt;
    WaveSample& s = pt.sample;
    s.a = a;
    s.lambda = p(a) - energy;
    s.warm_started = warm && warm->group_order == va.group_order();
    auto d = solve(va, Sector::dirichlet, cfg, s.warm_started ? warm : nullptr);
    if (s.warm_started && !d.report.converged()) {
        // seeds from the previous point can sit on the wrong side of a neighbour; retry cold
        s.warm_started = false;
        d = solve(va, Sector::dirichlet, cfg, nullptr);
    }
    s.status = d.report.status;
    s.converged = d.report.converged();
    s.contraction_ratio = d.report.ratio;
    s.cycles = static_cast<int>(d.report.displacement.size());
    try {
        s.psi = log_det(d.system.chain(0), s.lambda).value();
    } catch (const std::exception&) {
        s.psi = cplx(std::nan(""), std::nan(""));
        s.converged = false;
    }
    if (opt.derivative) {
        auto n = solve(va, Sector::neumann, cfg, nullptr);
        if (!n.report.converged()) s.converged = false;
        try {
            s.psi_prime = -log_det(n.system.chain(0), s.lambda).value();
        } catch (const std::exception&) {
            s.psi_prime = cplx(std::nan(""), std::nan(""));
        }
    }
    if (d.report.converged()) pt.dirichlet = std::move(d.system);
    return pt;
}

}  // namespace

WaveSample wave_at(const Potential& p, double energy, double a, const IterationConfig& config, WaveOptions opt) {
    if (!p.is_real()) throw std::invalid_argument("wave_at: potential must be real");
    return wave_point(p, energy, a, config, opt, nullptr).sample;
}

std::vector<WaveSample> wave_profile(const Potential& p, double energy, const std::vector<double>& grid,
                                     const IterationConfig& config, WaveOptions opt) {
    if (!p.is_real()) throw std::invalid_argument("wave_profile: potential must be real");
    std::vector<WaveSample> out;
    std::optional<ChainSystem> last;
    for (double a : grid) {
        Point pt;
        try {
            pt = wave_point(p, energy, a, config, opt, opt.warm_start && last ? &*last : nullptr);
        } catch (const std::exception&) {
            pt.sample.a = a;
            pt.sample.lambda = p(a) - energy;
            pt.sample.psi = cplx(std::nan(""), std::nan(""));
            pt.sample.status = Status::newton_failure;
        }
        // a diverged run is a poor seed for the next point
        if (pt.dirichlet) last = std::move(pt.dirichlet);
        out.push_back(pt.sample);
    }
    return out;
}

}  // namespace cq
