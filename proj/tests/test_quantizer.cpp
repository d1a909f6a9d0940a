#include <doctest.h>

#include <chainquant/quantizer.hpp>

#include <cmath>

using namespace cq;

namespace {

const SchemeResult& homogeneous() {
    static const SchemeResult r = [] {
        IterationConfig cfg;
        return run_scheme(make_system(Potential(4), Sector::neumann, cfg), cfg);
    }();
    return r;
}

}  // namespace

TEST_SUITE("quantizer") {

TEST_CASE("homogeneous quartic converges geometrically to the ground state") {
    const auto& r = homogeneous();
    REQUIRE(r.report.converged());
    CHECK(r.report.ratio < 0.5);
    CHECK(r.report.ratio_reliable);
    CHECK(std::abs(r.system.chains[0].levels[0] - 1.06036209) < 1e-5);
}

TEST_CASE("first update moves the ground state toward the exact value") {
    IterationConfig cfg;
    const auto seed = make_system(Potential(4), Sector::neumann, cfg);
    const Chain c = solve_chain(seed, 0, cfg);
    CHECK(std::abs(c.levels[0] - 1.06036209) < std::abs(seed.chains[0].levels[0] - 1.06036209));
}

TEST_CASE("symmetries of the converged system") {
    const auto& s = homogeneous().system;
    for (std::size_t i = 0; i < s.chains[1].levels.size(); ++i) {
        CHECK(s.chains[2].levels[i] == std::conj(s.chains[1].levels[i]));
        CHECK(std::abs(s.chains[0].levels[i].imag()) < 1e-10);
        CHECK(std::abs(s.chains[1].levels[i] - s.chains[0].levels[i]) < 1e-8 * std::abs(s.chains[0].levels[i]));
    }
}

TEST_CASE("fixed point") {
    IterationConfig cfg;
    const auto& s = homogeneous().system;
    CHECK(fixed_point_residual(s, cfg) < 10.0 * cfg.newton_tol * s.ground_scale());
    const Chain again = solve_chain(s, 0, cfg);
    for (std::size_t i = 0; i < again.levels.size(); ++i)
        CHECK(std::abs(again.levels[i] - s.chains[0].levels[i]) < 1e-9 * std::abs(s.chains[0].levels[i]));
}

TEST_CASE("contraction estimate") {
    std::vector<double> h;
    for (int n = 0; n < 12; ++n) h.push_back(3.0 * std::pow(0.5, n));
    const auto e = estimate_contraction(h);
    CHECK(std::abs(e.ratio - 0.5) < 1e-12);
    CHECK(e.reliable);
    const auto noisy = estimate_contraction({1.0, 0.01, 1.0, 0.02, 0.9, 0.05});
    CHECK_FALSE(noisy.reliable);
    CHECK_THROWS(estimate_contraction({1.0, 0.5, 0.25}));
}

TEST_CASE("spectral radius of a linear map") {
    auto map = [](const std::vector<double>& x) {
        return std::vector<double>{0.5 * x[0] + 0.2 * x[1], -0.3 * x[0] + 0.1 * x[1] + 0.05 * x[2], 0.7 * x[2]};
    };
    // eigenvalues: 0.7 and the roots of z^2 - 0.6 z + 0.11
    CHECK(spectral_radius_of_map(map, {1.0, 2.0, 3.0}, 1e-6) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("linearized dynamics") {
    IterationConfig cfg;
    cfg.k_max = 24;
    const auto s = run_scheme(make_system(Potential(4), Sector::neumann, cfg), cfg).system;
    CHECK(linearized_radius(s, cfg) < 0.6);

    // synchronous updating without the conjugation constraint has nearly marginal modes
    IterationConfig sync = cfg;
    sync.scheme = Scheme::custom;
    sync.order = {0, 1, 2};
    sync.updating = Updating::synchronous;
    sync.enforce_symmetry = false;
    auto free = make_system(Potential(4), Sector::neumann, sync);
    for (int l = 0; l < 3; ++l) free.chains[l].levels = s.chains[l].levels;
    const double rho = linearized_radius(free, sync);
    CHECK(rho > 0.8);
    CHECK(rho < 1.0);
}

TEST_CASE("scheme B stays uniformly stable as v2 grows") {
    IterationConfig cfg;
    cfg.scheme = Scheme::B;
    cfg.k_max = 16;
    std::vector<double> radii;
    for (double v2 : {0.0, 2.0, 4.0}) {
        const auto r = run_scheme(make_system(Potential(4, {0.0, v2, 0.0}), Sector::dirichlet, cfg), cfg);
        REQUIRE(r.report.converged());
        radii.push_back(linearized_radius(r.system, cfg));
    }
    for (double rho : radii) CHECK(rho < 0.8);
    CHECK(std::abs(radii[2] - radii[0]) < 0.3);
}

TEST_CASE("synchronous updating reaches the same fixed point") {
    IterationConfig cfg;
    cfg.updating = Updating::synchronous;
    cfg.max_cycles = 120;
    const auto r = run_scheme(make_system(Potential(4), Sector::neumann, cfg), cfg);
    REQUIRE(r.report.converged());
    CHECK(std::abs(r.system.chains[0].levels[0] - homogeneous().system.chains[0].levels[0]) < 1e-8);
}

TEST_CASE("parallel solves are deterministic") {
    IterationConfig cfg;
    cfg.jobs = 4;
    const auto r = run_scheme(make_system(Potential(4), Sector::neumann, cfg), cfg);
    CHECK(r.system.chains[0].levels == homogeneous().system.chains[0].levels);
}

TEST_CASE("configuration errors") {
    IterationConfig cfg;
    CHECK_THROWS(make_system(Potential(2), Sector::neumann, cfg));
    cfg.scheme = Scheme::C;
    CHECK_THROWS(scheme_order(make_system(Potential(4), Sector::neumann, cfg), cfg));
    cfg.scheme = Scheme::A;
    CHECK_THROWS(scheme_order(make_system(Potential(4, {0.0, 1.0, 1.0}), Sector::neumann, cfg), cfg));
    CHECK(scheme_order(make_system(Potential(4, {0.0, 1.0, 1.0}), Sector::neumann, IterationConfig{Scheme::C}),
                       IterationConfig{Scheme::C}) == std::vector<int>{0, 2, 3, 1});
    cfg.scheme = Scheme::custom;
    cfg.order = {0};
    CHECK_THROWS(scheme_order(make_system(Potential(4), Sector::neumann, cfg), cfg));
    CHECK(parse_scheme("b") == Scheme::B);
    CHECK_THROWS(parse_scheme("D"));
}

TEST_CASE("a failed Newton solve is reported, not thrown") {
    IterationConfig cfg;
    cfg.max_cycles = 3;
    const auto r = run_scheme(make_system(Potential(4), Sector::neumann, cfg), cfg);
    CHECK(r.report.status == Status::max_cycles);
    CHECK(r.report.displacement.size() == 3);
}

}  // TEST_SUITE
