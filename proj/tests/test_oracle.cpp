#include <doctest.h>

#include <chainquant/oracle.hpp>
#include <chainquant/quantizer.hpp>

#include <random>

using namespace cq;

TEST_SUITE("oracle") {

TEST_CASE("quartic ground state by diagonalization") {
    const auto r = diagonalize(Potential(4), Sector::neumann, 1);
    CHECK(r.method == "diagonalization");
    CHECK(std::abs(r.values[0] - 1.06036209) < 1e-7);
    CHECK(r.error_estimate < 1e-8);
}

TEST_CASE("harmonic oscillator is exact") {
    const auto n = diagonalize(Potential(2), Sector::neumann, 2);
    const auto d = diagonalize(Potential(2), Sector::dirichlet, 2);
    CHECK(std::abs(n.values[0] - 1.0) < 1e-10);
    CHECK(std::abs(n.values[1] - 5.0) < 1e-10);
    CHECK(std::abs(d.values[0] - 3.0) < 1e-10);
    CHECK(std::abs(d.values[1] - 7.0) < 1e-10);
    for (int k : {0, 1, 2, 3}) {
        const Sector s = k % 2 ? Sector::dirichlet : Sector::neumann;
        CHECK(std::abs(shoot_complex(Potential(2), s, 2.0 * k + 1.2).values[0] - (2.0 * k + 1.0)) < 1e-9);
    }
}

TEST_CASE("diagonalization rejects what it cannot do") {
    CHECK_THROWS_AS(diagonalize(Potential(4, {0.0, 1.0, 1.0}), Sector::neumann, 3), std::invalid_argument);
    CHECK_THROWS_AS(diagonalize(rotate(Potential(4, {0.0, 1.0, 0.0}), 1), Sector::neumann, 3), std::invalid_argument);
}

TEST_CASE("diagonalization and shooting agree") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 3; ++trial) {
        const Potential p(4, {0.0, u(rng), 0.0});
        for (Sector s : {Sector::neumann, Sector::dirichlet}) {
            const auto d = diagonalize(p, s, 3);
            for (const cplx e : d.values) CHECK(std::abs(shoot_complex(p, s, e + 0.01).values[0] - e) < 1e-7);
        }
    }
}

TEST_CASE("shooting confirms a complex chain") {
    const Potential p(4, {0.0, 1.0, 0.0});
    IterationConfig cfg;
    const auto r = run_scheme(make_system(p, Sector::neumann, cfg), cfg);
    REQUIRE(r.report.converged());
    const cplx e = r.system.chains[1].levels[0];
    const auto s = shoot_complex(rotate(p, 1), Sector::neumann, e);
    CHECK(std::abs(s.values[0] - e) < 1e-3);
    CHECK(s.error_estimate < 1e-8);
}

TEST_CASE("absolutely normalized integration") {
    const double e0 = diagonalize(Potential(4), Sector::neumann, 1).values[0].real();
    const std::vector<double> grid{0.0, 0.5, 1.0, 1.5};
    const auto w = integrate_wave(Potential(4), e0, grid);
    REQUIRE(w.values.size() == 4);
    CHECK(w.values[0].real() > 0.0);
    CHECK(std::abs(w.derivatives[0]) < 1e-8);  // Neumann eigenfunction
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(w.values[i].real() < w.values[i - 1].real());

    IntegrationOptions fine;
    fine.rtol = 5e-13;
    const auto w2 = integrate_wave(Potential(4), e0, grid, fine);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(w.values[i] - w2.values[i]) < 1e-9);
    CHECK(w.error_estimate < 1e-9);

    // the start point is irrelevant once contrast is large
    for (double c : {15.0, 30.0, 45.0}) {
        IntegrationOptions o;
        o.contrast = c;
        CHECK(std::abs(recessive_solution(Potential(4), -e0, 0.0, o).first - w.values[0]) < 1e-10);
    }
    CHECK(integrate_wave(Potential(4), e0, {}).values.empty());
}

TEST_CASE("recessive solution is the Dirichlet determinant") {
    IterationConfig cfg;
    cfg.k_max = 192;
    cfg.k_eval = 1024;
    const auto d = run_scheme(make_system(Potential(4), Sector::dirichlet, cfg), cfg);
    REQUIRE(d.report.converged());
    for (cplx lam : {cplx(0.7, 0.0), cplx(-0.4, 1.1), cplx(1.5, -2.0)}) {
        const cplx psi = recessive_solution(Potential(4), lam, 0.0).first;
        const cplx det = log_det(d.system.chains[0], lam).value();
        // the chain lacks the next quantum tail term, an error falling like 1/k_max
        CHECK(std::abs(psi - det) / std::abs(det) < 2e-4);
    }
}

TEST_CASE("scale fit") {
    const std::vector<cplx> ref{1.0, 2.0, cplx(0.0, 1.0)};
    std::vector<cplx> val;
    for (auto z : ref) val.push_back(cplx(2.0, -1.0) * z);
    CHECK(std::abs(fit_scale(ref, val) - cplx(2.0, -1.0)) < 1e-15);
    CHECK_THROWS(fit_scale(ref, {1.0}));
}

}  // TEST_SUITE
