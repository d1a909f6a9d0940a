#include <doctest.h>

#include <chainquant/io.hpp>

using namespace cq;

TEST_SUITE("io") {

TEST_CASE("potential round trip") {
    const Potential p(5, {cplx(0.1, -0.2), 1.0 / 3.0, 0.0, cplx(0.0, 7.0)});
    CHECK(potential_from_json(potential_to_json(p)) == p);
    CHECK(potential_to_json(Potential(3)) == R"({"coeffs":[[0.0,0.0],[0.0,0.0]],"degree":3})");
}

TEST_CASE("tail round trip") {
    const auto t = bs_coeffs(Potential(4, {0.3, 0.0, -1.0}));
    const auto back = tail_from_json(tail_to_json(t));
    REQUIRE(back.depth() == t.depth());
    for (int i = 0; i < t.depth(); ++i) {
        CHECK(back.entries[i].nu == t.entries[i].nu);
        CHECK(back.entries[i].b == t.entries[i].b);
    }
}

TEST_CASE("snapshot round trip keeps every bit") {
    IterationConfig cfg;
    cfg.k_max = 12;
    auto sys = make_system(Potential(4, {0.0, 1.0, 0.0}), Sector::dirichlet, cfg);
    sys = iterate_once(sys, cfg);
    const auto text = snapshot_to_json(sys);
    const auto back = snapshot_from_json(text);
    CHECK(back.cycle == 1);
    CHECK(back.sector == Sector::dirichlet);
    for (int l = 0; l < 3; ++l) CHECK(back.chains[l].levels == sys.chains[l].levels);
    CHECK(snapshot_to_json(back) == text);
}

TEST_CASE("snapshot with a foreign tail is refused") {
    IterationConfig cfg;
    cfg.k_max = 4;
    const auto sys = make_system(Potential(4), Sector::neumann, cfg);
    auto text = snapshot_to_json(sys);
    const auto other = snapshot_to_json(make_system(Potential(4, {0.0, 1.0, 0.0}), Sector::neumann, cfg));
    const auto swap_from = other.find("\"potential\"");
    const auto own_from = text.find("\"potential\"");
    // keep the tails, change the potential
    text.replace(own_from, text.find("\"sector\"") - own_from,
                 other.substr(swap_from, other.find("\"sector\"") - swap_from));
    CHECK_THROWS_WITH(snapshot_from_json(text), doctest::Contains("disagrees"));
}

TEST_CASE("csv writers") {
    ConvergenceReport r;
    r.displacement = {1.0, 0.5, 0.25, 0.125, 0.0625};
    const auto csv = convergence_csv(r);
    CHECK(csv.rfind("cycle,sup_displacement,ratio_estimate\n", 0) == 0);
    CHECK(csv.find("\n5,0.0625,0.") != std::string::npos);
    CHECK(csv.find("\n3,0.25,\n") != std::string::npos);

    WaveSample s;
    s.a = 0.5;
    s.psi = 0.25;
    s.contraction_ratio = 0.4;
    s.converged = true;
    CHECK(wave_csv({s}) == "a,re_psi,im_psi,ratio,converged\n0.5,0.25,0,0.40000000000000002,1\n");
    CHECK(parse_sector("dirichlet") == Sector::dirichlet);
    CHECK_THROWS(parse_sector("up"));
}

}  // TEST_SUITE
