#include <doctest.h>

#include <chainquant/potential.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <random>

using namespace cq;

namespace {

std::mt19937 rng(2024);

cplx rnd() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

Potential random_potential(int n) {
    std::vector<cplx> v(n - 1);
    for (auto& c : v) c = rnd();
    return Potential(n, v);
}

double max_diff(const Potential& a, const Potential& b) {
    double d = 0.0;
    for (int j = 1; j < a.degree(); ++j) d = std::max(d, std::abs(a.coeff(j) - b.coeff(j)));
    return d;
}

// integral over [0, inf) of (x^4 + 1 + v1 y x^3 + v2 y^2 x^2 + v3 y^3 x)^{-1/2}
cplx scaled_integral(const Potential& p, cplx y) {
    boost::math::quadrature::exp_sinh<double> quad;
    auto f = [&](double x, bool imag) {
        const cplx w = std::pow(x, 4) + 1.0 + p.coeff(1) * y * std::pow(x, 3) + p.coeff(2) * y * y * x * x +
                       p.coeff(3) * y * y * y * x;
        const cplx g = 1.0 / std::sqrt(w);
        return imag ? g.imag() : g.real();
    };
    const double re = quad.integrate([&](double x) { return f(x, false); }, 1e-14);
    const double im = quad.integrate([&](double x) { return f(x, true); }, 1e-14);
    return {re, im};
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("derived symmetry data") {
    const Potential q4(4);
    CHECK(q4.growth_order() == Rational(3, 4));
    CHECK(q4.symmetry_angle() == doctest::Approx(2.0 * pi / 3.0));
    CHECK(q4.group_order() == 3);
    CHECK(q4.is_even());
    const Potential odd(4, {0.0, 1.0, 1.0});
    CHECK(odd.group_order() == 6);
    CHECK_FALSE(odd.is_even());
    CHECK(Potential(6, {0.0, 2.0, 0.0, 1.0, 0.0}).group_order() == 4);
    CHECK(Potential(3).group_order() == 5);
}

TEST_CASE("rotate: identity, homogeneous fixed point, quartic coupling") {
    const Potential p = random_potential(4);
    CHECK(rotate(p, 0) == p);
    CHECK(max_diff(rotate(Potential(5), 3), Potential(5)) == 0.0);
    const Potential v2(4, {0.0, 1.5, 0.0});
    const Potential r = rotate(v2, 1);
    CHECK(std::abs(r.coeff(2) - std::polar(1.0, 2.0 * pi / 3.0) * 1.5) < 1e-14);
    CHECK(std::abs(r.coeff(1)) == 0.0);
}

TEST_CASE("rotate is a group action") {
    for (int n : {3, 4, 6}) {
        const Potential p = random_potential(n);
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b) CHECK(max_diff(rotate(p, a + b), rotate(rotate(p, a), b)) < 1e-14);
        // the literal coefficient map has period 2(N+2)
        CHECK(max_diff(rotate(p, 2 * (n + 2)), p) < 1e-13);
    }
    const Potential even(4, {0.0, rnd(), 0.0});
    CHECK(max_diff(rotate(even, even.group_order()), even) < 1e-14);
}

TEST_CASE("shift") {
    CHECK(shift(Potential(4), 0.0) == Potential(4));
    const double a = 0.7;
    const Potential s = shift(Potential(4), a);
    CHECK(s.coeff(1).real() == doctest::Approx(4 * a));
    CHECK(s.coeff(2).real() == doctest::Approx(6 * a * a));
    CHECK(s.coeff(3).real() == doctest::Approx(4 * a * a * a));
    const Potential v(5, {0.3, -1.0, 0.0, 2.0});
    const Potential va = shift(v, -1.3);
    for (double q : {-2.0, -0.4, 0.0, 0.9, 3.1}) CHECK(std::abs(va(q) - (v(q - 1.3) - v(-1.3))) < 1e-12);
    CHECK_THROWS_AS(shift(Potential(4, {cplx(0, 1), 0.0, 0.0}), 1.0), std::invalid_argument);
}

TEST_CASE("laurent head: structure and quartic/sextic residues") {
    const Potential p = random_potential(4);
    const auto h = laurent_head(p, cplx(0.3, -0.2));
    REQUIRE(!h.entries.empty());
    CHECK(h.entries.front().first == Rational(2));
    CHECK(std::abs(h.entries.front().second - 1.0) == 0.0);
    CHECK(h.entries.back().first == Rational(-1));
    for (std::size_t i = 1; i < h.entries.size(); ++i)
        CHECK(h.entries[i - 1].first - h.entries[i].first == Rational(1));
    CHECK_THROWS(h.beta(Rational(-2)));

    const cplx v1 = p.coeff(1), v2 = p.coeff(2), v3 = p.coeff(3);
    CHECK(std::abs(beta_m1(p) - (v3 / 2.0 - v1 * v2 / 4.0 + v1 * v1 * v1 / 16.0)) < 1e-14);

    const cplx s2 = rnd(), s4 = rnd();
    CHECK(std::abs(beta_m1(Potential(6, {0.0, s2, 0.0, s4, 0.0})) - (s4 / 2.0 - s2 * s2 / 8.0)) < 1e-14);
    CHECK(std::abs(beta_m1(random_potential(5))) == 0.0);
    CHECK(std::abs(beta_m1(random_potential(3))) == 0.0);
    for (int n : {3, 4, 5, 6, 8}) CHECK(std::abs(beta_m1(Potential(n))) == 0.0);
}

TEST_CASE("beta_-1 is independent of lambda") {
    const Potential p = random_potential(6);
    const cplx ref = beta_m1(p);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(laurent_head(p, 3.0 * rnd()).beta_m1() - ref) < 1e-14);
}

TEST_CASE("beta_-1 changes sign under each rotation") {
    for (int n : {4, 6}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Potential p = random_potential(n);
            for (int l = 0; l < 6; ++l)
                CHECK(std::abs(beta_m1(rotate(p, l)) - (l % 2 ? -1.0 : 1.0) * beta_m1(p)) < 1e-13);
        }
    }
}

TEST_CASE("even polynomials of degree 0 mod 4 have no residue") {
    for (int n : {4, 8}) {
        std::vector<cplx> v(n - 1, 0.0);
        for (int j = 2; j < n; j += 2) v[j - 1] = rnd().real();
        CHECK(std::abs(beta_m1(Potential(n, v))) < 1e-14);
    }
}

TEST_CASE("residue R") {
    CHECK(std::abs(residue_R(Potential(4))) == 0.0);
    CHECK(std::abs(residue_R(Potential(4, {0.0, 0.0, 1.0})) - 0.125) < 1e-15);
    CHECK_THROWS(residue_R(Potential(2)));
}

TEST_CASE("residue R from the large-lambda expansion of the Pi^{-1} integral") {
    // int_0^inf (V+lambda)^{-1/2} dq = lambda^{-1/4} H(lambda^{-1/4}); the lambda^{-1} term is
    // the y^3 Taylor coefficient of H, and R = -g3/2.
    std::mt19937 local(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        const Potential p(4, {{u(local), u(local)}, {u(local), u(local)}, {u(local), u(local)}});
        const int m = 32;
        const double r = 0.1;
        cplx g3 = 0.0;
        for (int j = 0; j < m; ++j) {
            const cplx y = std::polar(r, 2.0 * pi * j / m);
            g3 += scaled_integral(p, y) / (y * y * y);
        }
        g3 /= double(m);
        CHECK(std::abs(-g3 / 2.0 - residue_R(p)) < 1e-8);
    }
}

TEST_CASE("parsing") {
    const Potential p = parse_potential("q4+2*q2-0.5*q1");
    CHECK(p.degree() == 4);
    CHECK(p.coeff(2) == cplx(2.0));
    CHECK(p.coeff(3) == cplx(-0.5));
    CHECK(parse_potential("q^6 - q^2") == Potential(6, {0.0, 0.0, 0.0, -1.0, 0.0}));
    CHECK_THROWS(parse_potential("2*q4"));
    CHECK_THROWS(parse_potential("q4+3"));
    CHECK_THROWS(parse_potential("x4"));
}

}  // TEST_SUITE
