#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "chainquant/rational.hpp"

namespace cq {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// V(q) = q^N + v_1 q^{N-1} + ... + v_{N-1} q, no constant term.
class Potential {
public:
    explicit Potential(int degree, std::vector<cplx> coeffs = {});

    int degree() const { return n_; }
    const std::vector<cplx>& coeffs() const { return v_; }
    // v_j for 1 <= j <= N-1
    cplx coeff(int j) const;

    Rational growth_order() const { return Rational(1, 2) + Rational(1, n_); }
    double symmetry_angle() const { return 4.0 * pi / (n_ + 2); }
    int group_order() const;
    bool is_even() const;
    bool is_real(double tol = 0.0) const;

    cplx operator()(cplx q) const;
    // order-th derivative in q
    cplx derivative(cplx q, int order) const;

    std::string str() const;

    friend bool operator==(const Potential&, const Potential&) = default;

private:
    int n_;
    std::vector<cplx> v_;
};

// v_j -> exp(i j ell phi / 2) v_j, with ell used literally.
Potential rotate(const Potential& p, int ell);

// V_a(q) = V(q+a) - V(a)
Potential shift(const Potential& p, double a);

// Coefficients of (V(q)+lambda)^{1/2} in descending powers q^sigma, down to sigma = -1.
struct LaurentHead {
    std::vector<std::pair<Rational, cplx>> entries;
    cplx lambda;

    cplx beta(Rational sigma) const;
    cplx beta_m1() const { return beta(Rational(-1)); }
};

LaurentHead laurent_head(const Potential& p, cplx lambda);

// q^{-1} coefficient of (V+lambda)^{1/2}; lambda-independent for N > 2.
cplx beta_m1(const Potential& p);

// Residue at s = -1/2 of the integral of (V+lambda)^{-s} over [q, inf).
cplx residue_R(const Potential& p);

// "q4+2*q2-0.5*q1" style; the leading term must be monic.
Potential parse_potential(const std::string& text);

// Power-series coefficients of sqrt(1 + w(x)) for a polynomial w with w(0) = 0.
std::vector<cplx> sqrt_series(const std::vector<cplx>& w, int terms);

}  // namespace cq
