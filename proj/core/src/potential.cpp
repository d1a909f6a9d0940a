#include "chainquant/potential.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cq {

Potential::Potential(int degree, std::vector<cplx> coeffs) : n_(degree), v_(std::move(coeffs)) {
    if (n_ < 1) throw std::invalid_argument("potential degree must be >= 1");
    if (static_cast<int>(v_.size()) > n_ - 1)
        throw std::invalid_argument("too many coefficients for degree " + std::to_string(n_));
    v_.resize(n_ - 1, cplx(0.0));
}

cplx Potential::coeff(int j) const {
    if (j < 1 || j > n_ - 1) throw std::out_of_range("coefficient index out of range");
    return v_[j - 1];
}

bool Potential::is_even() const {
    if (n_ % 2 != 0) return false;
    for (int j = 1; j < n_; j += 2)
        if (v_[j - 1] != cplx(0.0)) return false;
    return true;
}

int Potential::group_order() const { return is_even() ? n_ / 2 + 1 : n_ + 2; }

bool Potential::is_real(double tol) const {
    for (const auto& c : v_)
        if (std::abs(c.imag()) > tol) return false;
    return true;
}

cplx Potential::operator()(cplx q) const {
    // Horner on q^N + v_1 q^{N-1} + ... + v_{N-1} q
    cplx acc = 1.0;
    for (int j = 1; j < n_; ++j) acc = acc * q + v_[j - 1];
    return acc * q;
}

cplx Potential::derivative(cplx q, int order) const {
    if (order == 0) return (*this)(q);
    cplx acc = 0.0;
    for (int p = order; p <= n_; ++p) {
        const cplx c = (p == n_) ? cplx(1.0) : v_[n_ - p - 1];
        if (c == cplx(0.0)) continue;
        double f = 1.0;
        for (int i = 0; i < order; ++i) f *= (p - i);
        acc += c * f * std::pow(q, p - order);
    }
    return acc;
}

std::string Potential::str() const {
    std::ostringstream os;
    os << "q^" << n_;
    for (int j = 1; j < n_; ++j) {
        const cplx c = v_[j - 1];
        if (c == cplx(0.0)) continue;
        os << " + ";
        if (c.imag() == 0.0) os << c.real();
        else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        os << " q";
        if (n_ - j > 1) os << "^" << n_ - j;
    }
    return os.str();
}

Potential rotate(const Potential& p, int ell) {
    const double half = 0.5 * ell * p.symmetry_angle();
    std::vector<cplx> v(p.coeffs());
    for (int j = 1; j < p.degree(); ++j) v[j - 1] *= std::polar(1.0, j * half);
    return Potential(p.degree(), std::move(v));
}

Potential shift(const Potential& p, double a) {
    if (!p.is_real()) throw std::invalid_argument("shift: potential must have real coefficients");
    const int n = p.degree();
    // c[k] = coefficient of q^k in V(q+a)
    std::vector<cplx> c(n + 1, 0.0);
    for (int pw = 1; pw <= n; ++pw) {
        const cplx cp = (pw == n) ? cplx(1.0) : p.coeff(n - pw);
        double binom = 1.0;
        for (int i = 0; i <= pw; ++i) {
            c[i] += cp * binom * std::pow(a, pw - i);
            binom = binom * (pw - i) / (i + 1);
        }
    }
    std::vector<cplx> v(n - 1);
    for (int j = 1; j < n; ++j) v[j - 1] = cplx(c[n - j].real(), 0.0);
    return Potential(n, std::move(v));
}

std::vector<cplx> sqrt_series(const std::vector<cplx>& w, int terms) {
    std::vector<cplx> s(terms, 0.0);
    if (terms == 0) return s;
    s[0] = 1.0;
    for (int m = 1; m < terms; ++m) {
        cplx acc = m < static_cast<int>(w.size()) ? w[m] : cplx(0.0);
        for (int i = 1; i < m; ++i) acc -= s[i] * s[m - i];
        s[m] = 0.5 * acc;
    }
    return s;
}

cplx LaurentHead::beta(Rational sigma) const {
    if (sigma < Rational(-1)) throw std::out_of_range("laurent head stops at sigma = -1");
    for (const auto& [s, b] : entries)
        if (s == sigma) return b;
    return 0.0;
}

LaurentHead laurent_head(const Potential& p, cplx lambda) {
    const int n = p.degree();
    // sigma = N/2 - m >= -1
    const int m_max = (n + 2) / 2;
    std::vector<cplx> w(std::max(n, m_max) + 1, 0.0);
    for (int j = 1; j < n; ++j) w[j] = p.coeff(j);
    w[n] += lambda;
    const auto s = sqrt_series(w, m_max + 1);
    LaurentHead head;
    head.lambda = lambda;
    for (int m = 0; m <= m_max; ++m) head.entries.emplace_back(Rational(n - 2 * m, 2), s[m]);
    return head;
}

cplx beta_m1(const Potential& p) { return laurent_head(p, 0.0).beta_m1(); }

cplx residue_R(const Potential& p) {
    if (p.degree() < 3) throw std::invalid_argument("residue_R needs N >= 3");
    return beta_m1(p) / static_cast<double>(p.degree());
}

Potential parse_potential(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty potential");

    std::map<int, double> terms;
    std::size_t i = 0;
    while (i < s.size()) {
        double sign = 1.0;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        }
        double coef = 1.0;
        std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == 'e' ||
                                s[i] == 'E' ||
                                ((s[i] == '+' || s[i] == '-') && i > start && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
            ++i;
        if (i > start) coef = std::stod(s.substr(start, i - start));
        if (i < s.size() && s[i] == '*') ++i;
        if (i >= s.size() || s[i] != 'q')
            throw std::invalid_argument("potential term without q near position " + std::to_string(start) +
                                        " (constant terms are not allowed)");
        ++i;
        if (i < s.size() && s[i] == '^') ++i;
        int power = 1;
        start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) power = std::stoi(s.substr(start, i - start));
        if (power < 1) throw std::invalid_argument("powers must be >= 1");
        terms[power] += sign * coef;
    }
    const int n = terms.rbegin()->first;
    if (terms.rbegin()->second != 1.0)
        throw std::invalid_argument("leading term q^" + std::to_string(n) + " must have coefficient 1");
    std::vector<cplx> v(n - 1, 0.0);
    for (const auto& [pw, c] : terms)
        if (pw < n) v[n - pw - 1] = c;
    return Potential(n, std::move(v));
}

}  // namespace cq
