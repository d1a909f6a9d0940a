#include "chainquant/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace cq {

namespace {

using json = nlohmann::json;

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
cplx json_cplx(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json potential_j(const Potential& p) {
    json c = json::array();
    for (const auto& v : p.coeffs()) c.push_back(cplx_json(v));
    return {{"degree", p.degree()}, {"coeffs", c}};
}

Potential j_potential(const json& j) {
    std::vector<cplx> c;
    for (const auto& e : j.at("coeffs")) c.push_back(json_cplx(e));
    return Potential(j.at("degree").get<int>(), std::move(c));
}

json tail_j(const SemiclassicalTail& t) {
    json out = json::array();
    for (const auto& e : t.entries)
        out.push_back({{"nu", json::array({e.nu.num, e.nu.den})}, {"b", cplx_json(e.b)}});
    return out;
}

SemiclassicalTail j_tail(const json& j) {
    SemiclassicalTail t;
    for (const auto& e : j) t.entries.push_back({Rational(e.at("nu").at(0).get<std::int64_t>(), e.at("nu").at(1).get<std::int64_t>()), json_cplx(e.at("b"))});
    return t;
}

// shortest text that reads back to the same double
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string to_string(Sector s) {
    switch (s) {
        case Sector::neumann: return "neumann";
        case Sector::dirichlet: return "dirichlet";
        case Sector::full: return "full";
    }
    return "?";
}

Sector parse_sector(const std::string& s) {
    if (s == "neumann" || s == "N" || s == "+") return Sector::neumann;
    if (s == "dirichlet" || s == "D" || s == "-") return Sector::dirichlet;
    throw std::invalid_argument("unknown sector '" + s + "' (neumann or dirichlet)");
}

std::string potential_to_json(const Potential& p) { return potential_j(p).dump(); }
Potential potential_from_json(const std::string& text) { return j_potential(json::parse(text)); }
std::string tail_to_json(const SemiclassicalTail& tail) { return tail_j(tail).dump(); }
SemiclassicalTail tail_from_json(const std::string& text) { return j_tail(json::parse(text)); }

std::string snapshot_to_json(const ChainSystem& sys) {
    json chains = json::array();
    for (const auto& c : sys.chains) {
        json lv = json::array();
        for (const auto& e : c.levels) lv.push_back(cplx_json(e));
        chains.push_back({{"ell", c.ell}, {"levels", lv}, {"tail", tail_j(c.tail->tail)}});
    }
    json j = {{"potential", potential_j(sys.potential)},
              {"sector", to_string(sys.sector)},
              {"k_max", sys.k_max},
              {"k_eval", sys.k_eval},
              {"chains", chains},
              {"cycle", sys.cycle}};
    return j.dump(1);
}

ChainSystem snapshot_from_json(const std::string& text) {
    const json j = json::parse(text);
    const Potential p = j_potential(j.at("potential"));
    IterationConfig cfg;
    cfg.k_max = j.at("k_max").get<int>();
    cfg.k_eval = j.value("k_eval", cfg.k_eval);
    ChainSystem sys = make_system(p, parse_sector(j.at("sector").get<std::string>()), cfg);
    const auto& chains = j.at("chains");
    if (static_cast<int>(chains.size()) != sys.group_order)
        throw std::runtime_error("snapshot: expected " + std::to_string(sys.group_order) + " chains");
    for (const auto& c : chains) {
        Chain& ch = sys.chain(c.at("ell").get<int>());
        std::vector<cplx> lv;
        for (const auto& e : c.at("levels")) lv.push_back(json_cplx(e));
        if (lv.size() != ch.levels.size()) throw std::runtime_error("snapshot: level count does not match k_max");
        ch.levels = std::move(lv);
        const auto stored = j_tail(c.at("tail"));
        const auto& fresh = ch.tail->tail;
        if (stored.depth() != fresh.depth()) throw std::runtime_error("snapshot: tail depth mismatch");
        for (int i = 0; i < stored.depth(); ++i) {
            const auto& a = stored.entries[i];
            const auto& b = fresh.entries[i];
            if (a.nu != b.nu || std::abs(a.b - b.b) > 1e-12 * std::max(1.0, std::abs(b.b)))
                throw std::runtime_error("snapshot: stored tail of chain " + std::to_string(ch.ell) +
                                         " disagrees with the potential");
        }
    }
    sys.cycle = j.value("cycle", 0);
    return sys;
}

std::string convergence_csv(const ConvergenceReport& r) {
    std::ostringstream os;
    os << "cycle,sup_displacement,ratio_estimate\n";
    for (std::size_t i = 0; i < r.displacement.size(); ++i) {
        std::string ratio;
        if (i >= 3) {
            const std::vector<double> head(r.displacement.begin(), r.displacement.begin() + i + 1);
            ratio = num(estimate_contraction(head).ratio);
        }
        os << i + 1 << ',' << num(r.displacement[i]) << ',' << ratio << '\n';
    }
    return os.str();
}

std::string levels_csv(const ChainSystem& sys) {
    std::ostringstream os;
    os << "ell,k,re,im,display_re,display_im\n";
    const double phi = sys.phi();
    for (const auto& c : sys.chains) {
        const auto ks = c.indices();
        for (std::size_t i = 0; i < c.levels.size(); ++i) {
            const cplx d = c.display(i, phi);
            os << c.ell << ',' << ks[i] << ',' << num(c.levels[i].real()) << ',' << num(c.levels[i].imag()) << ','
               << num(d.real()) << ',' << num(d.imag()) << '\n';
        }
    }
    return os.str();
}

std::string wave_csv(const std::vector<WaveSample>& samples) {
    std::ostringstream os;
    os << "a,re_psi,im_psi,ratio,converged\n";
    for (const auto& s : samples)
        os << num(s.a) << ',' << num(s.psi.real()) << ',' << num(s.psi.imag()) << ',' << num(s.contraction_ratio)
           << ',' << (s.converged ? 1 : 0) << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace cq
