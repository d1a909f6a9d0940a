// chainquant: exact quantization of polynomial potentials from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <chainquant/io.hpp>
#include <chainquant/oracle.hpp>
#include <chainquant/quantizer.hpp>
#include <chainquant/wavefunction.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace cq;

namespace {

struct RunConfig {
    std::string potential = "q4";
    std::string sector = "both";
    std::string scheme = "A";
    std::string order;
    std::string updating = "immediate";
    int k_max = 48;
    int k_eval = 512;
    double tol = 1e-10;
    int max_cycles = 60;
    std::string out = ".";
    std::string snapshot;
    int jobs = 1;
    std::vector<double> grid;
    double energy = 1.06036209048;
    std::string suite = "all";
    bool overlays = false;
    bool derivative = false;
    bool cold = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

IterationConfig iteration_config(const RunConfig& rc) {
    IterationConfig c;
    c.scheme = parse_scheme(rc.scheme);
    if (!rc.order.empty()) {
        c.scheme = Scheme::custom;
        std::stringstream ss(rc.order);
        for (std::string tok; std::getline(ss, tok, ',');) c.order.push_back(std::stoi(tok));
    }
    if (rc.updating == "immediate") c.updating = Updating::immediate;
    else if (rc.updating == "synchronous") c.updating = Updating::synchronous;
    else throw ConfigError("--updating must be immediate or synchronous");
    c.newton_tol = rc.tol;
    c.max_cycles = rc.max_cycles;
    c.k_max = rc.k_max;
    c.k_eval = rc.k_eval;
    c.jobs = rc.jobs;
    return c;
}

std::vector<Sector> sectors(const RunConfig& rc) {
    if (rc.sector == "both") return {Sector::neumann, Sector::dirichlet};
    return {parse_sector(rc.sector)};
}

fs::path snapshot_dir(const RunConfig& rc) {
    if (const char* env = std::getenv("CHAINQUANT_SNAPSHOT_DIR")) return env;
    return rc.out;
}

Potential quantizable(const RunConfig& rc) {
    const Potential p = parse_potential(rc.potential);
    if (p.degree() == 2) throw ConfigError("degree 2 is not supported: the harmonic case has no chain structure");
    return p;
}

// solves one sector, from the snapshot when one is given
SchemeResult solve_sector(const Potential& p, Sector s, const IterationConfig& cfg, const RunConfig& rc) {
    ChainSystem sys = make_system(p, s, cfg);
    scheme_order(sys, cfg);  // reject incompatible schemes before any work
    if (!rc.snapshot.empty()) {
        ChainSystem loaded = snapshot_from_json(read_file(rc.snapshot));
        if (loaded.potential != p) throw ConfigError("snapshot belongs to another potential");
        if (loaded.k_max != cfg.k_max || loaded.k_eval != cfg.k_eval)
            throw ConfigError("snapshot k_max/k_eval differ from the command line");
        if (loaded.sector == s) sys = std::move(loaded);
    }
    return run_scheme(std::move(sys), cfg);
}

void print_report(const std::string& label, const ConvergenceReport& r) {
    std::cout << label << ": " << to_string(r.status) << " after " << r.displacement.size() << " cycles";
    if (!r.displacement.empty()) std::cout << ", last displacement " << r.displacement.back();
    std::cout << ", ratio " << r.ratio << (r.ratio_reliable ? "" : " (unreliable)") << '\n';
    if (!r.message.empty()) std::cout << "  " << r.message << '\n';
    for (const auto& f : r.flags) std::cout << "  flag: " << f << '\n';
}

std::string gnuplot_chains(const std::string& csv, bool overlays) {
    std::ostringstream os;
    os << "set datafile separator ','\nset key off\nset size ratio -1\n"
       << "set xlabel 'Re'\nset ylabel 'Im'\n"
       << "plot '" << csv << "' every ::1 using 5:6:1 with labels";
    if (overlays) os << ", 'overlays.csv' every ::1 using 1:2 with points pt 6";
    os << "\n";
    return os.str();
}

std::string overlay_csv(const Potential& p, Sector s, int k_max) {
    std::ostringstream os;
    os << std::setprecision(17) << "re,im\n";
    const bool quartic = p.degree() == 4 && p.is_even() && p.is_real();
    const double v2 = quartic ? p.coeff(2).real() : 0.0;
    if (v2 == 0.0) return os.str();
    for (int k : sector_indices(s, k_max)) {
        const double w = (2.0 * k + 1.0) * std::sqrt(std::abs(v2));
        if (v2 < 0) os << "0," << w << "\n0," << -w << '\n';
        else os << -w << ",0\n";
    }
    return os.str();
}

int cmd_spectrum(const RunConfig& rc, bool chains_only) {
    const Potential p = quantizable(rc);
    const IterationConfig cfg = iteration_config(rc);
    fs::create_directories(rc.out);
    fs::create_directories(snapshot_dir(rc));
    int status = 0;
    for (Sector s : sectors(rc)) {
        const std::string tag = to_string(s);
        auto res = solve_sector(p, s, cfg, rc);
        print_report(tag, res.report);
        const auto levels = levels_csv(res.system);
        if (chains_only) {
            write_file((fs::path(rc.out) / ("chains_" + tag + ".csv")).string(), levels);
            write_file((fs::path(rc.out) / ("chains_" + tag + ".gp")).string(),
                       gnuplot_chains("chains_" + tag + ".csv", rc.overlays));
            if (rc.overlays) write_file((fs::path(rc.out) / "overlays.csv").string(), overlay_csv(p, s, rc.k_max));
        } else {
            write_file((fs::path(rc.out) / ("levels_" + tag + ".csv")).string(), levels);
            write_file((fs::path(rc.out) / ("convergence_" + tag + ".csv")).string(), convergence_csv(res.report));
            write_file((snapshot_dir(rc) / ("snapshot_" + tag + ".json")).string(), snapshot_to_json(res.system));
            for (int l = 0; l < res.system.group_order; ++l) {
                if (!res.system.is_real_chain(l)) continue;
                std::cout << "  chain " << l << ":";
                const auto& c = res.system.chains[l];
                for (std::size_t i = 0; i < std::min<std::size_t>(5, c.levels.size()); ++i)
                    std::cout << ' ' << std::setprecision(12) << c.levels[i].real();
                std::cout << '\n';
            }
        }
        if (!res.report.converged()) status = 2;
    }
    return status;
}

int cmd_wavefunction(const RunConfig& rc) {
    const Potential p = parse_potential(rc.potential);
    const IterationConfig cfg = iteration_config(rc);
    fs::create_directories(rc.out);
    WaveOptions opt;
    opt.derivative = rc.derivative;
    opt.warm_start = !rc.cold;
    const auto samples = wave_profile(p, rc.energy, rc.grid, cfg, opt);
    OracleResult ref;
    if (!rc.grid.empty()) ref = integrate_wave(p, rc.energy, rc.grid);
    std::vector<cplx> got, want;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].converged) {
            got.push_back(samples[i].psi);
            want.push_back(ref.values[i]);
        }
    const cplx scale = got.empty() ? cplx(1.0) : fit_scale(want, got);

    std::ostringstream os;
    os << std::setprecision(17) << "a,re_psi,im_psi,ratio,converged,oracle_psi,fitted_oracle_psi,warm_started\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        os << s.a << ',' << s.psi.real() << ',' << s.psi.imag() << ',' << s.contraction_ratio << ','
           << (s.converged ? 1 : 0) << ',' << ref.values[i].real() << ',' << (scale * ref.values[i]).real() << ','
           << (s.warm_started ? 1 : 0) << '\n';
        std::cout << "a=" << s.a << " psi=" << std::setprecision(10) << s.psi.real() << " oracle=" << ref.values[i].real()
                  << " ratio=" << std::setprecision(3) << s.contraction_ratio << ' '
                  << (s.converged ? "converged" : "UNCONVERGED (" + to_string(s.status) + ")") << '\n';
    }
    write_file((fs::path(rc.out) / "wavefunction.csv").string(), samples.empty() ? std::string() : os.str());
    write_file((fs::path(rc.out) / "wavefunction.gp").string(),
               "set datafile separator ','\nset xlabel 'a'\nset ylabel 'psi'\n"
               "plot 'wavefunction.csv' every ::1 using 1:2 with points title 'determinant', "
               "'' every ::1 using 1:7 with lines title 'integration (fitted)'\n");
    bool any = samples.empty();
    for (const auto& s : samples) any = any || s.converged;
    return any ? 0 : 2;
}

struct Check {
    std::string name;
    double value;
    double tol;
    bool ok() const { return value <= tol; }
};

nlohmann::json oracle_json(const OracleResult& r) {
    nlohmann::json v = nlohmann::json::array();
    for (auto z : r.values) v.push_back({z.real(), z.imag()});
    return {{"values", v}, {"method", r.method}, {"resolution", r.resolution}, {"error", r.error_estimate}};
}

std::vector<Potential> random_potentials(int count) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Potential> out;
    for (int i = 0; i < count; ++i) {
        if (i % 2 == 0)
            out.emplace_back(4, std::vector<cplx>{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
        else
            out.emplace_back(6, std::vector<cplx>{0.0, u(rng), 0.0, u(rng), 0.0});
    }
    return out;
}

int cmd_validate(const RunConfig& rc) {
    std::vector<Check> checks;
    nlohmann::json report;
    const bool all = rc.suite == "all";
    const IterationConfig cfg = iteration_config(rc);

    if (all || rc.suite == "idr") {
        double worst = 0.0;
        for (const auto& p : random_potentials(20)) {
            const cplx b0 = bs_coeffs(p).b(Rational(0));
            worst = std::max(worst, std::abs(b0 + 2.0 / p.degree() * beta_m1(p)));
        }
        checks.push_back({"idr: b0 + (2/N) beta_-1", worst, 1e-10});
    }
    if (all || rc.suite == "harmonic-det") {
        const int k_max = 399;
        auto model = make_tail_model(harmonic_tail(), Sector::dirichlet, k_max, 4 * k_max);
        std::vector<cplx> lv;
        for (int k : sector_indices(Sector::dirichlet, k_max)) lv.emplace_back(2.0 * k + 1.0);
        const Chain c = make_chain(0, Sector::dirichlet, lv, model);
        double worst = 0.0;
        for (double lam : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double exact = 0.5 * std::log(pi) - 0.5 * lam * std::log(2.0) - std::lgamma((3.0 + lam) / 4.0);
            worst = std::max(worst, std::abs(log_det(c, lam).log().real() - exact));
        }
        checks.push_back({"harmonic-det: log D vs closed form", worst, 1e-5});
    }
    if (all || rc.suite == "spectrum" || rc.suite == "wronskian") {
        const Potential p = quantizable(rc);
        auto n = run_scheme(make_system(p, Sector::neumann, cfg), cfg);
        auto d = run_scheme(make_system(p, Sector::dirichlet, cfg), cfg);
        if (rc.suite != "wronskian" && p.is_even() && p.is_real()) {
            for (auto [sys, s] : {std::pair{&n.system, Sector::neumann}, std::pair{&d.system, Sector::dirichlet}}) {
                const auto o = diagonalize(p, s, 5);
                report["oracle"][to_string(s)] = oracle_json(o);
                double worst = 0.0;
                for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(sys->chains[0].levels[i] - o.values[i]));
                checks.push_back({"spectrum " + to_string(s) + ": lowest five vs diagonalization", worst, 1e-5});
            }
        }
        if (rc.suite != "spectrum") {
            std::mt19937 rng(7);
            std::uniform_real_distribution<double> r(0.0, 5.0), t(0.0, 2.0 * pi);
            double worst = 0.0;
            for (int i = 0; i < 10; ++i) worst = std::max(worst, std::abs(wronskian_residual(n.system, d.system, std::polar(r(rng), t(rng)))));
            checks.push_back({"wronskian: max residual over 10 random lambda", worst, 1e-6});
        }
    }
    if (checks.empty()) throw ConfigError("unknown suite '" + rc.suite + "' (idr, harmonic-det, spectrum, wronskian, all)");

    int failed = 0;
    for (const auto& c : checks) {
        std::cout << (c.ok() ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tol " << c.tol << ")\n";
        report["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.ok()}});
        failed += !c.ok();
    }
    fs::create_directories(rc.out);
    write_file((fs::path(rc.out) / "validate.json").string(), report.dump(2));
    return failed ? 1 : 0;
}

void common_flags(CLI::App* app, RunConfig& rc) {
    app->add_option("--potential", rc.potential, "potential such as q4+2*q2")->capture_default_str();
    app->add_option("--kmax", rc.k_max, "explicit levels per chain up to this k")->capture_default_str();
    app->add_option("--keval", rc.k_eval, "tail evaluation point")->capture_default_str();
    app->add_option("--scheme", rc.scheme, "A, B or C")->capture_default_str();
    app->add_option("--order", rc.order, "custom chain order, e.g. 0,2,3,1");
    app->add_option("--updating", rc.updating, "immediate or synchronous")->capture_default_str();
    app->add_option("--tol", rc.tol, "Newton tolerance on |dE|/|E|")->capture_default_str();
    app->add_option("--max-cycles", rc.max_cycles)->capture_default_str();
    app->add_option("--out", rc.out, "output directory")->capture_default_str();
    app->add_option("--jobs", rc.jobs, "worker threads")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact quantization of polynomial potentials by chain iteration"};
    app.require_subcommand(1);
    RunConfig rc;

    auto* spectrum = app.add_subcommand("spectrum", "converge the chains and write levels, log and snapshot");
    common_flags(spectrum, rc);
    spectrum->add_option("--sector", rc.sector, "neumann, dirichlet or both")->capture_default_str();
    spectrum->add_option("--snapshot", rc.snapshot, "start from a saved chain system");

    auto* chains = app.add_subcommand("chains", "write display positions of every chain");
    common_flags(chains, rc);
    chains->add_option("--sector", rc.sector)->capture_default_str();
    chains->add_option("--snapshot", rc.snapshot);
    chains->add_flag("--overlays", rc.overlays, "add the limiting sequences for q4 + v2 q2");

    auto* wave = app.add_subcommand("wavefunction", "psi(a) from determinants of shifted potentials");
    common_flags(wave, rc);
    wave->add_option("--energy", rc.energy, "eigenvalue E")->capture_default_str();
    wave->add_option("--grid", rc.grid, "endpoints a")->delimiter(',');
    wave->add_flag("--derivative", rc.derivative, "also compute psi'");
    wave->add_flag("--cold", rc.cold, "no warm start between grid points");

    auto* validate = app.add_subcommand("validate", "compare against the independent oracles");
    common_flags(validate, rc);
    validate->add_option("--suite", rc.suite, "idr, harmonic-det, spectrum, wronskian or all")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    if (validate->parsed()) {
        // oracle comparisons at 1e-5 need the finer cutoff
        if (!validate->count("--kmax")) rc.k_max = 384;
        if (!validate->count("--keval")) rc.k_eval = 1024;
    }
    try {
        if (spectrum->parsed()) return cmd_spectrum(rc, false);
        if (chains->parsed()) return cmd_spectrum(rc, true);
        if (wave->parsed()) return cmd_wavefunction(rc);
        if (validate->parsed()) return cmd_validate(rc);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
