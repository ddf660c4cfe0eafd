#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "quadopo/analytic.hpp"
#include "quadopo/config.hpp"
#include "quadopo/csv.hpp"
#include "quadopo/entanglement.hpp"
#include "quadopo/errors.hpp"
#include "quadopo/meanfield.hpp"
#include "quadopo/model.hpp"
#include "quadopo/spectra.hpp"
#include "quadopo/stochastic.hpp"
#include "quadopo/version.hpp"

namespace quadopo::cli {
namespace detail {

// Shared parameter surface: a config file plus family-wide flag
// overrides; flags win over the file.  --eps-ratio derives the drive
// from the threshold of the (symmetric) loss/coupling parameters.
struct ParamCli {
    std::string config;
    double chi = 0.0, eps = 0.0, gamma = 0.0, kappa = 0.0, eps_ratio = 0.0;
    CLI::Option* o_config = nullptr;
    CLI::Option* o_chi = nullptr;
    CLI::Option* o_eps = nullptr;
    CLI::Option* o_gamma = nullptr;
    CLI::Option* o_kappa = nullptr;
    CLI::Option* o_ratio = nullptr;

    void attach(CLI::App* cmd) {
        o_config = cmd->add_option("--config", config, "key=value parameter file");
        o_chi = cmd->add_option("--chi", chi, "coupling strength for all four processes");
        o_eps = cmd->add_option("--eps", eps, "pump amplitude for all four pumps");
        o_gamma = cmd->add_option("--gamma", gamma, "loss rate for all four pump modes");
        o_kappa = cmd->add_option("--kappa", kappa, "loss rate for all four low modes");
        o_ratio = cmd->add_option("--eps-ratio", eps_ratio,
                                  "pump amplitude as a multiple of the threshold amplitude");
    }

    SystemParams resolve(bool eps_optional = false) const {
        SystemParams p;
        bool has_chi = false, has_eps = false, has_gamma = false, has_kappa = false;
        if (o_config->count()) {
            p = load_config(config);
            has_chi = has_eps = has_gamma = has_kappa = true;
        }
        if (o_chi->count()) { p.chi.fill(chi); has_chi = true; }
        if (o_eps->count()) { p.eps.fill(eps); has_eps = true; }
        if (o_gamma->count()) { p.gamma.fill(gamma); has_gamma = true; }
        if (o_kappa->count()) { p.kappa.fill(kappa); has_kappa = true; }
        if (!has_chi) throw DomainError("chi not given (use --config or --chi)");
        if (!has_gamma) throw DomainError("gamma not given (use --config or --gamma)");
        if (!has_kappa) throw DomainError("kappa not given (use --config or --kappa)");
        if (o_ratio->count()) {
            SystemParams tmp = p;
            tmp.eps.fill(0.0);
            p.eps.fill(eps_ratio * threshold_pump(tmp));
            has_eps = true;
        }
        if (!has_eps) {
            if (!eps_optional)
                throw DomainError("eps not given (use --config, --eps or --eps-ratio)");
            p.eps.fill(0.0);
        }
        validate(p);
        return p;
    }
};

struct OutputCli {
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", path, "output CSV path (default: standard output)");
    }
};

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw DomainError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

inline std::string params_comment(const std::string& cmd, const SystemParams& p) {
    std::string s = std::string("quadopo ") + version_string + " cmd=" + cmd;
    const auto fam = [&s](const char* name, const std::array<double, 4>& a) {
        for (int i = 0; i < 4; ++i)
            s += " " + std::string(name) + std::to_string(i + 1) + "=" + fmt17(a[i]);
    };
    fam("chi", p.chi);
    fam("eps", p.eps);
    fam("gamma", p.gamma);
    fam("kappa", p.kappa);
    return s;
}

// Operating point used by the linearized and stochastic commands: the
// closed form when the parameters are symmetric, a dynamical relaxation
// otherwise.  Returns the state plus a regime label for reporting.
inline std::pair<MeanState, std::string> operating_state(const SystemParams& p) {
    if (is_symmetric(p)) {
        const SteadyState ss = steady_state(p);
        return {ss.state, to_string(ss.regime)};
    }
    MeanState init;
    for (int i = 0; i < 4; ++i) init.alpha[i] = p.eps[i] / p.gamma[i];
    for (int i = 0; i < 4; ++i) init.alpha[4 + i] = 1e-3;
    double slow = p.gamma[0];
    for (int i = 0; i < 4; ++i) slow = std::min({slow, p.gamma[i], p.kappa[i]});
    return {relax(p, init, 400.0 / slow, 1e-10), "relaxed"};
}

inline std::vector<double> frequency_grid(double omega_max, int points) {
    if (points < 1) throw DomainError("points must be at least 1");
    if (!(omega_max > 0.0)) throw DomainError("omega-max must be positive");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        grid.push_back(0.0);
        return grid;
    }
    for (int k = 0; k < points; ++k)
        grid.push_back(omega_max * static_cast<double>(k) / static_cast<double>(points - 1));
    return grid;
}

inline std::vector<double> parse_ratio_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) {
        cur = quadopo::detail::trim(cur);
        if (cur.empty()) throw DomainError("empty entry in ratio list");
        out.push_back(quadopo::detail::parse_number(cur, "ratios"));
    }
    if (out.empty()) throw DomainError("ratio list is empty");
    return out;
}

// analytic: ideal-coupling correlations on a time grid.
struct AnalyticCmd {
    double xi = 0.0, xi1 = 0.0, xi2 = 0.0, tmax = 3.0;
    int points = 300;
    OutputCli out;
    CLI::Option* o_xi = nullptr;
    CLI::Option* o_xi1 = nullptr;
    CLI::Option* o_xi2 = nullptr;

    void attach(CLI::App* cmd) {
        o_xi = cmd->add_option("--xi", xi, "single coupling value (all four equal)");
        o_xi1 = cmd->add_option("--xi1", xi1, "coupling touching mode 6 (paired case)");
        o_xi2 = cmd->add_option("--xi2", xi2, "coupling touching mode 8 (paired case)");
        cmd->add_option("--tmax", tmax, "largest coupling*time product on the grid");
        cmd->add_option("--points", points, "number of grid points");
        out.attach(cmd);
    }

    int execute() const {
        const bool equal_mode = o_xi->count() > 0;
        const bool paired_mode = o_xi1->count() > 0 || o_xi2->count() > 0;
        if (equal_mode == paired_mode)
            throw DomainError("give either --xi, or both --xi1 and --xi2");
        if (paired_mode && (o_xi1->count() == 0 || o_xi2->count() == 0))
            throw DomainError("the paired case needs both --xi1 and --xi2");
        if (points < 1) throw DomainError("points must be at least 1");
        if (!(tmax > 0.0)) throw DomainError("tmax must be positive");

        EffectiveCouplings c;
        if (equal_mode)
            c.xi = {xi, xi, xi, xi};
        else
            c.xi = {xi1, xi1, xi2, xi2};
        validate(c);

        Output o(out.path);
        CsvWriter w(o.stream());
        std::string hdr = std::string("quadopo ") + version_string + " cmd=analytic";
        if (equal_mode)
            hdr += " xi=" + fmt17(xi);
        else
            hdr += " xi1=" + fmt17(xi1) + " xi2=" + fmt17(xi2);
        hdr += " tmax=" + fmt17(tmax) + " points=" + std::to_string(points);
        w.comment(hdr);

        std::vector<std::string> cols = {"t",  "V56", "V67", "V78",
                                         "g5", "g6",  "g7",  "g8"};
        if (equal_mode) cols.push_back("v3_closed_form");
        w.header(cols);

        const Method method = equal_mode ? Method::ClosedEqual : Method::ClosedPaired;
        for (int k = 1; k <= points; ++k) {
            const double t = tmax * static_cast<double>(k) / static_cast<double>(points);
            const VlfResult r = vlf_optimized(quad_covariance(propagator(c, t, method)));
            std::vector<double> row = {t,          r.values.v56, r.values.v67, r.values.v78,
                                       r.gains.g5, r.gains.g6,   r.gains.g7,   r.gains.g8};
            if (equal_mode) row.push_back(v3_closed_form(xi, t));
            w.row_values(row);
        }
        return 0;
    }
};

struct SteadyCmd {
    ParamCli params;
    OutputCli out;

    void attach(CLI::App* cmd) {
        params.attach(cmd);
        out.attach(cmd);
    }

    int execute() const {
        const SystemParams p = params.resolve();
        const auto [state, label] = operating_state(p);
        Output o(out.path);
        CsvWriter w(o.stream());
        w.comment(params_comment("steady", p));
        std::vector<std::string> cols = {"regime", "residual"};
        for (int i = 1; i <= 8; ++i) {
            cols.push_back("a" + std::to_string(i) + "_re");
            cols.push_back("a" + std::to_string(i) + "_im");
        }
        w.header(cols);
        std::vector<std::string> row = {label, fmt17(drift_residual(p, state))};
        for (int i = 0; i < 8; ++i) {
            row.push_back(fmt17(state.alpha[i].real()));
            row.push_back(fmt17(state.alpha[i].imag()));
        }
        w.row(row);
        return 0;
    }
};

struct StabilityCmd {
    ParamCli params;
    OutputCli out;

    void attach(CLI::App* cmd) {
        params.attach(cmd);
        out.attach(cmd);
    }

    int execute() const {
        const SystemParams p = params.resolve();
        const auto [state, label] = operating_state(p);
        const StabilityResult st = stability(linearize(p, state));
        Output o(out.path);
        CsvWriter w(o.stream());
        w.comment(params_comment("stability", p) + " regime=" + label +
                  " stable=" + (st.is_stable ? "1" : "0") + " max_re=" + fmt17(st.max_real));
        w.header({"index", "re", "im"});
        for (int i = 0; i < 16; ++i)
            w.row({std::to_string(i), fmt17(st.eigenvalues[i].real()),
                   fmt17(st.eigenvalues[i].imag())});
        return 0;
    }
};

struct SpectrumCmd {
    ParamCli params;
    OutputCli out;
    double omega_max = 10.0;
    int points = 200;

    void attach(CLI::App* cmd) {
        params.attach(cmd);
        cmd->add_option("--omega-max", omega_max, "largest frequency on the grid (units of kappa)");
        cmd->add_option("--points", points, "number of frequency points");
        out.attach(cmd);
    }

    int execute() const {
        const SystemParams p = params.resolve();
        const auto [state, label] = operating_state(p);
        const SpectrumTable table = scan_frequency(p, state, frequency_grid(omega_max, points));
        Output o(out.path);
        CsvWriter w(o.stream());
        w.comment(params_comment("spectrum", p) + " regime=" + label +
                  " omega_max=" + fmt17(omega_max) + " points=" + std::to_string(points));
        w.header({"omega", "I56", "I67", "I78", "g5", "g6", "g7", "g8", "stable"});
        for (const SpectrumRow& r : table) {
            std::vector<std::string> row = {
                fmt17(r.omega),      fmt17(r.values.v56), fmt17(r.values.v67),
                fmt17(r.values.v78), fmt17(r.gains.g5),   fmt17(r.gains.g6),
                fmt17(r.gains.g7),   fmt17(r.gains.g8),   r.stable ? "1" : "0"};
            w.row(row);
        }
        return 0;
    }
};

struct ScanPumpCmd {
    ParamCli params;
    OutputCli out;
    std::string ratios;
    double omega_max = 10.0;
    int points = 200;

    void attach(CLI::App* cmd) {
        params.attach(cmd);
        cmd->add_option("--ratios", ratios, "comma-separated drive ratios eps/eps_c")->required();
        cmd->add_option("--omega-max", omega_max, "largest frequency on the grid (units of kappa)");
        cmd->add_option("--points", points, "number of frequency points");
        out.attach(cmd);
    }

    int execute() const {
        const SystemParams p = params.resolve(/*eps_optional=*/true);
        const std::vector<double> rlist = parse_ratio_list(ratios);
        const auto rows = scan_pump(p, rlist, frequency_grid(omega_max, points));
        Output o(out.path);
        CsvWriter w(o.stream());
        w.comment(params_comment("scan-pump", p) + " omega_max=" + fmt17(omega_max) +
                  " points=" + std::to_string(points));
        w.header({"ratio", "I56", "I67", "I78", "g5", "g6", "g7", "g8", "stable"});
        for (const PumpScanRow& r : rows) {
            w.row({fmt17(r.ratio), fmt17(r.min_values.v56), fmt17(r.min_values.v67),
                   fmt17(r.min_values.v78), fmt17(r.gains.g5), fmt17(r.gains.g6),
                   fmt17(r.gains.g7), fmt17(r.gains.g8), r.stable ? "1" : "0"});
        }
        return 0;
    }
};

struct SdeCmd {
    ParamCli params;
    OutputCli out;
    std::uint64_t traj = 1000;
    double tfinal = 20.0;
    double dt = 0.0;
    std::uint64_t seed = 1;
    CLI::Option* o_dt = nullptr;

    void attach(CLI::App* cmd) {
        params.attach(cmd);
        cmd->add_option("--traj", traj, "number of stochastic trajectories");
        cmd->add_option("--tfinal", tfinal, "integration horizon");
        o_dt = cmd->add_option("--dt", dt, "time step (default 0.05/max rate)");
        cmd->add_option("--seed", seed, "master seed");
        out.attach(cmd);
    }

    int execute() const {
        const SystemParams p = params.resolve();
        double maxrate = 0.0;
        for (int i = 0; i < 4; ++i) maxrate = std::max({maxrate, p.gamma[i], p.kappa[i]});
        const double step = o_dt->count() ? dt : 0.05 / maxrate;

        const auto [state, label] = operating_state(p);
        TrajectoryState init;
        init.alpha = state.alpha;
        for (int i = 0; i < 8; ++i) init.alphaPlus[i] = std::conj(init.alpha[i]);
        const EnsembleMoments em = run_ensemble(p, traj, tfinal, step, seed, init);

        Output o(out.path);
        CsvWriter w(o.stream());
        w.comment(params_comment("sde", p) + " regime=" + label + " traj=" +
                  std::to_string(traj) + " tfinal=" + fmt17(tfinal) + " dt=" + fmt17(step) +
                  " seed=" + std::to_string(seed));
        w.header({"quantity", "re", "im", "se_re", "se_im"});
        const auto emit = [&w](const std::string& name, std::complex<double> v,
                               std::complex<double> se) {
            w.row({name, fmt17(v.real()), fmt17(v.imag()), fmt17(se.real()), fmt17(se.imag())});
        };
        for (int m = 0; m < 8; ++m) {
            emit("mean_a" + std::to_string(m + 1), em.mean[2 * m], em.mean_se[2 * m]);
            emit("mean_ap" + std::to_string(m + 1), em.mean[2 * m + 1], em.mean_se[2 * m + 1]);
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                emit("n_" + std::to_string(5 + i) + std::to_string(5 + j), em.n_low(i, j),
                     em.n_low_se(i, j));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                emit("m_" + std::to_string(5 + i) + std::to_string(5 + j), em.m_low(i, j),
                     em.m_low_se(i, j));
        w.row({"n_traj", std::to_string(em.n_traj), "0", "0", "0"});
        w.row({"n_diverged", std::to_string(em.n_diverged), "0", "0", "0"});
        return 0;
    }
};

} // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Ring-coupled concurrent downconversion: analytic correlations, "
                 "steady states, fluctuation spectra and stochastic ensembles"};
    app.require_subcommand(1);

    detail::AnalyticCmd analytic_cmd;
    detail::SteadyCmd steady_cmd;
    detail::StabilityCmd stability_cmd;
    detail::SpectrumCmd spectrum_cmd;
    detail::ScanPumpCmd scan_pump_cmd;
    detail::SdeCmd sde_cmd;

    CLI::App* analytic = app.add_subcommand(
        "analytic", "ideal-coupling entanglement correlations on a time grid");
    analytic_cmd.attach(analytic);
    CLI::App* steady = app.add_subcommand("steady", "classical steady state");
    steady_cmd.attach(steady);
    CLI::App* stab = app.add_subcommand("stability", "fluctuation eigenvalues at the steady state");
    stability_cmd.attach(stab);
    CLI::App* spectrum =
        app.add_subcommand("spectrum", "output entanglement correlations versus frequency");
    spectrum_cmd.attach(spectrum);
    CLI::App* scanp = app.add_subcommand(
        "scan-pump", "minimum output correlations versus drive ratio");
    scan_pump_cmd.attach(scanp);
    CLI::App* sde = app.add_subcommand("sde", "stochastic trajectory ensemble moments");
    sde_cmd.attach(sde);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analytic) return analytic_cmd.execute();
        if (*steady) return steady_cmd.execute();
        if (*stab) return stability_cmd.execute();
        if (*spectrum) return spectrum_cmd.execute();
        if (*scanp) return scan_pump_cmd.execute();
        if (*sde) return sde_cmd.execute();
    } catch (const UsageError& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return 2;
    } catch (const ComputationError& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("quadopo");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace quadopo::cli
