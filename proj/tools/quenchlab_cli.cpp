// quenchlab scenario runner: `run <scenario>`, `list`, `validate <config>`.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>

#include <quenchlab/quenchlab.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace quenchlab;
using nlohmann::ordered_json;

namespace {

enum class ParamType { Int, Double, String, IntList, DoubleList };

struct ParamSpec {
    std::string key;
    ParamType type;
    std::string dflt;
    std::string help;
};

struct Scenario {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
    std::function<std::vector<std::string>(const Config&, const fs::path&)> runner;
};

const ParamSpec* find_param(const Scenario& sc, const std::string& key) {
    for (const auto& p : sc.params)
        if (p.key == key) return &p;
    return nullptr;
}

// every key present must be declared, and its value must parse as its type
void check_config(const Scenario& sc, const Config& cfg) {
    for (const auto& [key, value] : cfg.items()) {
        if (key == "scenario") {
            if (value != sc.name)
                throw validation_error("config names scenario '" + value + "' but '" + sc.name +
                                       "' was requested");
            continue;
        }
        const ParamSpec* p = find_param(sc, key);
        if (!p) throw validation_error("unknown key '" + key + "' for scenario " + sc.name);
        switch (p->type) {
            case ParamType::Int: cfg.get_int(key, 0); break;
            case ParamType::Double: cfg.get_double(key, 0); break;
            case ParamType::String: break;
            case ParamType::IntList: cfg.get_int_list(key, "0"); break;
            case ParamType::DoubleList: cfg.get_double_list(key, "0"); break;
        }
    }
}

// ---------------------------------------------------------------- helpers

const Scenario* find_scenario(const std::string& name);

// config accessor falling back to the scenario's declared default
struct P {
    const Config& cfg;
    const Scenario& sc;
    const ParamSpec& spec(const std::string& key) const {
        const ParamSpec* p = find_param(sc, key);
        if (!p) throw validation_error(sc.name + ": parameter '" + key + "' is not declared");
        return *p;
    }
    double d(const std::string& key) const { return cfg.get_double(key, std::stod(spec(key).dflt)); }
    long i(const std::string& key) const { return cfg.get_int(key, std::stol(spec(key).dflt)); }
    std::vector<double> dl(const std::string& key) const {
        return cfg.get_double_list(key, spec(key).dflt);
    }
    std::vector<int> il(const std::string& key) const {
        return cfg.get_int_list(key, spec(key).dflt);
    }
};

// one trajectory row sampler for mode-ensemble scenarios
void sample_ensemble_rows(CsvWriter& csv, ModeEnsemble& e, const RampProtocol& ramp, double t_end,
                          int n_samples) {
    double t0 = e.t;
    Observables o = measure_ensemble(e);
    csv.row({e.t, e.g, o.sx, o.zz, o.yy, rho_excitations(e, e.g)});
    for (int s = 1; s <= n_samples; ++s) {
        double t = t0 + (t_end - t0) * s / n_samples;
        e = evolve_modes(e, ramp, t);
        o = measure_ensemble(e);
        csv.row({e.t, e.g, o.sx, o.zz, o.yy, rho_excitations(e, e.g)});
    }
}

std::string tau_tag(double tau) {
    std::string s = fmt_double(tau);
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

// ED trajectory writer shared by ed-drive and crash-test
std::vector<std::string> run_ed_drive_like(const P& p, const fs::path& out, double t_end,
                                           bool spectrum_json, bool fit_json) {
    const int L = static_cast<int>(p.i("L"));
    const double g = p.d("g"), A = p.d("A"), wd = p.d("omega_d"), Td = p.d("duration");
    const double dt = p.d("dt");
    const int max_train = static_cast<int>(p.i("max_train"));

    EdState gs = ground_state_ed(L, g, 1.0);
    double sx_gs = measure(gs, g, 1.0).sx;
    RampProtocol drive = RampProtocol::sinusoidal_drive(g, A, wd, Td);
    auto traj = evolve_ed(gs, drive, 1.0, t_end, dt);

    CsvWriter csv((out / "trajectory.csv").string(),
                  {"t", "g", "sx", "zz_nn", "zz_nnn", "energy", "train_1", "train_2", "train_3",
                   "train_4"});
    double h = t_end / static_cast<double>(traj.size() - 1);
    Signal sx;
    sx.t0 = 0;
    sx.dt = h;
    for (const auto& st : traj) {
        EdObservables o = measure(st, drive.value(st.t), 1.0);
        auto dens = train_densities(st, std::max(4, max_train));
        csv.row({st.t, drive.value(st.t), o.sx, o.zz_nn, o.zz_nnn, o.energy, dens[0], dens[1],
                 dens[2], dens[3]});
        sx.values.push_back(o.sx);
    }

    std::vector<std::string> outputs{"trajectory.csv"};

    if (fit_json) {
        auto i0 = static_cast<std::size_t>(std::ceil(Td / h)) + 1;
        if (i0 + 32 > sx.size())
            throw validation_error("ed-drive: post-drive window too short for a fit");
        Signal post;
        post.t0 = i0 * h;
        post.dt = h;
        post.values.assign(sx.values.begin() + static_cast<long>(i0), sx.values.end());
        for (double& v : post.values) v -= sx_gs;
        OscillationFit f = fit_damped_sinusoid(post, pair_gap(g));
        ordered_json j;
        j["frequency"] = f.frequency;
        j["amplitude"] = f.amplitude;
        j["phase"] = f.phase;
        j["offset"] = f.offset;
        j["decay_time"] = f.decay_time;
        j["q"] = f.decay_resolved ? ordered_json(f.q) : ordered_json("inf");
        j["decay_resolved"] = f.decay_resolved;
        j["residual_rms"] = f.residual_rms;
        j["reference_frequency"] = pair_gap(g);
        j["reference_amplitude"] = post_drive_amplitude(g, A, wd, Td);
        write_json((out / "fit.json").string(), j);
        outputs.push_back("fit.json");
    }

    if (spectrum_json) {
        SpectrumOptions opt;
        opt.hann = true;
        auto peaks = spectral_peaks(sx, opt);
        ordered_json j;
        j["peaks"] = ordered_json::array();
        for (std::size_t i = 0; i < peaks.size() && i < 6; ++i)
            j["peaks"].push_back({{"omega", peaks[i].omega}, {"amplitude", peaks[i].amplitude}});
        auto dens = train_densities(traj.back(), std::max(4, max_train));
        j["train_densities_final"] = dens;
        write_json((out / "spectrum.json").string(), j);
        outputs.push_back("spectrum.json");
    }
    return outputs;
}

// ---------------------------------------------------------------- scenarios

std::vector<Scenario> make_scenarios() {
    std::vector<Scenario> v;

    v.push_back(Scenario{
        "kz-integrable",
        "linear ramps across the critical point: kink density vs the closed form, power-law fit",
        {{"tauQ_list", ParamType::DoubleList, "8,32,128", "ramp times"},
         {"N", ParamType::Int, "2048", "momentum nodes"},
         {"g_target", ParamType::Double, "0", "final field"},
         {"traj_samples", ParamType::Int, "400", "trajectory rows per ramp"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("kz-integrable")};
            auto taus = p.dl("tauQ_list");
            const int N = static_cast<int>(p.i("N"));
            const double g_target = p.d("g_target");
            const int samples = static_cast<int>(p.i("traj_samples"));
            std::vector<std::string> outputs;
            CsvWriter summary((out / "summary.csv").string(),
                              {"tauQ", "rho_numeric", "rho_closed", "ratio"});
            std::vector<double> rhos;
            for (double tau : taus) {
                MomentumGrid grid = momentum_grid_infinite(N);
                RampProtocol ramp = RampProtocol::linear(tau, g_target);
                ModeEnsemble e = ensemble_at_ramp_start(grid, ramp);
                std::string name = "trajectory_tauQ" + tau_tag(tau) + ".csv";
                CsvWriter traj((out / name).string(), {"t", "g", "sx", "zz", "yy", "rho_exc"});
                sample_ensemble_rows(traj, e, ramp, ramp.t_stop(), samples);
                double rho = rho_excitations(e, g_target);
                rhos.push_back(rho);
                double closed = kink_density_closed(tau);
                summary.row({tau, rho, closed, rho / closed});
                outputs.push_back(name);
            }
            outputs.push_back("summary.csv");
            if (taus.size() >= 3) {
                PowerLawFit f = fit_power_law(taus, rhos);
                ordered_json j;
                j["exponent"] = f.exponent;
                j["prefactor"] = f.prefactor;
                j["r_squared"] = f.r_squared;
                j["reference_exponent"] = -0.5;
                write_json((out / "powerlaw.json").string(), j);
                outputs.push_back("powerlaw.json");
            }
            return outputs;
        }});

    v.push_back(Scenario{
        "kzm-analytics",
        "numeric BdG deviations vs the closed-form oscillation over the ramp tail",
        {{"tauQ", ParamType::Double, "64", "ramp time"},
         {"N", ParamType::Int, "2048", "momentum nodes"},
         {"samples", ParamType::Int, "1200", "comparison rows"},
         {"window_start", ParamType::Double, "2", "window start after t_c, units of sqrt(tauQ)"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("kzm-analytics")};
            const double tau = p.d("tauQ");
            const int N = static_cast<int>(p.i("N"));
            const int samples = static_cast<int>(p.i("samples"));
            const double wstart = p.d("window_start");

            MomentumGrid grid = momentum_grid_infinite(N);
            RampProtocol ramp = RampProtocol::linear(tau);
            ModeEnsemble e = ensemble_at_ramp_start(grid, ramp);
            const double t_lo = -tau + wstart * std::sqrt(tau);
            const double t_hi = ramp.t_stop();
            e = evolve_modes(e, ramp, t_lo);

            CsvWriter csv((out / "comparison.csv").string(),
                          {"t", "g", "dx_numeric", "dx_formula", "dzz_numeric", "dzz_formula",
                           "dyy_numeric", "dyy_formula", "extrapolated"});
            double rho = kink_density_closed(tau);
            double max_identity = 0;
            Signal dxn, dxf;
            dxn.t0 = dxf.t0 = t_lo;
            dxn.dt = dxf.dt = (t_hi - t_lo) / samples;
            for (int s = 0; s <= samples; ++s) {
                double t = t_lo + (t_hi - t_lo) * s / samples;
                if (s > 0) e = evolve_modes(e, ramp, t);
                double g = ramp.value(t);
                Observables o = measure_ensemble(e);
                Observables gs = measure_ensemble(ground_state_ensemble(grid, g));
                KzmOscillation k = kzm_oscillation(tau, t, g);
                double dxnum = o.sx - gs.sx, dzznum = o.zz - gs.zz, dyynum = o.yy - gs.yy;
                csv.row_strings({fmt_double(t), fmt_double(g), fmt_double(dxnum),
                                 fmt_double(k.delta_x), fmt_double(dzznum), fmt_double(k.delta_zz),
                                 fmt_double(dyynum), fmt_double(k.delta_yy),
                                 k.extrapolated ? "1" : "0"});
                max_identity = std::max(max_identity,
                                        std::abs(-dzznum - g * dxnum - 2.0 * (1.0 - g) * rho));
                dxn.values.push_back(dxnum);
                dxf.values.push_back(k.delta_x);
            }

            // frequency and envelope comparison through identical extrema analysis
            auto en = signal_extrema(dxn);
            auto ef = signal_extrema(dxf);
            double freq_n = en.size() > 1 ? pi / ((en.back().t - en.front().t) / (en.size() - 1)) : 0;
            double freq_f = ef.size() > 1 ? pi / ((ef.back().t - ef.front().t) / (ef.size() - 1)) : 0;
            double env_max_rel = 0;
            for (std::size_t i = 1; i < en.size() && i < ef.size(); ++i) {
                double an = std::abs(en[i].value - en[i - 1].value) / 2;
                double af = std::abs(ef[i].value - ef[i - 1].value) / 2;
                if (af > 1e-12) env_max_rel = std::max(env_max_rel, std::abs(an - af) / af);
            }
            ordered_json j;
            j["rho_closed"] = rho;
            j["freq_numeric"] = freq_n;
            j["freq_formula"] = freq_f;
            j["freq_rel_diff"] = freq_f > 0 ? std::abs(freq_n - freq_f) / freq_f : 0.0;
            j["envelope_max_rel_diff"] = env_max_rel;
            j["identity_max_residual"] = max_identity;
            j["identity_bound_10rho2"] = 10.0 * rho * rho;
            write_json((out / "analytics.json").string(), j);
            return std::vector<std::string>{"comparison.csv", "analytics.json"};
        }});

    v.push_back(Scenario{
        "bcs-sweep",
        "self-consistent mean fields across the coupling range, with gap derivatives",
        {{"g_min", ParamType::Double, "0", "sweep start"},
         {"g_max", ParamType::Double, "2.6", "sweep end"},
         {"n_g", ParamType::Int, "105", "sweep points"},
         {"N_k", ParamType::Int, "4096", "quadrature nodes"},
         {"tol", ParamType::Double, "1e-13", "fixed-point tolerance"},
         {"max_iter", ParamType::Int, "20000", "iteration cap"},
         {"derivatives", ParamType::Int, "1", "also emit dDelta/dg (4 extra solves per point)"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("bcs-sweep")};
            const double g_min = p.d("g_min"), g_max = p.d("g_max"), tol = p.d("tol");
            const int n_g = static_cast<int>(p.i("n_g")), n_k = static_cast<int>(p.i("N_k"));
            const int max_iter = static_cast<int>(p.i("max_iter"));
            if (n_g < 2 || !(g_max > g_min))
                throw validation_error("bcs-sweep: need n_g >= 2 and g_max > g_min");
            std::vector<double> gs;
            for (int i = 0; i < n_g; ++i)
                gs.push_back(g_min + (g_max - g_min) * i / (n_g - 1));
            auto states = sweep_self_consistent(gs, n_k, tol, max_iter);
            CsvWriter csv((out / "sweep.csv").string(),
                          {"g", "rho", "Delta", "t_f", "E0_per_site", "residual", "iterations"});
            for (const auto& s : states)
                csv.row({s.g, s.rho, s.Delta, s.t_f, s.E0_per_site, s.residual,
                         static_cast<double>(s.iterations)});
            std::vector<std::string> outputs{"sweep.csv"};
            if (p.i("derivatives") != 0) {
                CsvWriter der((out / "derivatives.csv").string(), {"g", "dDelta_dg"});
                const double h = 1e-3;
                for (const auto& s : states) {
                    double gm = std::max(0.0, s.g - 2 * h);
                    auto D = [&](double gg) {
                        return solve_self_consistent(gg, n_k, tol, max_iter).Delta;
                    };
                    double slope = s.g < 2 * h
                                       ? (D(s.g + h) - D(gm)) / (s.g + h - gm)
                                       : (D(s.g - 2 * h) - 8 * D(s.g - h) + 8 * D(s.g + h) -
                                          D(s.g + 2 * h)) / (12 * h);
                    der.row({s.g, slope});
                }
                outputs.push_back("derivatives.csv");
            }
            return outputs;
        }});

    v.push_back(Scenario{
        "critical-point",
        "locate the coupling with the steepest gap growth",
        {{"g_lo", ParamType::Double, "2.2", "bracket low"},
         {"g_hi", ParamType::Double, "2.7", "bracket high"},
         {"n_g", ParamType::Int, "81", "scan points"},
         {"N_k", ParamType::Int, "4096", "quadrature nodes"},
         {"tol", ParamType::Double, "1e-13", "fixed-point tolerance"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("critical-point")};
            double gc = locate_critical(p.d("g_lo"), p.d("g_hi"), static_cast<int>(p.i("n_g")),
                                        static_cast<int>(p.i("N_k")), p.d("tol"));
            ordered_json j;
            j["g_c_bcs"] = gc;
            j["bracket"] = {p.d("g_lo"), p.d("g_hi")};
            j["n_g"] = p.i("n_g");
            write_json((out / "critical.json").string(), j);
            return std::vector<std::string>{"critical.json"};
        }});

    v.push_back(Scenario{
        "crossover",
        "field where one bound pair costs two free quasiparticles",
        {{"g_lo", ParamType::Double, "0.5", "bracket low"},
         {"g_hi", ParamType::Double, "2.0", "bracket high"},
         {"N_k", ParamType::Int, "4096", "quadrature nodes"},
         {"n_scan", ParamType::Int, "31", "rows in the comparison sweep"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("crossover")};
            const double g_lo = p.d("g_lo"), g_hi = p.d("g_hi");
            const int n_k = static_cast<int>(p.i("N_k")), n_scan = static_cast<int>(p.i("n_scan"));
            CsvWriter csv((out / "crossover.csv").string(),
                          {"g", "pair_gap", "two_omega0_pert", "two_omega0_full"});
            for (int i = 0; i < n_scan; ++i) {
                double g = g_lo + (g_hi - g_lo) * i / (n_scan - 1);
                double full = min_quasiparticle_energy(solve_self_consistent(g, n_k), n_k);
                csv.row({g, pair_gap(g), 2.0 * perturbative_state(g).omega_0(), 2.0 * full});
            }
            double rp = locate_crossover(CrossoverMethod::Perturbative, g_lo, g_hi, n_k);
            double rf = locate_crossover(CrossoverMethod::FullBcs, g_lo, g_hi, n_k);
            ordered_json j;
            j["perturbative_root"] = rp;
            j["perturbative_closed_form"] = 8.0 - 4.0 * std::sqrt(3.0);
            j["full_bcs_root"] = rf;
            write_json((out / "crossover.json").string(), j);
            return std::vector<std::string>{"crossover.csv", "crossover.json"};
        }});

    v.push_back(Scenario{
        "ed-gap",
        "finite-size spectra, pair gaps, and their infinite-size extrapolation",
        {{"g_list", ParamType::DoubleList, "0,0.25,0.5", "couplings"},
         {"L_list", ParamType::IntList, "8,10,12", "chain lengths (ascending)"},
         {"J2", ParamType::Double, "1", "next-nearest coupling"},
         {"m", ParamType::Int, "3", "levels per (g, L)"},
         {"splitting_threshold", ParamType::Double, "1e-3", "doublet detection threshold"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("ed-gap")};
            auto g_list = p.dl("g_list");
            auto L_list = p.il("L_list");
            const double J2 = p.d("J2"), thr = p.d("splitting_threshold");
            const int m = static_cast<int>(p.i("m"));
            if (m < 3) throw validation_error("ed-gap: need m >= 3 to resolve the pair gap");
            CsvWriter spec((out / "spectrum.csv").string(), {"g", "L", "level", "energy", "sector"});
            CsvWriter gaps((out / "gaps.csv").string(), {"g", "L", "gap"});
            ordered_json arr = ordered_json::array();
            for (double g : g_list) {
                for (int L : L_list) {
                    SpectrumResult sp = lowest_eigenpairs(L, g, J2, m);
                    for (std::size_t lvl = 0; lvl < sp.energies.size(); ++lvl)
                        spec.row_strings({fmt_double(g), std::to_string(L),
                                          std::to_string(lvl), fmt_double(sp.energies[lvl]),
                                          sp.sectors[lvl]});
                    double gap = (sp.energies[1] - sp.energies[0] < thr)
                                     ? sp.energies[2] - sp.energies[0]
                                     : sp.energies[1] - sp.energies[0];
                    gaps.row({g, static_cast<double>(L), gap});
                }
                PairGapResult r = pair_gap_ed(g, J2, L_list, thr);
                ordered_json j;
                j["g"] = g;
                j["gap_extrapolated"] = r.gap_extrapolated;
                j["fit_c"] = r.fit_c;
                j["fit_ell"] = r.fit_ell;
                j["fit_residual"] = r.fit_residual;
                j["non_monotone"] = r.non_monotone;
                j["gap_formula_second_order"] = 8.0 - 0.75 * g * g;
                arr.push_back(j);
            }
            write_json((out / "extrapolation.json").string(), arr);
            return std::vector<std::string>{"spectrum.csv", "gaps.csv", "extrapolation.json"};
        }});

    v.push_back(Scenario{
        "ed-drive",
        "resonantly driven chain: trajectory and post-drive ringing fit",
        {{"L", ParamType::Int, "12", "chain length"},
         {"g", ParamType::Double, "0.25", "base field"},
         {"A", ParamType::Double, "0.005", "drive amplitude"},
         {"omega_d", ParamType::Double, "8", "drive frequency"},
         {"duration", ParamType::Double, "6.283185307179586", "drive window"},
         {"post_periods", ParamType::Double, "20", "ring-down periods to record"},
         {"dt", ParamType::Double, "0.02", "step"},
         {"max_train", ParamType::Int, "4", "longest train density recorded"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("ed-drive")};
            double T = 2 * pi / pair_gap(p.d("g"));
            double t_end = p.d("duration") + p.d("post_periods") * T;
            return run_ed_drive_like(p, out, t_end, false, true);
        }});

    v.push_back(Scenario{
        "crash-test",
        "strong kick far off the linear regime: spectral content and train census",
        {{"L", ParamType::Int, "12", "chain length"},
         {"g", ParamType::Double, "0", "base field"},
         {"A", ParamType::Double, "0.5", "drive amplitude"},
         {"omega_d", ParamType::Double, "8", "drive frequency"},
         {"duration", ParamType::Double, "6.283185307179586", "drive window"},
         {"t_end", ParamType::Double, "25.132741228718345", "total record"},
         {"dt", ParamType::Double, "0.02", "step"},
         {"max_train", ParamType::Int, "4", "longest train density recorded"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("crash-test")};
            return run_ed_drive_like(p, out, p.d("t_end"), true, false);
        }});

    v.push_back(Scenario{
        "pair-drive",
        "driven bosonic pair oscillator: response curve and post-drive fit",
        {{"g", ParamType::Double, "0", "base field"},
         {"A", ParamType::Double, "0.005", "drive amplitude"},
         {"omega_d", ParamType::Double, "8", "drive frequency"},
         {"duration", ParamType::Double, "6.283185307179586", "drive window"},
         {"t_end", ParamType::Double, "12.566370614359172", "total record"},
         {"dt", ParamType::Double, "0.001", "integrator step"},
         {"sample_dt", ParamType::Double, "0.01", "output sample spacing"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("pair-drive")};
            const double g = p.d("g"), A = p.d("A"), wd = p.d("omega_d"), Td = p.d("duration");
            const double t_end = p.d("t_end");
            if (!(t_end > Td)) throw validation_error("pair-drive: t_end must exceed duration");
            RampProtocol drive = RampProtocol::sinusoidal_drive(g, A, wd, Td);
            DrivenResponse r = driven_response(g, drive, t_end, p.d("dt"), p.d("sample_dt"));
            CsvWriter csv((out / "response.csv").string(), {"t", "delta_g", "x", "zz_prediction"});
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                double t = r.x.time(i);
                csv.row({t, drive.value(t) - g, r.x.values[i], r.zz_prediction.values[i]});
            }
            auto i0 = static_cast<std::size_t>(std::ceil(Td / r.x.dt)) + 1;
            if (i0 + 32 > r.x.size())
                throw validation_error("pair-drive: post-drive window too short for a fit");
            Signal post;
            post.t0 = r.x.time(i0);
            post.dt = r.x.dt;
            post.values.assign(r.x.values.begin() + static_cast<long>(i0), r.x.values.end());
            OscillationFit f = fit_damped_sinusoid(post, pair_gap(g));
            ordered_json j;
            j["frequency"] = f.frequency;
            j["amplitude"] = f.amplitude;
            j["residual_rms"] = f.residual_rms;
            j["reference_frequency"] = pair_gap(g);
            j["reference_amplitude"] = post_drive_amplitude(g, A, wd, Td);
            j["rho_pair"] = r.rho_pair;
            j["pair_density_term_omitted"] = r.pair_density_term_omitted;
            write_json((out / "fit.json").string(), j);
            return std::vector<std::string>{"response.csv", "fit.json"};
        }});

    v.push_back(Scenario{
        "amplitude-scan",
        "drive-amplitude scan: hard-core saturation of the chain vs the linear oscillator",
        {{"L", ParamType::Int, "12", "chain length"},
         {"g", ParamType::Double, "0", "base field"},
         {"A_list", ParamType::DoubleList, "0.01,0.02,0.04,0.08,0.16,0.32", "drive amplitudes"},
         {"omega_d", ParamType::Double, "8", "drive frequency"},
         {"duration", ParamType::Double, "6.283185307179586", "drive window"},
         {"post_periods", ParamType::Double, "4", "ring-down periods to record"},
         {"dt", ParamType::Double, "0.02", "step"}},
        [](const Config& cfg, const fs::path& out) {
            P p{cfg, *find_scenario("amplitude-scan")};
            const int L = static_cast<int>(p.i("L"));
            const double g = p.d("g"), wd = p.d("omega_d"), Td = p.d("duration");
            const double w = pair_gap(g);
            const double t_end = Td + p.d("post_periods") * 2 * pi / w;
            EdState gs = ground_state_ed(L, g, 1.0);
            double sx_gs = measure(gs, g, 1.0).sx;
            CsvWriter csv((out / "scan.csv").string(),
                          {"A", "amp_oscillator", "amp_ed", "ratio"});
            std::vector<double> ratios;
            for (double A : p.dl("A_list")) {
                RampProtocol drive = RampProtocol::sinusoidal_drive(g, A, wd, Td);
                auto traj = evolve_ed(gs, drive, 1.0, t_end, p.d("dt"));
                double h = t_end / static_cast<double>(traj.size() - 1);
                auto i0 = static_cast<std::size_t>(std::ceil(Td / h)) + 1;
                double lo = 1e300, hi = -1e300;
                for (std::size_t i = i0; i < traj.size(); ++i) {
                    double dx = measure(traj[i], g, 1.0).sx - sx_gs;
                    lo = std::min(lo, dx);
                    hi = std::max(hi, dx);
                }
                double amp_ed = 0.5 * (hi - lo);
                double amp_osc = post_drive_amplitude(g, A, wd, Td);
                csv.row({A, amp_osc, amp_ed, amp_ed / amp_osc});
                ratios.push_back(amp_ed / amp_osc);
            }
            bool weakly_decreasing = true;
            for (std::size_t i = 1; i < ratios.size(); ++i)
                if (ratios[i] > ratios[i - 1] + 1e-6) weakly_decreasing = false;
            ordered_json j;
            j["ratio_weakly_decreasing"] = weakly_decreasing;
            j["ratios"] = ratios;
            write_json((out / "scan.json").string(), j);
            return std::vector<std::string>{"scan.csv", "scan.json"};
        }});

    return v;
}

const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> v = make_scenarios();
    return v;
}

const Scenario* find_scenario(const std::string& name) {
    for (const auto& s : scenarios())
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quenchlab: quench-dynamics scenarios for the NNN transverse-field Ising chain"};
    app.require_subcommand(1);

    std::string run_name, run_config, run_out;
    CLI::App* cmd_run = app.add_subcommand("run", "run a scenario");
    cmd_run->add_option("scenario", run_name, "scenario name (see `list`)")->required();
    cmd_run->add_option("--config", run_config, "flat key=value config file");
    cmd_run->add_option("--out", run_out, "output directory (default out/<scenario>)");
    cmd_run->allow_extras();

    CLI::App* cmd_list = app.add_subcommand("list", "list scenarios and their parameters");

    std::string val_config, val_name;
    CLI::App* cmd_validate = app.add_subcommand("validate", "check a config without running");
    cmd_validate->add_option("config", val_config, "config file; must name its scenario")->required();
    cmd_validate->add_option("--scenario", val_name, "scenario to validate against");
    cmd_validate->allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_list->parsed()) {
            for (const auto& sc : scenarios()) {
                std::cout << sc.name << "\n  " << sc.summary << "\n";
                for (const auto& p : sc.params)
                    std::cout << "    " << p.key << " = " << p.dflt << "  (" << p.help << ")\n";
            }
            return 0;
        }

        // fold `--key value` extras into the config
        auto apply_extras = [](Config& cfg, const std::vector<std::string>& extras) {
            for (std::size_t i = 0; i < extras.size(); i += 2) {
                const std::string& k = extras[i];
                if (k.size() < 3 || k.substr(0, 2) != "--")
                    throw validation_error("expected --key value pairs, got '" + k + "'");
                if (i + 1 >= extras.size())
                    throw validation_error("flag '" + k + "' is missing a value");
                cfg.set(k.substr(2), extras[i + 1]);
            }
        };

        if (cmd_validate->parsed()) {
            Config cfg = Config::from_file(val_config);
            apply_extras(cfg, cmd_validate->remaining());
            std::string name = !val_name.empty() ? val_name : cfg.get_string("scenario", "");
            if (name.empty())
                throw validation_error("config has no 'scenario' key and --scenario not given");
            const Scenario* sc = find_scenario(name);
            if (!sc) throw validation_error("unknown scenario '" + name + "'");
            check_config(*sc, cfg);
            std::cout << "ok: " << name << "\n";
            return 0;
        }

        // run
        const Scenario* sc = find_scenario(run_name);
        if (!sc) throw validation_error("unknown scenario '" + run_name + "'");
        Config cfg;
        if (!run_config.empty()) cfg = Config::from_file(run_config);
        apply_extras(cfg, cmd_run->remaining());
        check_config(*sc, cfg);

        fs::path out = run_out.empty() ? fs::path("out") / sc->name : fs::path(run_out);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw validation_error("cannot create output directory " + out.string());

        auto t0 = std::chrono::steady_clock::now();
        std::vector<std::string> outputs = sc->runner(cfg, out);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(out.string(), sc->name, cfg, outputs, wall, worker_count());
        std::cout << "wrote " << outputs.size() + 1 << " files to " << out.string() << "\n";
        return 0;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
