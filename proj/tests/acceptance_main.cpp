// acceptance gate: one PASS/FAIL line per criterion, exit code = #failures.
// Each check pins a physics result at its stated tolerance; nothing here is
// tuned to the implementation.

#include <quenchlab/quenchlab.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace quenchlab;

namespace {

int g_failures = 0;

void report(const std::string& idx, bool pass, const std::string& detail, double secs) {
    std::printf("%s criterion %-3s %s  [%.1fs]\n", pass ? "PASS" : "FAIL", (idx + ":").c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

template <typename F>
void criterion(const std::string& idx, F&& body) {
    Timer tm;
    try {
        auto [pass, detail] = body();
        report(idx, pass, detail, tm.secs());
    } catch (const std::exception& e) {
        report(idx, false, std::string("exception: ") + e.what(), tm.secs());
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

// parabolically refined interior extrema of a sampled signal
struct RefExtremum {
    double t = 0, v = 0;
};

std::vector<RefExtremum> refined_extrema(const Signal& s) {
    std::vector<RefExtremum> out;
    for (const Extremum& e : signal_extrema(s)) {
        auto i = static_cast<std::size_t>(std::llround((e.t - s.t0) / s.dt));
        if (i == 0 || i + 1 >= s.size()) continue;
        double a = s.values[i - 1], b = s.values[i], c = s.values[i + 1];
        double denom = a - 2.0 * b + c;
        double dx = denom == 0 ? 0.0 : 0.5 * (a - c) / denom;
        out.push_back({s.time(i) + dx * s.dt, b - 0.25 * (a - c) * dx});
    }
    if (out.size() > 2) {  // clip window-edge artifacts
        out.erase(out.begin());
        out.pop_back();
    }
    return out;
}

// half peak-to-trough amplitudes between successive extrema, stamped at midpoints
std::vector<RefExtremum> envelope_points(const std::vector<RefExtremum>& ex) {
    std::vector<RefExtremum> out;
    for (std::size_t i = 1; i < ex.size(); ++i)
        out.push_back({0.5 * (ex[i].t + ex[i - 1].t), 0.5 * std::abs(ex[i].v - ex[i - 1].v)});
    return out;
}

// nearest-time pairing within a tolerance
std::vector<std::pair<RefExtremum, RefExtremum>> pair_nearest(
    const std::vector<RefExtremum>& a, const std::vector<RefExtremum>& b, double tol) {
    std::vector<std::pair<RefExtremum, RefExtremum>> out;
    std::size_t j = 0;
    for (const auto& ea : a) {
        while (j + 1 < b.size() && std::abs(b[j + 1].t - ea.t) < std::abs(b[j].t - ea.t)) ++j;
        if (!b.empty() && std::abs(b[j].t - ea.t) < tol) out.emplace_back(ea, b[j]);
    }
    return out;
}

}  // namespace

int main() {
    std::printf("acceptance gate: quench dynamics of the NNN transverse-field Ising chain\n");
    std::fflush(stdout);

    // ---- 1 & 2: kink density scaling and the per-mode two-level sweep law
    ModeEnsemble e32_final;  // shared with criterion 2
    std::vector<double> taus{8.0, 32.0, 128.0};
    double fitted_exponent = 0;
    bool exponent_ok = false;

    criterion("1", [&]() -> std::pair<bool, std::string> {
        const int N = 2048;
        std::vector<double> rhos;
        double worst = 0;
        for (double tau : taus) {
            RampProtocol ramp = RampProtocol::linear(tau);
            ModeEnsemble e = ensemble_at_ramp_start(momentum_grid_infinite(N), ramp);
            e = evolve_modes(e, ramp, ramp.t_stop());
            if (tau == 32.0) e32_final = e;
            double rho = rho_excitations(e, 0.0);
            rhos.push_back(rho);
            worst = std::max(worst, std::abs(rho / kink_density_closed(tau) - 1.0));
        }
        PowerLawFit f = fit_power_law(taus, rhos);
        fitted_exponent = f.exponent;
        bool rho_ok = worst <= 0.03;
        exponent_ok = std::abs(f.exponent + 0.5) <= 0.02;
        return {rho_ok && exponent_ok, "kink density vs 1/(2 pi sqrt(2 tau_Q)): worst rel dev " +
                                           fmt(worst) + ", power-law exponent " + fmt(f.exponent)};
    });

    criterion("2", [&]() -> std::pair<bool, std::string> {
        if (e32_final.modes.empty()) return {false, "tau_Q = 32 ensemble unavailable"};
        double worst = 0;
        int counted = 0;
        for (const auto& m : e32_final.modes) {
            double p_lz = lz_probability(32.0, m.k);
            if (p_lz <= 1e-4) continue;
            ++counted;
            worst = std::max(worst, std::abs(excitation_probability(m, 0.0) - p_lz));
        }
        return {worst < 0.02 && counted > 0, "two-level sweep law over " + std::to_string(counted) +
                                                 " modes with p > 1e-4: max |dev| = " + fmt(worst)};
    });

    // ---- 3: closed-form oscillation of the deviations after the crossing
    criterion("3", [&]() -> std::pair<bool, std::string> {
        const double tau = 64.0;
        const int N = 2048, samples = 1200;
        MomentumGrid grid = momentum_grid_infinite(N);
        RampProtocol ramp = RampProtocol::linear(tau);
        ModeEnsemble e = ensemble_at_ramp_start(grid, ramp);
        const double t_lo = -tau + 2.0 * std::sqrt(tau), t_hi = ramp.t_stop();
        e = evolve_modes(e, ramp, t_lo);
        double rho = kink_density_closed(tau);

        Signal num, frm;
        num.t0 = frm.t0 = t_lo;
        num.dt = frm.dt = (t_hi - t_lo) / samples;
        double max_identity = 0;
        for (int s = 0; s <= samples; ++s) {
            double t = t_lo + (t_hi - t_lo) * s / samples;
            if (s > 0) e = evolve_modes(e, ramp, t);
            double g = ramp.value(t);
            Observables o = measure_ensemble(e);
            Observables gs = measure_ensemble(ground_state_ensemble(grid, g));
            double dx = o.sx - gs.sx, dzz = o.zz - gs.zz;
            num.values.push_back(dx);
            frm.values.push_back(kzm_oscillation(tau, t, g).delta_x);
            max_identity =
                std::max(max_identity, std::abs(-dzz - g * dx - 2.0 * (1.0 - g) * rho));
        }

        auto exn = refined_extrema(num), exf = refined_extrema(frm);
        if (exn.size() < 10 || exf.size() < 10)
            return {false, "too few oscillation extrema in the window"};
        double freq_n = pi * static_cast<double>(exn.size() - 1) / (exn.back().t - exn.front().t);
        double freq_f = pi * static_cast<double>(exf.size() - 1) / (exf.back().t - exf.front().t);
        double freq_dev = std::abs(freq_n / freq_f - 1.0);

        auto pairs = pair_nearest(envelope_points(exn), envelope_points(exf), 0.3);
        if (pairs.size() < 10) return {false, "envelope pairing failed"};
        double env_dev = 0;
        for (const auto& [pn, pf] : pairs)
            env_dev = std::max(env_dev, std::abs(pn.v / pf.v - 1.0));

        bool pass = freq_dev < 0.02 && env_dev < 0.10 && max_identity <= 10.0 * rho * rho;
        return {pass, "freq dev " + fmt(freq_dev) + ", envelope dev " + fmt(env_dev) +
                          ", identity residual " + fmt(max_identity) + " vs bound " +
                          fmt(10.0 * rho * rho)};
    });

    // ---- 4: critical point of the self-consistent pairing theory
    criterion("4", [&]() -> std::pair<bool, std::string> {
        double gc = locate_critical();
        return {std::abs(gc - 2.48135) <= 0.005, "steepest gap growth at g = " + fmt(gc)};
    });

    // ---- 5: self-consistent fields track the perturbative forms at small g
    criterion("5", [&]() -> std::pair<bool, std::string> {
        bool pass = true;
        std::string detail;
        for (double g : {0.1, 0.2, 0.4}) {
            BcsState s = solve_self_consistent(g);
            double dd = std::abs(s.Delta - g / 8.0), dr = std::abs(s.rho - g * g / 32.0);
            pass = pass && dd <= g * g * g && dr <= g * g * g * g;
            detail += (detail.empty() ? "" : "; ") + ("g=" + fmt(g) + " |dDelta|=" + fmt(dd) +
                                                      " |drho|=" + fmt(dr));
        }
        return {pass, detail};
    });

    // ---- 6: extrapolated pair gap vs second-order form
    criterion("6", [&]() -> std::pair<bool, std::string> {
        PairGapResult r0 = pair_gap_ed(0.0, 1.0, {8, 10, 12});
        double d0 = std::abs(r0.gap_extrapolated - 8.0);
        bool pass = d0 < 1e-9;
        std::string detail = "g=0 gap dev " + fmt(d0);
        for (double g : {0.25, 0.5}) {
            PairGapResult r = pair_gap_ed(g, 1.0, {8, 10, 12, 14});
            double ref = 8.0 - 0.75 * g * g;
            double rel = std::abs(r.gap_extrapolated / ref - 1.0);
            pass = pass && rel <= 0.02 && !r.non_monotone;
            detail += "; g=" + fmt(g) + " gap " + fmt(r.gap_extrapolated) + " vs " + fmt(ref) +
                      " (rel " + fmt(rel) + ")";
        }
        return {pass, detail};
    });

    // ---- 7: bound-pair vs two-quasiparticle crossover roots
    criterion("7", [&]() -> std::pair<bool, std::string> {
        double closed = 8.0 - 4.0 * std::sqrt(3.0);
        double rp = locate_crossover(CrossoverMethod::Perturbative);
        double rf = locate_crossover(CrossoverMethod::FullBcs);
        bool pass = std::abs(rp - closed) < 1e-12 && rf >= 1.05 && rf <= 1.15;
        return {pass, "perturbative root " + fmt(rp) + " (|dev| " + fmt(std::abs(rp - closed)) +
                          "), full root " + fmt(rf)};
    });

    // ---- 8 & 10a: driven resonance ring-down, then the long coherence window
    const int L = 12;
    const double g8 = 0.25, A8 = 0.005, wd8 = 8.0, Td8 = 2.0 * pi;
    const double w_pair = pair_gap(g8), T_pair = 2.0 * pi / w_pair;
    Signal post_long;  // shared with 10a

    criterion("8", [&]() -> std::pair<bool, std::string> {
        EdState gs = ground_state_ed(L, g8, 1.0);
        double sx_gs = measure(gs, g8, 1.0).sx;
        RampProtocol drive = RampProtocol::sinusoidal_drive(g8, A8, wd8, Td8);
        const double t_end = Td8 + 200.0 * T_pair;
        auto traj = evolve_ed(gs, drive, 1.0, t_end, 0.02);
        double h = t_end / static_cast<double>(traj.size() - 1);
        auto i0 = static_cast<std::size_t>(std::ceil(Td8 / h)) + 1;

        post_long.t0 = h * static_cast<double>(i0);
        post_long.dt = h;
        for (std::size_t i = i0; i < traj.size(); ++i)
            post_long.values.push_back(measure(traj[i], g8, 1.0).sx - sx_gs);

        Signal post20 = post_long;  // first 20 ring-down periods
        auto n20 = static_cast<std::size_t>(20.0 * T_pair / h);
        post20.values.resize(std::min(post20.values.size(), n20));

        OscillationFit f = fit_damped_sinusoid(post20, w_pair);
        double ref_amp = post_drive_amplitude(g8, A8, wd8, Td8);
        double fdev = std::abs(f.frequency / w_pair - 1.0);
        double adev = std::abs(f.amplitude / ref_amp - 1.0);
        bool pass = fdev < 0.01 && adev < 0.10;
        return {pass, "ring-down freq " + fmt(f.frequency) + " vs " + fmt(w_pair) + " (rel " +
                          fmt(fdev) + "), amplitude " + fmt(f.amplitude) + " vs " + fmt(ref_amp) +
                          " (rel " + fmt(adev) + ")"};
    });

    // ---- 9: strong kick -- spectral peaks at 8 and 4, length-4 train density
    criterion("9", [&]() -> std::pair<bool, std::string> {
        EdState gs = ground_state_ed(L, 0.0, 1.0);
        RampProtocol drive = RampProtocol::sinusoidal_drive(0.0, 0.5, 8.0, 2.0 * pi);
        const double t_end = 8.0 * pi;
        auto traj = evolve_ed(gs, drive, 1.0, t_end, 0.02);
        double h = t_end / static_cast<double>(traj.size() - 1);

        Signal sx;
        sx.t0 = 0;
        sx.dt = h;
        double dens4 = 0;
        int n_post = 0;
        for (const auto& st : traj) {
            sx.values.push_back(measure(st, drive.value(st.t), 1.0).sx);
            if (st.t >= 2.0 * pi) {
                dens4 += train_densities(st, 4)[3];
                ++n_post;
            }
        }
        dens4 /= n_post;

        SpectrumOptions opt;
        opt.hann = true;
        auto peaks = spectral_peaks(sx, opt);
        bool has8 = false, has4 = false;
        for (const auto& p : peaks) {
            if (std::abs(p.omega - 8.0) < 0.3) has8 = true;
            if (std::abs(p.omega - 4.0) < 0.3) has4 = true;
        }
        bool dens_ok = dens4 >= 1e-3 / 3.0 && dens4 <= 3e-3;
        return {has8 && has4 && dens_ok,
                std::string("peaks at 8: ") + (has8 ? "yes" : "no") + ", at 4: " +
                    (has4 ? "yes" : "no") + "; mean post-kick 4-train density " + fmt(dens4)};
    });

    // ---- 10: coherence window and the Q-fitting pipeline
    criterion("10", [&]() -> std::pair<bool, std::string> {
        // (a) no resolved decay over a 200-period ring-down at L = 12
        if (post_long.values.size() < 100) return {false, "ring-down record unavailable"};
        OscillationFit fa = fit_damped_sinusoid(post_long, w_pair);
        bool a_ok = !fa.decay_resolved;

        // (b) synthetic Q recovery within 2%
        bool b_ok = true;
        std::string bdet;
        for (double Q : {4.0e3, 8.0e3, 4.6e5}) {
            const double w = 8.0, T = 2.0 * pi / w, tauD = Q * T;
            Signal s;
            s.t0 = 0;
            s.dt = T / 4.0;
            auto n = static_cast<std::size_t>(std::llround(tauD / 80.0 / s.dt)) + 1;
            for (std::size_t i = 0; i < n; ++i) {
                double t = s.dt * static_cast<double>(i);
                s.values.push_back(0.02 * std::exp(-t / tauD) * std::cos(w * t + 0.3) + 0.004);
            }
            OscillationFit f = fit_damped_sinusoid(s, w);
            double rel = std::abs(f.q / Q - 1.0);
            b_ok = b_ok && f.decay_resolved && rel <= 0.02;
            bdet += " Q=" + fmt(Q) + "->" + fmt(f.q);
        }

        // (c) the -0.5 scaling exponent, established under criterion 1
        bool c_ok = exponent_ok;
        bool pass = a_ok && b_ok && c_ok;
        return {pass, std::string("(a) 200-period decay resolved: ") +
                          (fa.decay_resolved ? "yes" : "no") + "; (b)" + bdet +
                          "; (c) exponent " + fmt(fitted_exponent)};
    });

    // ---- 11: ED ground energy vs the free-fermion sum at J2 = 0
    criterion("11", [&]() -> std::pair<bool, std::string> {
        bool pass = true;
        std::string detail;
        for (double g : {0.5, 1.5}) {
            EdState gs = ground_state_ed(12, g, 0.0);
            double e_ed = measure(gs, g, 0.0).energy / 12.0;
            double e_ff = measure_ensemble(ground_state_ensemble(momentum_grid(12), g)).energy;
            double dev = std::abs(e_ed - e_ff);
            pass = pass && dev <= 1e-9;
            detail += (detail.empty() ? "" : "; ") + ("g=" + fmt(g) + " |dev|=" + fmt(dev));
        }
        return {pass, detail};
    });

    std::printf("%d of 11 criteria failed\n", g_failures);
    return g_failures;
}
