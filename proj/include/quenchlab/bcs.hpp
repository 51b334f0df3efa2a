#pragma once

// self-consistent BCS treatment of the J2 = 1 chain in the kink
// representation: mean fields (rho, Delta, t_f), quasiparticle dispersion,
// critical-point and crossover locators, small-g perturbative forms.

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "pairmodel.hpp"
#include "protocols.hpp"

namespace quenchlab {

// ------------------------------------------------------------------ state

struct BcsState {
    double g = 0;
    double rho = 0;      // kink density
    double Delta = 0;    // anomalous density
    double t_f = 0;      // hopping correction
    double E0_per_site = 0;
    double residual = 0;  // max self-consistency mismatch on return
    int iterations = 0;
};

struct KinkDispersion {
    double g = 0;
    std::vector<double> k, u, v, omega;
};

namespace detail {

// periodic trapezoid nodes on [-pi, pi): uniform circle grid
inline std::vector<double> bcs_grid(int n_k) {
    std::vector<double> ks(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) ks[static_cast<std::size_t>(j)] = -pi + 2.0 * pi * j / n_k;
    return ks;
}

struct BcsFields { double rho = 0, Delta = 0, t_f = 0; };

// one application of the self-consistency map built from H_k, D_k
inline BcsFields bcs_map(double g, const BcsFields& x, const std::vector<double>& ck,
                         const std::vector<double>& sk) {
    const double A = 2.0 * (3.0 - 4.0 * x.rho);
    const double B = 2.0 * (g - 4.0 * x.t_f);
    const double C = 2.0 * (g + 4.0 * x.Delta);
    BcsFields out;
    const std::size_t n = ck.size();
    for (std::size_t j = 0; j < n; ++j) {
        double H = A - B * ck[j];
        double D = -C * sk[j];
        double w = std::sqrt(H * H + D * D);
        double vv = 0.5 * (1.0 - H / w);      // |v_k|^2
        double uv = 0.5 * D / w;              // u_k v_k
        out.rho += vv;
        out.t_f += vv * ck[j];
        out.Delta -= uv * sk[j];
    }
    out.rho /= static_cast<double>(n);
    out.t_f /= static_cast<double>(n);
    out.Delta /= static_cast<double>(n);
    return out;
}

inline double bcs_energy_per_site(double g, const BcsFields& x) {
    // J1 = J2 = 1
    return -2.0 + 6.0 * x.rho - 2.0 * g * (x.t_f + x.Delta)
           - 4.0 * (x.rho * x.rho + x.Delta * x.Delta - x.t_f * x.t_f);
}

}  // namespace detail

// near-critical window where the fixed-point map softens
inline bool bcs_near_critical(double g) { return std::abs(g - 2.48) < 0.15; }

inline BcsState solve_self_consistent(double g, int n_k = 4096, double tol = 1e-13,
                                      int max_iter = 20000,
                                      const BcsState* init = nullptr,
                                      double alpha_override = 0) {
    if (g < 0) throw validation_error("solve_self_consistent: g must be >= 0");
    if (n_k < 64) throw validation_error("solve_self_consistent: N_k must be >= 64");
    if (!(tol > 0)) throw validation_error("solve_self_consistent: tol must be > 0");
    std::vector<double> ks = detail::bcs_grid(n_k);
    std::vector<double> ck(ks.size()), sk(ks.size());
    for (std::size_t j = 0; j < ks.size(); ++j) { ck[j] = std::cos(ks[j]); sk[j] = std::sin(ks[j]); }

    detail::BcsFields x;
    if (init) { x.rho = init->rho; x.Delta = init->Delta; x.t_f = init->t_f; }
    else { x.rho = g * g / 32.0; x.Delta = g / 8.0; x.t_f = 0.0; }  // perturbative seed

    double alpha = alpha_override > 0 ? alpha_override : (bcs_near_critical(g) ? 0.1 : 0.5);
    double res = 0;
    int it = 0;
    for (; it < max_iter; ++it) {
        detail::BcsFields f = detail::bcs_map(g, x, ck, sk);
        res = std::max({std::abs(f.rho - x.rho), std::abs(f.Delta - x.Delta), std::abs(f.t_f - x.t_f)});
        x.rho = (1.0 - alpha) * x.rho + alpha * f.rho;
        x.Delta = (1.0 - alpha) * x.Delta + alpha * f.Delta;
        x.t_f = (1.0 - alpha) * x.t_f + alpha * f.t_f;
        if (res < tol) break;
    }
    if (res >= tol)
        throw numerical_error("solve_self_consistent: no convergence at g=" + std::to_string(g) +
                              ", residual=" + std::to_string(res));
    if (x.Delta < 0) x.Delta = -x.Delta;  // gauge: Delta >= 0 branch

    BcsState out;
    out.g = g;
    out.rho = x.rho; out.Delta = x.Delta; out.t_f = x.t_f;
    out.E0_per_site = detail::bcs_energy_per_site(g, x);
    out.residual = res;
    out.iterations = it + 1;
    return out;
}

// residual of a state re-evaluated on an independent grid (used by tests)
inline double self_consistency_residual(const BcsState& s, int n_k) {
    std::vector<double> ks = detail::bcs_grid(n_k);
    std::vector<double> ck(ks.size()), sk(ks.size());
    for (std::size_t j = 0; j < ks.size(); ++j) { ck[j] = std::cos(ks[j]); sk[j] = std::sin(ks[j]); }
    detail::BcsFields x{s.rho, s.Delta, s.t_f};
    detail::BcsFields f = detail::bcs_map(s.g, x, ck, sk);
    return std::max({std::abs(f.rho - x.rho), std::abs(f.Delta - x.Delta), std::abs(f.t_f - x.t_f)});
}

// g-sweep with continuation seeding inside fixed chunks of 16 points, so
// chunk-level parallel execution cannot change any result.
inline std::vector<BcsState> sweep_self_consistent(const std::vector<double>& g_values,
                                                   int n_k = 4096, double tol = 1e-13,
                                                   int max_iter = 20000) {
    constexpr std::size_t chunk = 16;
    std::vector<BcsState> out(g_values.size());
    std::size_t n_chunks = (g_values.size() + chunk - 1) / chunk;
    parallel_for(n_chunks, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            std::size_t i0 = c * chunk, i1 = std::min(g_values.size(), i0 + chunk);
            const BcsState* prev = nullptr;
            for (std::size_t i = i0; i < i1; ++i) {
                out[i] = solve_self_consistent(g_values[i], n_k, tol, max_iter, prev);
                prev = &out[i];
            }
        }
    }, 1);
    return out;
}

inline KinkDispersion dispersion(const BcsState& s, const MomentumGrid& grid) {
    KinkDispersion d;
    d.g = s.g;
    const double A = 2.0 * (3.0 - 4.0 * s.rho);
    const double B = 2.0 * (s.g - 4.0 * s.t_f);
    const double C = 2.0 * (s.g + 4.0 * s.Delta);
    for (double k : grid.values) {
        double H = A - B * std::cos(k);
        double D = -C * std::sin(k);
        double w = std::sqrt(H * H + D * D);
        double theta = std::atan2(D, H);
        d.k.push_back(k);
        d.u.push_back(std::cos(0.5 * theta));
        d.v.push_back(std::sin(0.5 * theta));
        d.omega.push_back(w);
    }
    return d;
}

// minimum quasiparticle energy of a solved state (dense grid scan)
inline double min_quasiparticle_energy(const BcsState& s, int n_k = 4096) {
    const double A = 2.0 * (3.0 - 4.0 * s.rho);
    const double B = 2.0 * (s.g - 4.0 * s.t_f);
    const double C = 2.0 * (s.g + 4.0 * s.Delta);
    double best = std::numeric_limits<double>::infinity();
    for (double k : detail::bcs_grid(n_k)) {
        double H = A - B * std::cos(k);
        double D = -C * std::sin(k);
        best = std::min(best, std::sqrt(H * H + D * D));
    }
    return best;
}

// ------------------------------------------------------------ perturbative

struct PerturbativeBcs {
    double g = 0;
    double rho = 0, Delta = 0, t_f = 0;
    double omega_gamma = 0, t_gamma = 0, t_gamma_prime = 0;  // dispersion coefficients
    bool valid = true;  // flagged false for g >= 1

    double v_k(double k) const { return -(g / 4.0) * std::sin(k) - (g * g / 24.0) * std::sin(2.0 * k); }
    double u_k(double k) const { double v = v_k(k); return std::sqrt(std::max(0.0, 1.0 - v * v)); }
    double omega_k(double k) const {
        return omega_gamma - 2.0 * t_gamma * std::cos(k) - 2.0 * t_gamma_prime * std::cos(2.0 * k);
    }
    double omega_0() const { return 6.0 - 2.0 * g - g * g / 4.0; }  // band minimum at k = 0
};

inline PerturbativeBcs perturbative_state(double g) {
    PerturbativeBcs p;
    p.g = g;
    p.rho = g * g / 32.0;
    p.Delta = g / 8.0;
    p.t_f = 0.0;
    p.omega_gamma = 6.0 + g * g / 8.0;
    p.t_gamma = g;
    p.t_gamma_prime = 3.0 * g * g / 16.0;
    p.valid = g < 1.0;
    return p;
}

// ------------------------------------------------------ critical / crossover

// peak of |dDelta/dg| via a 5-point stencil on a grid, then golden refinement
inline double locate_critical(double g_lo = 2.2, double g_hi = 2.7, int n_g = 81,
                              int n_k = 4096, double tol = 1e-13) {
    if (!(g_hi > g_lo) || n_g < 5) throw validation_error("locate_critical: bad bracket/grid");
    const double h = 1e-3;
    auto slope = [&](double g) {
        auto d = [&](double gg) { return solve_self_consistent(gg, n_k, tol).Delta; };
        return std::abs((d(g - 2 * h) - 8 * d(g - h) + 8 * d(g + h) - d(g + 2 * h)) / (12 * h));
    };
    std::vector<double> gs(static_cast<std::size_t>(n_g)), ss(static_cast<std::size_t>(n_g));
    parallel_for(static_cast<std::size_t>(n_g), [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            gs[i] = g_lo + (g_hi - g_lo) * static_cast<double>(i) / (n_g - 1);
            ss[i] = slope(gs[i]);
        }
    }, 4);
    std::size_t best = 0;
    for (std::size_t i = 1; i < gs.size(); ++i)
        if (ss[i] > ss[best]) best = i;
    if (best == 0 || best + 1 == gs.size())
        throw numerical_error("locate_critical: bracket too narrow (peak on boundary)");
    return golden_section_max(slope, gs[best - 1], gs[best + 1], 1e-5);
}

enum class CrossoverMethod { Perturbative, FullBcs };

// root of pair_gap(g) - 2 * omega_0(g) locating where one pair costs two
// free quasiparticles
inline double locate_crossover(CrossoverMethod method, double g_lo = 0.5, double g_hi = 2.0,
                               int n_k = 4096) {
    auto h = [&](double g) {
        double w0 = method == CrossoverMethod::Perturbative
                        ? perturbative_state(g).omega_0()
                        : min_quasiparticle_energy(solve_self_consistent(g, n_k), n_k);
        return pair_gap(g) - 2.0 * w0;
    };
    return bisect_root(h, g_lo, g_hi, 1e-13);
}

}
