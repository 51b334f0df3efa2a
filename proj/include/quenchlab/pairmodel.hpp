#pragma once

// effective bosonic pair model: second-order coefficient assembly, pair
// dispersion/gap, the driven-oscillator response, and kink-train energies.

#include <cmath>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "protocols.hpp"

namespace quenchlab {

// ------------------------------------------------------------ coefficients

struct PairContribution {
    std::string label;
    double value = 0;
};

struct PairCoefficients {
    double g = 0;
    double omega_b = 0;    // pair on-site energy
    double t_b = 0;        // NN pair hopping
    double t_b_prime = 0;  // NNN pair hopping
    std::vector<PairContribution> contributions;  // the six partial terms
    bool valid = true;     // flagged false for g >= 1
};

inline PairCoefficients pair_coefficients(double g) {
    PairCoefficients c;
    c.g = g;
    double g2 = g * g;
    c.contributions = {
        {"omega_b_1", 8.0 + 3.0 * g2 / 8.0},
        {"omega_b_2", -g2 / 2.0},
        {"omega_b_3", -g2 / 8.0},
        {"t_b_1", -g2 / 8.0},
        {"t_b_2", g2 / 4.0},
        {"t_b_prime_1", g2 / 16.0},
        {"t_b_prime_3", g2 / 16.0},
    };
    c.omega_b = c.contributions[0].value + c.contributions[1].value + c.contributions[2].value;
    c.t_b = c.contributions[3].value + c.contributions[4].value;
    c.t_b_prime = c.contributions[5].value + c.contributions[6].value;
    c.valid = g < 1.0;
    return c;
}

// zero-quasimomentum pair energy: omega_b - 2 t_b - 2 t_b' = 8 - (3/4) g^2
inline double pair_gap(double g) {
    PairCoefficients c = pair_coefficients(g);
    return c.omega_b - 2.0 * c.t_b - 2.0 * c.t_b_prime;
}

inline double pair_dispersion(double g, double k) {
    PairCoefficients c = pair_coefficients(g);
    return c.omega_b - 2.0 * c.t_b * std::cos(k) - 2.0 * c.t_b_prime * std::cos(2.0 * k);
}

// ---------------------------------------------------------- driven response

struct DrivenResponse {
    double g = 0;
    RampProtocol drive;
    Signal x;              // <sigma^x> - <sigma^x>_GS per site
    Signal zz_prediction;  // (g/2) * x(t); pair-density term intentionally omitted
    double rho_pair = 0;   // coherent-state pair density estimate from max |x|
    bool pair_density_term_omitted = true;
};

// x'' + omega^2 x = -2 omega dg(t), started at rest; dg(t) = drive value
// minus the base field g.
inline DrivenResponse driven_response(double g, const RampProtocol& drive, double t_end,
                                      double dt = 1e-3, double sample_dt = 0) {
    if (drive.kind != RampKind::SinusoidalDrive && drive.kind != RampKind::Constant)
        throw validation_error("driven_response: drive must be SinusoidalDrive or Constant");
    if (!(t_end > 0)) throw validation_error("driven_response: t_end must be > 0");
    if (!(dt > 0)) throw validation_error("driven_response: dt must be > 0");
    if (sample_dt <= 0) sample_dt = dt;
    long stride = std::max(1L, static_cast<long>(std::llround(sample_dt / dt)));

    const double w = pair_gap(g);
    auto dg = [&](double t) { return drive.value(t) - g; };

    long nst = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / static_cast<double>(nst);

    DrivenResponse out;
    out.g = g;
    out.drive = drive;
    out.x.t0 = 0;
    out.x.dt = h * static_cast<double>(stride);
    double x = 0, p = 0;  // displacement, velocity
    out.x.values.push_back(x);
    auto rhs = [&](double t, double xx, double pp, double& dx, double& dp) {
        dx = pp;
        dp = -w * w * xx - 2.0 * w * dg(t);
    };
    for (long s = 0; s < nst; ++s) {
        double t = h * static_cast<double>(s);
        double k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
        rhs(t, x, p, k1x, k1p);
        rhs(t + 0.5 * h, x + 0.5 * h * k1x, p + 0.5 * h * k1p, k2x, k2p);
        rhs(t + 0.5 * h, x + 0.5 * h * k2x, p + 0.5 * h * k2p, k3x, k3p);
        rhs(t + h, x + h * k3x, p + h * k3p, k4x, k4p);
        x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if ((s + 1) % stride == 0) out.x.values.push_back(x);
    }

    out.zz_prediction.t0 = out.x.t0;
    out.zz_prediction.dt = out.x.dt;
    for (double xv : out.x.values) out.zz_prediction.values.push_back(0.5 * g * xv);
    double xmax = 0;
    for (double xv : out.x.values) xmax = std::max(xmax, std::abs(xv));
    out.rho_pair = 0.25 * xmax * xmax;  // n/L = |beta|^2/L with x = 2|beta|/sqrt(L)
    return out;
}

// closed-form amplitude of the free oscillation left after a sinusoidal
// drive A sin(omega_d t) acting on [0, T]:  x'' + w^2 x = -2 w A sin(omega_d t)
// from rest, then amp = sqrt(x_T^2 + (v_T / w)^2).
inline double post_drive_amplitude(double g, double amplitude, double omega_d, double duration) {
    if (!(duration > 0)) throw validation_error("post_drive_amplitude: duration must be > 0");
    const double w = pair_gap(g);
    double xT, vT;
    if (std::abs(w - omega_d) < 1e-9 * w) {
        // resonant: x = A t cos(w t) - (A / w) sin(w t)
        double th = w * duration;
        xT = amplitude * duration * std::cos(th) - amplitude / w * std::sin(th);
        vT = -amplitude * w * duration * std::sin(th);
    } else {
        double B = -2.0 * w * amplitude / (w * w - omega_d * omega_d);
        double C = -B * omega_d / w;
        xT = B * std::sin(omega_d * duration) + C * std::sin(w * duration);
        vT = B * omega_d * std::cos(omega_d * duration) + C * w * std::cos(w * duration);
    }
    return std::hypot(xT, vT / w);
}

// ------------------------------------------------------------ train energy

// energy cost of an exact-length-n kink train over the g = 0 ground state
inline double train_energy(int n) {
    if (n < 0) throw validation_error("train_energy: n must be >= 0");
    if (n == 0) return 0.0;
    return 2.0 * n + 4.0;
}

}
