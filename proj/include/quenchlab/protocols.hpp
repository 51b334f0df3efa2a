#pragma once

// model parameters, quench/drive protocols g(t), and momentum grids.

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace quenchlab {

// ------------------------------------------------------------ model params

struct ModelParams {
    double g = 0;    // transverse field
    double J2 = 0;   // next-nearest-neighbour coupling (J1 == 1 throughout)
    int L = -1;      // chain length; -1 = infinite chain

    // analytics below are controlled only at J2 = 0 and J2 = 1
    bool extrapolated_couplings() const { return !(J2 == 0.0 || J2 == 1.0); }

    void validate() const {
        if (g < 0) throw validation_error("ModelParams: g must be >= 0");
        if (L != -1 && (L < 2 || L % 2 != 0)) throw validation_error("ModelParams: L must be even and >= 2 (or -1)");
    }
};

// critical coupling of the J2 = 1 chain (pair condensation point)
inline constexpr double g_c_default = 2.47725;

// -------------------------------------------------------------- protocols

enum class RampKind { Linear, SmoothSine, Constant, SinusoidalDrive };

// g(t) for the four protocol families.  Linear crosses g_c at t_c = -tau_Q
// with rate g_c/tau_Q and stops once g_target is reached; SmoothSine is a
// half-period sine sweep 2 g_c -> g_target; SinusoidalDrive modulates a
// constant field for a finite duration and is constant afterwards.
struct RampProtocol {
    RampKind kind = RampKind::Constant;
    double tau_Q = 1;           // quench time (Linear, SmoothSine)
    double g_c = 1;             // field at the crossing, Linear normalisation
    double g_target = 0;        // final field (Linear, SmoothSine)
    double g0 = 0;              // base field (Constant, SinusoidalDrive)
    double amplitude = 0;       // drive amplitude (SinusoidalDrive)
    double omega_d = 0;         // drive frequency (SinusoidalDrive)
    double duration = 0;        // drive window (SinusoidalDrive)

    static RampProtocol linear(double tau_Q, double g_target = 0, double g_c = 1.0) {
        if (!(tau_Q > 0)) throw validation_error("linear ramp: tau_Q must be > 0");
        if (!(g_c > 0)) throw validation_error("linear ramp: g_c must be > 0");
        if (g_target < 0 || g_target > g_c) throw validation_error("linear ramp: need 0 <= g_target <= g_c");
        RampProtocol p;
        p.kind = RampKind::Linear;
        p.tau_Q = tau_Q; p.g_c = g_c; p.g_target = g_target;
        return p;
    }

    static RampProtocol smooth_sine(double tau_Q, double g_target, double g_c = g_c_default) {
        if (!(tau_Q > 0)) throw validation_error("smooth_sine ramp: tau_Q must be > 0");
        if (!(g_c > 0)) throw validation_error("smooth_sine ramp: g_c must be > 0");
        if (g_target < 0 || g_target > 2 * g_c) throw validation_error("smooth_sine ramp: need 0 <= g_target <= 2 g_c");
        RampProtocol p;
        p.kind = RampKind::SmoothSine;
        p.tau_Q = tau_Q; p.g_c = g_c; p.g_target = g_target;
        return p;
    }

    static RampProtocol constant(double g) {
        RampProtocol p;
        p.kind = RampKind::Constant;
        p.g0 = g;
        return p;
    }

    static RampProtocol sinusoidal_drive(double g, double amplitude, double omega_d, double duration) {
        if (!(omega_d > 0)) throw validation_error("sinusoidal_drive: omega_d must be > 0");
        if (!(duration >= 0)) throw validation_error("sinusoidal_drive: duration must be >= 0");
        RampProtocol p;
        p.kind = RampKind::SinusoidalDrive;
        p.g0 = g; p.amplitude = amplitude; p.omega_d = omega_d; p.duration = duration;
        return p;
    }

    // Linear bookkeeping: crossing time and stop time
    double t_cross() const { return -tau_Q; }
    double t_stop() const { return -tau_Q * g_target / g_c; }

    double t_domain_min() const {
        switch (kind) {
            case RampKind::SmoothSine: return -tau_Q * pi / 2;
            case RampKind::SinusoidalDrive: return 0;
            default: return -std::numeric_limits<double>::infinity();
        }
    }
    double t_domain_max() const {
        switch (kind) {
            case RampKind::Linear: return t_stop();
            case RampKind::SmoothSine: return tau_Q * pi / 2;
            default: return std::numeric_limits<double>::infinity();
        }
    }

    double value(double t) const {
        const double slack = 1e-9 * std::max(1.0, tau_Q);
        if (t < t_domain_min() - slack || t > t_domain_max() + slack)
            throw std::domain_error("ramp_value: t outside protocol domain");
        switch (kind) {
            case RampKind::Linear:
                // g(t) = g_c (1 - (t - t_c)/tau_Q), t_c = -tau_Q
                return g_c * (1.0 - (t - t_cross()) / tau_Q);
            case RampKind::SmoothSine:
                return g_c * (2.0 - (1.0 - g_target / (2.0 * g_c)) * (1.0 + std::sin(t / tau_Q)));
            case RampKind::Constant:
                return g0;
            case RampKind::SinusoidalDrive:
                return t <= duration ? g0 + amplitude * std::sin(omega_d * t) : g0;
        }
        return g0;  // unreachable
    }

    // time at which a Linear ramp passes a given field (descending in t)
    double time_at_field(double g) const {
        if (kind != RampKind::Linear) throw validation_error("time_at_field: Linear ramps only");
        return -tau_Q * g / g_c;
    }
};

inline double ramp_value(const RampProtocol& p, double t) { return p.value(t); }

// --------------------------------------------------------- momentum grids

enum class GridKind { Antiperiodic, Infinite };

// Antiperiodic: the L momenta +-(2m-1) pi/L of the even-parity fermion
// sector, ascending.  Infinite: N midpoint nodes on (0, pi] with uniform
// weights pi/N; mirrored they tile the circle uniformly, so smooth periodic
// integrands are integrated with spectral accuracy.
struct MomentumGrid {
    GridKind kind = GridKind::Infinite;
    int size_param = 0;            // L (antiperiodic) or node count N (infinite)
    std::vector<double> values;    // ascending
    std::vector<double> weights;   // quadrature weights (infinite grid only)

    std::vector<double> positive_values() const {
        std::vector<double> out;
        for (double k : values)
            if (k > 0) out.push_back(k);
        return out;
    }

    // measure attached to one positive node in (1/pi) * integral_0^pi dk
    // (infinite) or (2/L) * sum_{k>0} (antiperiodic)
    double positive_node_measure(std::size_t j) const {
        if (kind == GridKind::Infinite) return weights[j] / pi;
        return 2.0 / size_param;
    }
};

inline MomentumGrid momentum_grid(int L) {
    if (L < 2 || L % 2 != 0) throw validation_error("momentum_grid: L must be even and >= 2");
    MomentumGrid g;
    g.kind = GridKind::Antiperiodic;
    g.size_param = L;
    for (int m = L / 2; m >= 1; --m) g.values.push_back(-(2.0 * m - 1.0) * pi / L);
    for (int m = 1; m <= L / 2; ++m) g.values.push_back((2.0 * m - 1.0) * pi / L);
    return g;
}

inline MomentumGrid momentum_grid_infinite(int n_nodes = 2048) {
    if (n_nodes < 2) throw validation_error("momentum_grid_infinite: need >= 2 nodes");
    MomentumGrid g;
    g.kind = GridKind::Infinite;
    g.size_param = n_nodes;
    for (int j = 1; j <= n_nodes; ++j) {
        g.values.push_back((j - 0.5) * pi / n_nodes);
        g.weights.push_back(pi / n_nodes);
    }
    return g;
}

}
