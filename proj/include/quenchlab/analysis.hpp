#pragma once

// uniform time-series container plus spectral and least-squares estimators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "errors.hpp"
#include "numerics.hpp"

namespace quenchlab {

// ------------------------------------------------------------------ signal

struct Signal {
    double t0 = 0;
    double dt = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double duration() const { return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1); }

    void validate() const {
        if (!(dt > 0)) throw validation_error("Signal: dt must be > 0");
        if (values.size() < 16) throw validation_error("Signal: need >= 16 samples");
    }
};

// ------------------------------------------------------------ FFT spectrum

struct SpectralPeak {
    double omega = 0;      // angular frequency
    double amplitude = 0;  // sinusoid amplitude estimate
};

struct SpectrumOptions {
    bool hann = false;     // Hann taper (use for short records / close peaks)
    int pad_factor = 8;    // zero padding multiple before the FFT
};

namespace detail {

// magnitude spectrum with window normalisation baked in; bins up to M/2
struct MagSpectrum {
    std::vector<double> mag;  // |X_m| * 2 / sum(window)
    double domega = 0;        // bin spacing
};

inline MagSpectrum magnitude_spectrum(const Signal& s, const SpectrumOptions& opt) {
    s.validate();
    std::size_t n = s.size();
    std::vector<double> y(s.values);
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : y) v -= mean;
    double wsum = 0;
    if (opt.hann) {
        for (std::size_t i = 0; i < n; ++i) {
            double w = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n - 1)));
            y[i] *= w;
            wsum += w;
        }
    } else {
        wsum = static_cast<double>(n);
    }
    std::size_t m = 1;
    std::size_t target = n * static_cast<std::size_t>(std::max(1, opt.pad_factor));
    while (m < target) m <<= 1;
    y.resize(m, 0.0);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, y);
    MagSpectrum out;
    out.domega = 2.0 * pi / (static_cast<double>(m) * s.dt);
    out.mag.resize(m / 2);
    for (std::size_t i = 0; i < m / 2; ++i) out.mag[i] = std::abs(spec[i]) * 2.0 / wsum;
    return out;
}

// parabolic vertex through (x-1, a), (x, b), (x+1, c); returns (dx, peak value)
inline std::pair<double, double> parabolic_vertex(double a, double b, double c) {
    double denom = a - 2.0 * b + c;
    if (std::abs(denom) < 1e-300) return {0.0, b};
    double dx = 0.5 * (a - c) / denom;
    dx = std::clamp(dx, -0.5, 0.5);
    double v = b - 0.25 * (a - c) * dx;
    return {dx, v};
}

}  // namespace detail

namespace detail {

// window-transform sidelobe envelope at distance dw from a peak, relative to
// the peak height.  Rectangular: the exact Dirichlet-kernel bound 2/(T dw).
// Hann: first sidelobe -31.5 dB at 2.36 bins, falling 18 dB per octave.
inline double sidelobe_envelope(double dw, double T, bool hann) {
    if (!hann) return std::min(1.0, 2.0 / (T * dw));
    double dw1 = 2.36 * 2.0 * pi / T;
    if (dw < dw1) return 1.0;
    double r = dw1 / dw;
    return 0.0267 * r * r * r;
}

}  // namespace detail

// Local spectral maxima above min_rel_amplitude * global max, strongest first,
// with parabolic bin refinement.  Candidates lying under the sidelobe envelope
// of an already-accepted stronger peak are leakage, not tones, and are dropped.
inline std::vector<SpectralPeak> spectral_peaks(const Signal& s, const SpectrumOptions& opt = {},
                                                double min_rel_amplitude = 0.02) {
    detail::MagSpectrum ms = detail::magnitude_spectrum(s, opt);
    const auto& mag = ms.mag;
    double top = 0;
    for (std::size_t i = 1; i < mag.size(); ++i) top = std::max(top, mag[i]);
    double scale = 0;
    for (double v : s.values) scale = std::max(scale, std::abs(v));
    if (top < 1e-12 * std::max(scale, 1e-300))
        throw numerical_error("spectral_peaks: no peak above noise floor");
    std::vector<SpectralPeak> cands;
    for (std::size_t i = 2; i + 2 < mag.size(); ++i) {
        if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] >= min_rel_amplitude * top) {
            auto [dx, v] = detail::parabolic_vertex(mag[i - 1], mag[i], mag[i + 1]);
            cands.push_back({(static_cast<double>(i) + dx) * ms.domega, v});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const SpectralPeak& a, const SpectralPeak& b) {
        return a.amplitude > b.amplitude;
    });
    const double T = s.dt * static_cast<double>(s.size());
    std::vector<SpectralPeak> peaks;
    for (const SpectralPeak& c : cands) {
        bool leakage = false;
        for (const SpectralPeak& p : peaks) {
            double env = detail::sidelobe_envelope(std::abs(c.omega - p.omega), T, opt.hann);
            if (c.amplitude <= 1.3 * p.amplitude * env) {  // 1.3: interference slack
                leakage = true;
                break;
            }
        }
        if (!leakage) peaks.push_back(c);
    }
    return peaks;
}

inline SpectralPeak dominant_frequency(const Signal& s, const SpectrumOptions& opt = {}) {
    auto peaks = spectral_peaks(s, opt, 0.02);
    if (peaks.empty()) throw numerical_error("dominant_frequency: no peak above noise floor");
    return peaks.front();
}

// ------------------------------------------------------- damped sinusoid fit

// y(t) = amplitude * exp(-(t - t0)/decay_time) * cos(frequency (t - t0) + phase) + offset
struct OscillationFit {
    double amplitude = 0;
    double frequency = 0;  // angular
    double phase = 0;
    double offset = 0;
    double decay_time = std::numeric_limits<double>::infinity();  // tau_D
    double q = std::numeric_limits<double>::infinity();           // tau_D / T, T = 2 pi / frequency
    double residual_rms = 0;
    bool decay_resolved = false;  // false once tau_D exceeds 100x the window
};

namespace detail {

struct VpEval {
    double ss = std::numeric_limits<double>::infinity();
    double p = 0, q = 0, c = 0;
};

// linear subproblem of the variable-projection fit: best (p, q, c) for fixed
// (omega, lambda) in  e^{-lambda t}(p cos wt + q sin wt) + c
inline VpEval vp_eval(const Signal& s, double omega, double lambda) {
    std::size_t n = s.size();
    double m11 = 0, m12 = 0, m13 = 0, m22 = 0, m23 = 0, m33 = static_cast<double>(n);
    double r1 = 0, r2 = 0, r3 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = s.dt * static_cast<double>(i);
        double e = std::exp(-lambda * t);
        double b1 = e * std::cos(omega * t), b2 = e * std::sin(omega * t);
        double y = s.values[i];
        m11 += b1 * b1; m12 += b1 * b2; m13 += b1;
        m22 += b2 * b2; m23 += b2;
        r1 += b1 * y; r2 += b2 * y; r3 += y;
    }
    // 3x3 symmetric solve by Cramer
    double det = m11 * (m22 * m33 - m23 * m23) - m12 * (m12 * m33 - m23 * m13) + m13 * (m12 * m23 - m22 * m13);
    VpEval out;
    if (std::abs(det) < 1e-250) return out;
    out.p = (r1 * (m22 * m33 - m23 * m23) - m12 * (r2 * m33 - m23 * r3) + m13 * (r2 * m23 - m22 * r3)) / det;
    out.q = (m11 * (r2 * m33 - m23 * r3) - r1 * (m12 * m33 - m23 * m13) + m13 * (m12 * r3 - r2 * m13)) / det;
    out.c = (m11 * (m22 * r3 - r2 * m23) - m12 * (m12 * r3 - r2 * m13) + r1 * (m12 * m23 - m22 * m13)) / det;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = s.dt * static_cast<double>(i);
        double e = std::exp(-lambda * t);
        double r = s.values[i] - (e * (out.p * std::cos(omega * t) + out.q * std::sin(omega * t)) + out.c);
        ss += r * r;
    }
    out.ss = ss;
    return out;
}

}  // namespace detail

// Deterministic variable-projection fit: grid over (omega, lambda), linear
// solve for the remaining parameters, then alternating golden-section polish.
// omega_guess = 0 lets the FFT peak seed the frequency bracket.
inline OscillationFit fit_damped_sinusoid(const Signal& s, double omega_guess = 0) {
    s.validate();
    double W = s.duration();
    double w0 = omega_guess;
    if (!(w0 > 0)) w0 = dominant_frequency(s).omega;
    if (!(w0 > 0)) throw numerical_error("fit_damped_sinusoid: no frequency seed");

    std::vector<double> lam_grid{0.0};
    for (int i = 0; i < 40; ++i)
        lam_grid.push_back(std::pow(10.0, -5.0 + 6.4 * i / 39.0) / W);  // 1e-5/W .. ~25/W

    double best_ss = std::numeric_limits<double>::infinity();
    double best_w = w0, best_l = 0;
    double best_dw = w0 * 0.40 / 160.0;
    auto scan = [&](double lo, double hi, int n_w) {
        double step = (hi - lo) / static_cast<double>(n_w);
        for (int iw = 0; iw <= n_w; ++iw) {
            double w = lo + step * static_cast<double>(iw);
            if (!(w > 0)) continue;
            for (double l : lam_grid) {
                double ss = detail::vp_eval(s, w, l).ss;
                if (ss < best_ss) { best_ss = ss; best_w = w; best_l = l; best_dw = step; }
            }
        }
    };
    scan(0.80 * w0, 1.20 * w0, 160);
    // ss(omega) ripples with period ~2 pi / W.  Once the window spans hundreds
    // of periods the coarse grid straddles many ripples and can land on a side
    // lobe, so rescan a few lobes around the spectral peak at sub-lobe
    // resolution (the peak location is good to a small fraction of a lobe).
    double lobe = 2.0 * pi / W;
    double wf = w0;
    try {
        double peak = dominant_frequency(s).omega;
        if (std::abs(peak - w0) <= 0.20 * w0) wf = peak;
    } catch (const numerical_error&) {}
    scan(std::max(wf - 3.0 * lobe, 0.25 * wf), wf + 3.0 * lobe, 48);

    // Alternating 1d polish with shrinking brackets.  Golden-section results
    // are candidate moves only: over a bracket wider than one ripple the
    // section search can return a point worse than the incumbent, so a move
    // is kept only if it lowers ss.
    auto challenge_w = [&](double w) {
        if (!(w > 0)) return;
        double ss = detail::vp_eval(s, w, best_l).ss;
        if (ss < best_ss) { best_ss = ss; best_w = w; }
    };
    auto challenge_l = [&](double l) {
        double ss = detail::vp_eval(s, best_w, l).ss;
        if (ss < best_ss) { best_ss = ss; best_l = l; }
    };
    double dw = 2.0 * best_dw;
    double lam_lo = best_l > 0 ? best_l / 30.0 : 1e-7 / W;
    double lam_hi = best_l > 0 ? best_l * 30.0 : 25.0 / W;
    for (int round = 0; round < 6; ++round) {
        challenge_w(golden_section_max([&](double w) { return -detail::vp_eval(s, w, best_l).ss; },
                                       best_w - dw, best_w + dw, dw * 1e-7));
        double llo = std::log(lam_lo), lhi = std::log(lam_hi);
        double lbest = golden_section_max([&](double ll) { return -detail::vp_eval(s, best_w, std::exp(ll)).ss; },
                                          llo, lhi, 1e-7);
        challenge_l(std::exp(lbest));
        challenge_l(0.0);  // an undamped incumbent must be beaten, not assumed
        dw *= 0.3;
        if (best_l > 0) { lam_lo = best_l / 4.0; lam_hi = best_l * 4.0; }
    }

    detail::VpEval fin = detail::vp_eval(s, best_w, best_l);
    OscillationFit out;
    out.frequency = best_w;
    out.amplitude = std::hypot(fin.p, fin.q);
    out.phase = std::atan2(-fin.q, fin.p);
    out.offset = fin.c;
    out.residual_rms = std::sqrt(fin.ss / static_cast<double>(s.size()));
    out.decay_time = best_l > 0 ? 1.0 / best_l : std::numeric_limits<double>::infinity();
    out.decay_resolved = best_l > 0 && out.decay_time <= 100.0 * W;
    double period = 2.0 * pi / out.frequency;
    out.q = out.decay_resolved ? out.decay_time / period : std::numeric_limits<double>::infinity();
    return out;
}

// --------------------------------------------------------------- extrema

struct Extremum {
    double t = 0;
    double value = 0;
    bool is_max = false;
};

// interior local extrema with parabolic refinement
inline std::vector<Extremum> signal_extrema(const Signal& s) {
    std::vector<Extremum> out;
    const auto& v = s.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        bool mx = v[i] > v[i - 1] && v[i] >= v[i + 1];
        bool mn = v[i] < v[i - 1] && v[i] <= v[i + 1];
        if (!mx && !mn) continue;
        auto [dx, val] = detail::parabolic_vertex(v[i - 1], v[i], v[i + 1]);
        out.push_back({s.time(i) + dx * s.dt, val, mx});
    }
    return out;
}

}
