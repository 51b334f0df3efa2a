#pragma once

// exact diagonalization of the periodic chain with translation and global
// spin-flip symmetry reduction: sector bases, matrix-free Hamiltonian,
// Lanczos spectra, gap extrapolation, Krylov time evolution, observables,
// and kink-train censuses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "analysis.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "protocols.hpp"

namespace quenchlab {

namespace ed_detail {

inline std::uint32_t rotl(std::uint32_t s, int j, int L) {
    if (j == 0) return s;
    std::uint32_t mask = (L == 32) ? ~0u : ((1u << L) - 1u);
    return ((s << j) | (s >> (L - j))) & mask;
}

inline int popcount32(std::uint32_t x) { return __builtin_popcount(x); }

// -sum z_n z_{n+1} - J2 sum z_n z_{n+2} for a configuration
inline double diagonal_energy(std::uint32_t s, int L, double J2) {
    int pc1 = popcount32(s ^ rotl(s, 1, L));
    int pc2 = popcount32(s ^ rotl(s, 2, L));
    return -(static_cast<double>(L - 2 * pc1) + J2 * static_cast<double>(L - 2 * pc2));
}

// counts[n] = number of maximal circular runs of exactly n kinks, n = 1..L
inline void train_census(std::uint32_t s, int L, std::vector<int>& counts) {
    counts.assign(static_cast<std::size_t>(L) + 1, 0);
    std::uint32_t mask = (L == 32) ? ~0u : ((1u << L) - 1u);
    std::uint32_t kappa = (s ^ rotl(s, 1, L)) & mask;  // kink occupation per bond
    if (kappa == 0 || kappa == mask) return;           // no flanked run exists
    int z = 0;
    while ((kappa >> z) & 1u) ++z;  // a bond without a kink
    int run = 0;
    for (int d = 1; d <= L; ++d) {
        int b = (z + d) % L;
        if ((kappa >> b) & 1u) ++run;
        else {
            if (run > 0) ++counts[static_cast<std::size_t>(run)];
            run = 0;
        }
    }
}

}  // namespace ed_detail

// ------------------------------------------------------------------ sector

// Symmetry-reduced basis: one representative (lexicographic orbit minimum)
// per orbit of the group generated by translation (if momentum set) and
// global spin flip (if parity set), keeping orbits whose stabilizer
// character is trivial.
struct SpinSector {
    int L = 0;
    int momentum = -1;  // -1 = no translation reduction
    int parity = 0;     // 0 = no flip reduction, else +-1

    std::vector<std::uint32_t> orbit_of;   // config -> orbit id
    std::vector<std::uint8_t> elem_j;      // group element mapping config to its rep
    std::vector<std::uint8_t> elem_m;
    std::vector<std::uint32_t> reps;       // basis index -> representative config
    std::vector<std::int32_t> basis_index; // orbit id -> basis index or -1
    std::vector<double> sqrt_stab;         // per orbit: sqrt(|stabilizer|)
    std::vector<cxd> chi;                  // chi[2 j + m]

    std::size_t dim() const { return reps.size(); }
    std::size_t n_orbits() const { return sqrt_stab.size(); }

    std::string label() const {
        std::string out;
        out += momentum >= 0 ? "k=" + std::to_string(momentum) : "k=*";
        out += parity != 0 ? (parity > 0 ? ",p=+1" : ",p=-1") : ",p=*";
        return out;
    }
};

inline SpinSector build_sector(int L, std::optional<int> momentum, std::optional<int> parity) {
    if (L < 4 || L > 20 || L % 2 != 0) throw validation_error("build_sector: need even 4 <= L <= 20");
    if (momentum && (*momentum < 0 || *momentum >= L)) throw validation_error("build_sector: momentum in [0, L)");
    if (parity && (*parity != 1 && *parity != -1)) throw validation_error("build_sector: parity must be +-1");

    SpinSector sec;
    sec.L = L;
    sec.momentum = momentum ? *momentum : -1;
    sec.parity = parity ? *parity : 0;

    const std::uint32_t n_conf = 1u << L;
    const std::uint32_t mask = n_conf - 1u;
    const int n_j = momentum ? L : 1;
    const int n_m = parity ? 2 : 1;
    const int group_size = n_j * n_m;

    sec.orbit_of.assign(n_conf, 0);
    sec.elem_j.assign(n_conf, 0);
    sec.elem_m.assign(n_conf, 0);
    std::vector<bool> seen(n_conf, false);
    std::vector<std::uint32_t> orbit_rep;
    std::vector<int> orbit_size;

    for (std::uint32_t s = 0; s < n_conf; ++s) {
        if (seen[s]) continue;
        std::uint32_t o = static_cast<std::uint32_t>(orbit_rep.size());
        int members = 0;
        for (int m = 0; m < n_m; ++m) {
            std::uint32_t base = m ? (~s & mask) : s;
            for (int j = 0; j < n_j; ++j) {
                std::uint32_t c = ed_detail::rotl(base, j, L);
                if (!seen[c]) {
                    seen[c] = true;
                    sec.orbit_of[c] = o;
                    sec.elem_j[c] = static_cast<std::uint8_t>((L - j) % L);
                    sec.elem_m[c] = static_cast<std::uint8_t>(m);
                    ++members;
                }
            }
        }
        orbit_rep.push_back(s);
        orbit_size.push_back(members);
    }

    // character table chi(T^j F^m) = exp(i 2 pi k j / L) * p^m
    sec.chi.assign(static_cast<std::size_t>(2 * L), cxd(1, 0));
    for (int j = 0; j < L; ++j)
        for (int m = 0; m < 2; ++m) {
            double arg = sec.momentum >= 0 ? 2.0 * pi * sec.momentum * j / L : 0.0;
            double sign = (sec.parity == -1 && m == 1) ? -1.0 : 1.0;
            sec.chi[static_cast<std::size_t>(2 * j + m)] = sign * cxd(std::cos(arg), std::sin(arg));
        }

    // keep orbits whose stabilizer carries the trivial character
    sec.basis_index.assign(orbit_rep.size(), -1);
    sec.sqrt_stab.resize(orbit_rep.size());
    for (std::size_t o = 0; o < orbit_rep.size(); ++o) {
        std::uint32_t r = orbit_rep[o];
        sec.sqrt_stab[o] = std::sqrt(static_cast<double>(group_size / orbit_size[o]));
        bool ok = true;
        for (int m = 0; ok && m < n_m; ++m) {
            std::uint32_t base = m ? (~r & mask) : r;
            for (int j = 0; ok && j < n_j; ++j) {
                if (ed_detail::rotl(base, j, L) != r) continue;  // not a stabilizer element
                int phase_num = sec.momentum >= 0 ? (sec.momentum * j) % L : 0;
                bool flip_sign = (sec.parity == -1 && m == 1);
                bool trivial = flip_sign ? (2 * phase_num == L) : (phase_num == 0);
                ok = trivial;
            }
        }
        if (ok) {
            sec.basis_index[o] = static_cast<std::int32_t>(sec.reps.size());
            sec.reps.push_back(r);
        }
    }
    return sec;
}

// --------------------------------------------------------------- operators

// precomputed matrix-free action: y = (diag - g * flip) x
struct SectorHamiltonian {
    std::shared_ptr<const SpinSector> sector;
    double J2 = 0;
    std::vector<double> diag;       // per basis index
    std::vector<std::int32_t> tgt;  // [b*L + n] target basis index or -1
    std::vector<cxd> coef;          // matching symmetry factor

    void apply(double g, const cxd* x, cxd* y) const {
        const int L = sector->L;
        const std::size_t d = sector->dim();
        parallel_for(d, [&](std::size_t b0, std::size_t b1) {
            for (std::size_t b = b0; b < b1; ++b) {
                cxd acc = diag[b] * x[b];
                const std::size_t base = b * static_cast<std::size_t>(L);
                cxd flip(0, 0);
                for (int n = 0; n < L; ++n) {
                    std::int32_t a = tgt[base + static_cast<std::size_t>(n)];
                    if (a >= 0) flip += coef[base + static_cast<std::size_t>(n)] * x[a];
                }
                y[b] = acc - g * flip;
            }
        }, 256);
    }

    // action of the bare flip sum (sum_n sigma^x_n)
    void apply_flip(const cxd* x, cxd* y) const {
        const int L = sector->L;
        const std::size_t d = sector->dim();
        for (std::size_t b = 0; b < d; ++b) {
            const std::size_t base = b * static_cast<std::size_t>(L);
            cxd flip(0, 0);
            for (int n = 0; n < L; ++n) {
                std::int32_t a = tgt[base + static_cast<std::size_t>(n)];
                if (a >= 0) flip += coef[base + static_cast<std::size_t>(n)] * x[a];
            }
            y[b] = flip;
        }
    }
};

inline SectorHamiltonian make_hamiltonian(std::shared_ptr<const SpinSector> sector, double J2) {
    SectorHamiltonian H;
    H.sector = sector;
    H.J2 = J2;
    const SpinSector& sec = *sector;
    const int L = sec.L;
    const std::size_t d = sec.dim();
    H.diag.resize(d);
    H.tgt.assign(d * static_cast<std::size_t>(L), -1);
    H.coef.assign(d * static_cast<std::size_t>(L), cxd(0, 0));
    for (std::size_t b = 0; b < d; ++b) {
        std::uint32_t r = sec.reps[b];
        H.diag[b] = ed_detail::diagonal_energy(r, L, J2);
        double sb = sec.sqrt_stab[sec.orbit_of[r]];
        for (int n = 0; n < L; ++n) {
            std::uint32_t c = r ^ (1u << n);
            std::uint32_t o = sec.orbit_of[c];
            std::int32_t a = sec.basis_index[o];
            if (a < 0) continue;
            cxd phase = sec.chi[static_cast<std::size_t>(2 * sec.elem_j[c] + sec.elem_m[c])];
            H.tgt[b * static_cast<std::size_t>(L) + static_cast<std::size_t>(n)] = a;
            H.coef[b * static_cast<std::size_t>(L) + static_cast<std::size_t>(n)] =
                phase * (sec.sqrt_stab[o] / sb);
        }
    }
    return H;
}

// ------------------------------------------------------------------- state

struct EdState {
    std::shared_ptr<const SpinSector> sector;
    Eigen::VectorXcd amplitudes;
    double t = 0;

    void validate() const {
        if (!sector || amplitudes.size() != static_cast<Eigen::Index>(sector->dim()))
            throw validation_error("EdState: amplitude size does not match sector");
        if (std::abs(amplitudes.norm() - 1.0) > 1e-8)
            throw validation_error("EdState: state not normalized");
    }
};

// convenience single-shot H application (tests, small uses)
inline Eigen::VectorXcd apply_hamiltonian(const EdState& st, double g, double J2) {
    st.validate();
    SectorHamiltonian H = make_hamiltonian(st.sector, J2);
    Eigen::VectorXcd y(st.amplitudes.size());
    H.apply(g, st.amplitudes.data(), y.data());
    return y;
}

// ---------------------------------------------------------------- spectra

struct SpectrumResult {
    int L = 0;
    double g = 0, J2 = 0;
    std::vector<double> energies;      // ascending
    std::vector<std::string> sectors;  // label per level
};

// lowest m levels merged across all (momentum, parity) sectors
inline SpectrumResult lowest_eigenpairs(int L, double g, double J2, int m) {
    if (m < 1 || m > 6) throw validation_error("lowest_eigenpairs: need 1 <= m <= 6");
    SpectrumResult out;
    out.L = L; out.g = g; out.J2 = J2;
    std::vector<std::pair<double, std::string>> levels;
    for (int k = 0; k < L; ++k) {
        for (int p : {+1, -1}) {
            auto sec = std::make_shared<const SpinSector>(build_sector(L, k, p));
            if (sec->dim() == 0) continue;
            SectorHamiltonian H = make_hamiltonian(sec, J2);
            int want = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(m), sec->dim()));
            LanczosResult lr = lanczos_lowest(
                [&](const cxd* x, cxd* y) { H.apply(g, x, y); }, sec->dim(), want, 1e-11);
            for (int j = 0; j < static_cast<int>(lr.values.size()); ++j) {
                if (lr.residuals[static_cast<std::size_t>(j)] > 1e-10)
                    throw numerical_error("lowest_eigenpairs: Lanczos residual " +
                                          std::to_string(lr.residuals[static_cast<std::size_t>(j)]) +
                                          " in sector " + sec->label());
                levels.emplace_back(lr.values[static_cast<std::size_t>(j)], sec->label());
            }
        }
    }
    std::sort(levels.begin(), levels.end());
    for (int j = 0; j < m && j < static_cast<int>(levels.size()); ++j) {
        out.energies.push_back(levels[static_cast<std::size_t>(j)].first);
        out.sectors.push_back(levels[static_cast<std::size_t>(j)].second);
    }
    return out;
}

// ground state within one symmetry sector (default: k = 0, even parity)
inline EdState ground_state_ed(int L, double g, double J2, int momentum = 0, int parity = +1) {
    auto sec = std::make_shared<const SpinSector>(build_sector(L, momentum, parity));
    SectorHamiltonian H = make_hamiltonian(sec, J2);
    LanczosResult lr = lanczos_lowest([&](const cxd* x, cxd* y) { H.apply(g, x, y); },
                                      sec->dim(), 1, 1e-12);
    if (lr.residuals.empty() || lr.residuals[0] > 1e-10)
        throw numerical_error("ground_state_ed: Lanczos did not converge");
    EdState st;
    st.sector = sec;
    st.amplitudes = lr.vectors[0];
    st.t = 0;
    return st;
}

// ------------------------------------------------------- gap extrapolation

struct PairGapResult {
    std::vector<int> L_list;
    std::vector<double> gap_per_L;
    double gap_extrapolated = 0;
    double fit_c = 0;          // gap(L) = gap_inf + c exp(-L/ell)
    double fit_ell = 0;
    double fit_residual = 0;   // rms over the fitted sizes
    bool non_monotone = false; // warning: fell back to the largest-L gap
};

namespace ed_detail {

// least squares of y = a + c exp(-L/ell) for fixed ell
inline std::pair<double, double> gap_fit_linear(const std::vector<int>& Ls,
                                                const std::vector<double>& ys, double ell,
                                                double& ss) {
    double s11 = static_cast<double>(Ls.size()), s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        double b = std::exp(-Ls[i] / ell);
        s12 += b; s22 += b * b; r1 += ys[i]; r2 += b * ys[i];
    }
    double det = s11 * s22 - s12 * s12;
    double a = 0, c = 0;
    if (std::abs(det) > 1e-250) {
        a = (s22 * r1 - s12 * r2) / det;
        c = (s11 * r2 - s12 * r1) / det;
    } else {
        a = r1 / s11;
    }
    ss = 0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        double r = ys[i] - (a + c * std::exp(-Ls[i] / ell));
        ss += r * r;
    }
    return {a, c};
}

}  // namespace ed_detail

inline PairGapResult pair_gap_ed(double g, double J2, const std::vector<int>& L_list,
                                 double splitting_threshold = 1e-3) {
    if (L_list.size() < 3) throw validation_error("pair_gap_ed: need >= 3 sizes");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (L_list[i] <= L_list[i - 1]) throw validation_error("pair_gap_ed: L_list must ascend");

    PairGapResult out;
    out.L_list = L_list;
    for (int L : L_list) {
        SpectrumResult sp = lowest_eigenpairs(L, g, J2, 3);
        double gap = (sp.energies[1] - sp.energies[0] < splitting_threshold)
                         ? sp.energies[2] - sp.energies[0]
                         : sp.energies[1] - sp.energies[0];
        out.gap_per_L.push_back(gap);
    }

    double lo = *std::min_element(out.gap_per_L.begin(), out.gap_per_L.end());
    double hi = *std::max_element(out.gap_per_L.begin(), out.gap_per_L.end());
    if (hi - lo < 1e-12) {  // flat: classical point
        out.gap_extrapolated = out.gap_per_L.back();
        out.fit_c = 0; out.fit_ell = 1; out.fit_residual = 0;
        return out;
    }

    // monotonicity check (either direction)
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < out.gap_per_L.size(); ++i) {
        if (out.gap_per_L[i] < out.gap_per_L[i - 1] - 1e-9) inc = false;
        if (out.gap_per_L[i] > out.gap_per_L[i - 1] + 1e-9) dec = false;
    }
    if (!inc && !dec) {
        out.non_monotone = true;
        out.gap_extrapolated = out.gap_per_L.back();
        return out;
    }

    // variable projection over the decay length
    double best_ss = std::numeric_limits<double>::infinity(), best_ell = 2.0;
    for (int i = 0; i <= 80; ++i) {
        double ell = std::pow(10.0, -0.5 + 2.0 * i / 80.0);  // 0.316 .. 31.6
        double ss;
        ed_detail::gap_fit_linear(out.L_list, out.gap_per_L, ell, ss);
        if (ss < best_ss) { best_ss = ss; best_ell = ell; }
    }
    double lell = golden_section_max([&](double le) {
        double ss;
        ed_detail::gap_fit_linear(out.L_list, out.gap_per_L, std::exp(le), ss);
        return -ss;
    }, std::log(best_ell / 2.0), std::log(best_ell * 2.0), 1e-8);
    double ss;
    auto [a, c] = ed_detail::gap_fit_linear(out.L_list, out.gap_per_L, std::exp(lell), ss);
    out.gap_extrapolated = a;
    out.fit_c = c;
    out.fit_ell = std::exp(lell);
    out.fit_residual = std::sqrt(ss / static_cast<double>(out.gap_per_L.size()));
    return out;
}

// ---------------------------------------------------------- time evolution

// Krylov-exponential stepper with the field frozen at each midpoint.
// Returns samples every sample_stride steps (plus start and end).
inline std::vector<EdState> evolve_ed(const EdState& initial, const RampProtocol& protocol,
                                      double J2, double t_end, double dt = 0.02,
                                      int sample_stride = 1) {
    initial.validate();
    if (!(dt > 0)) throw validation_error("evolve_ed: dt must be > 0");
    dt = std::min(dt, 0.02);
    if (t_end < initial.t) throw validation_error("evolve_ed: t_end before state time");
    if (sample_stride < 1) sample_stride = 1;

    SectorHamiltonian H = make_hamiltonian(initial.sector, J2);
    long nst = static_cast<long>(std::ceil((t_end - initial.t) / dt - 1e-9));
    if (nst < 1) nst = 1;
    const double h = (t_end - initial.t) / static_cast<double>(nst);

    std::vector<EdState> traj;
    traj.reserve(static_cast<std::size_t>(nst / sample_stride) + 2);
    traj.push_back(initial);
    Eigen::VectorXcd psi = initial.amplitudes;
    for (long s = 0; s < nst; ++s) {
        double t_mid = initial.t + h * (static_cast<double>(s) + 0.5);
        double g_mid = protocol.value(std::min(t_mid, t_end));
        krylov_expm_step([&](const cxd* x, cxd* y) { H.apply(g_mid, x, y); }, psi, h);
        if ((s + 1) % sample_stride == 0 || s + 1 == nst) {
            EdState st;
            st.sector = initial.sector;
            st.amplitudes = psi;
            st.t = initial.t + h * static_cast<double>(s + 1);
            traj.push_back(std::move(st));
        }
    }
    return traj;
}

// ------------------------------------------------------------- observables

struct EdObservables {
    double sx = 0;      // per site
    double zz_nn = 0;   // per site
    double zz_nnn = 0;  // per site
    double energy = 0;  // total <H>
};

inline EdObservables measure(const EdState& st, double g, double J2) {
    st.validate();
    const SpinSector& sec = *st.sector;
    const int L = sec.L;
    SectorHamiltonian H = make_hamiltonian(st.sector, J2);
    Eigen::VectorXcd flip(st.amplitudes.size());
    H.apply_flip(st.amplitudes.data(), flip.data());
    double sx_total = std::real(st.amplitudes.dot(flip));
    double zz1 = 0, zz2 = 0;
    for (std::size_t b = 0; b < sec.dim(); ++b) {
        double w = std::norm(st.amplitudes[static_cast<Eigen::Index>(b)]);
        std::uint32_t r = sec.reps[b];
        zz1 += w * static_cast<double>(L - 2 * ed_detail::popcount32(r ^ ed_detail::rotl(r, 1, L)));
        zz2 += w * static_cast<double>(L - 2 * ed_detail::popcount32(r ^ ed_detail::rotl(r, 2, L)));
    }
    EdObservables o;
    o.sx = sx_total / L;
    o.zz_nn = zz1 / L;
    o.zz_nnn = zz2 / L;
    o.energy = -(zz1 + J2 * zz2) - g * sx_total;
    return o;
}

// expectation of the global spin flip (parity of the full flip product)
inline double measure_parity(const EdState& st) {
    st.validate();
    const SpinSector& sec = *st.sector;
    if (sec.parity != 0) return static_cast<double>(sec.parity);
    const std::uint32_t mask = (1u << sec.L) - 1u;
    cxd acc(0, 0);
    // amplitudes live on representatives; flip maps orbit to orbit
    for (std::size_t b = 0; b < sec.dim(); ++b) {
        std::uint32_t c = ~sec.reps[b] & mask;
        std::int32_t a = sec.basis_index[sec.orbit_of[c]];
        if (a < 0) continue;
        cxd phase = std::conj(sec.chi[static_cast<std::size_t>(2 * sec.elem_j[c] + sec.elem_m[c])]);
        double ratio = sec.sqrt_stab[sec.orbit_of[c]] / sec.sqrt_stab[sec.orbit_of[sec.reps[b]]];
        acc += std::conj(st.amplitudes[a]) * phase * ratio * st.amplitudes[static_cast<Eigen::Index>(b)];
    }
    return std::real(acc);
}

// densities of exact-length-n kink trains, n = 1..max_len
inline std::vector<double> train_densities(const EdState& st, int max_len) {
    st.validate();
    if (max_len < 1 || max_len > 6) throw validation_error("train_densities: need 1 <= max_len <= 6");
    const SpinSector& sec = *st.sector;
    std::vector<double> dens(static_cast<std::size_t>(max_len), 0.0);
    std::vector<int> counts;
    for (std::size_t b = 0; b < sec.dim(); ++b) {
        double w = std::norm(st.amplitudes[static_cast<Eigen::Index>(b)]);
        if (w < 1e-300) continue;
        ed_detail::train_census(sec.reps[b], sec.L, counts);
        for (int n = 1; n <= max_len; ++n)
            dens[static_cast<std::size_t>(n - 1)] += w * counts[static_cast<std::size_t>(n)] / sec.L;
    }
    return dens;
}

}
