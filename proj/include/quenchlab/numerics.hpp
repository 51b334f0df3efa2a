#pragma once

// shared numerical kernels: worker pool, 1d optimisation/root finding,
// Lanczos (full reorthogonalisation) and a Krylov exp(-i dt H) stepper.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace quenchlab {

using cxd = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------- workers

inline int worker_count() {
    if (const char* env = std::getenv("QUENCHLAB_WORKERS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1 || n > 4096)
            throw validation_error("QUENCHLAB_WORKERS must be a positive integer");
        return static_cast<int>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static chunking into disjoint index ranges; every thread writes only its own
// slots, so results are bitwise independent of the worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t min_chunk = 64) {
    int workers = worker_count();
    if (workers <= 1 || n <= min_chunk) {
        body(0, n);
        return;
    }
    std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), (n + min_chunk - 1) / min_chunk);
    std::size_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t i0 = c * per, i1 = std::min(n, i0 + per);
        if (i0 >= i1) break;
        pool.emplace_back([&body, i0, i1] { body(i0, i1); });
    }
    for (auto& t : pool) t.join();
}

// ------------------------------------------------------- 1d root / optimum

// root of f on [a,b]; requires a sign change
template <typename F>
double bisect_root(F&& f, double a, double b, double xtol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0)) throw numerical_error("bisect_root: no sign change on bracket");
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0) return m;
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; }
        else { b = m; }
    }
    return 0.5 * (a + b);
}

// maximiser of f on [a,b] (unimodal assumed)
template <typename F>
double golden_section_max(F&& f, double a, double b, double xtol = 1e-6) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) { b = d; d = c; fd = fc; c = b - invphi * (b - a); fc = f(c); }
        else { a = c; c = d; fc = fd; d = a + invphi * (b - a); fd = f(d); }
    }
    return 0.5 * (a + b);
}

// ------------------------------------------------------------- least squares

struct LineFit {
    double slope = 0, intercept = 0, r_squared = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw validation_error("fit_line: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw numerical_error("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (out.slope * x[i] + out.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

// y ~ prefactor * x^exponent via log-log least squares; x, y must be > 0
struct PowerLawFit {
    double exponent = 0, prefactor = 0, r_squared = 0;
};

inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size()); ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw validation_error("fit_power_law: data must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    LineFit lf = fit_line(lx, ly);
    return {lf.slope, std::exp(lf.intercept), lf.r_squared};
}

// ----------------------------------------------------------------- Lanczos

struct LanczosResult {
    std::vector<double> values;                 // lowest eigenvalues, ascending
    std::vector<Eigen::VectorXcd> vectors;      // matching Ritz vectors
    std::vector<double> residuals;              // ||H v - E v|| estimates
    int iterations = 0;
};

// Lowest n_ev eigenpairs of a Hermitian operator given by its matvec.
// Full reorthogonalisation; deterministic start vector from a fixed seed.
inline LanczosResult lanczos_lowest(const std::function<void(const cxd*, cxd*)>& apply,
                                    std::size_t dim, int n_ev,
                                    double tol = 1e-11, int max_iter = 0,
                                    unsigned seed = 0x51a3c0deu) {
    if (dim == 0) throw validation_error("lanczos_lowest: empty space");
    n_ev = std::min<int>(n_ev, static_cast<int>(dim));
    if (max_iter <= 0) max_iter = std::max(300, 8 * n_ev + 48);
    max_iter = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_iter), dim));

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Eigen::VectorXcd> V;
    Eigen::VectorXcd v0(dim);
    for (std::size_t i = 0; i < dim; ++i) v0[i] = cxd(uni(rng), uni(rng));
    v0.normalize();
    V.push_back(v0);

    std::vector<double> alpha, beta;  // tridiagonal entries (beta: off-diagonal)
    Eigen::VectorXcd w(dim);
    LanczosResult out;

    // Ritz data from the current (alpha, beta) tridiagonal; beta_edge is the
    // dangling coefficient that bounds the residual of each Ritz pair.
    auto ritz = [&](bool want_vectors, double beta_edge) {
        int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        int keep = std::min(n_ev, m);
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + keep);
        out.residuals.clear();
        for (int j = 0; j < keep; ++j)
            out.residuals.push_back(std::abs(beta_edge * es.eigenvectors()(m - 1, j)));
        if (want_vectors) {
            out.vectors.clear();
            for (int j = 0; j < keep; ++j) {
                Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
                for (int i = 0; i < m; ++i) v += es.eigenvectors()(i, j) * V[static_cast<std::size_t>(i)];
                v.normalize();
                out.vectors.push_back(std::move(v));
            }
        }
        return m;
    };

    double b = 0;
    for (int it = 0; it < max_iter; ++it) {
        apply(V.back().data(), w.data());
        double a = std::real(V.back().dot(w));
        alpha.push_back(a);
        w -= a * V.back();
        if (V.size() > 1) w -= beta.back() * V[V.size() - 2];
        // full reorthogonalisation, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : V) w -= v.dot(w) * v;
        b = w.norm();
        if (b < 1e-13) {  // invariant subspace exhausted: Ritz pairs are exact
            out.iterations = ritz(true, 0.0);
            return out;
        }
        if (static_cast<int>(alpha.size()) >= n_ev + 2 && it % 4 == 3) {
            ritz(false, b);
            bool done = static_cast<int>(out.values.size()) >= n_ev;
            for (int j = 0; done && j < n_ev; ++j) done = out.residuals[static_cast<std::size_t>(j)] < tol;
            if (done) {
                out.iterations = ritz(true, b);
                return out;
            }
        }
        if (it + 1 < max_iter) {
            beta.push_back(b);
            V.push_back(w / b);
        }
    }
    out.iterations = ritz(true, b);
    return out;
}

// One step y <- exp(-i dt H) y in the Krylov space of (H, y).
inline void krylov_expm_step(const std::function<void(const cxd*, cxd*)>& apply,
                             Eigen::VectorXcd& y, double dt, int m_max = 30) {
    double ny = y.norm();
    if (!(ny > 0)) return;
    std::size_t dim = static_cast<std::size_t>(y.size());
    int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(m_max), dim));
    std::vector<Eigen::VectorXcd> V;
    V.reserve(static_cast<std::size_t>(m));
    V.push_back(y / ny);
    std::vector<double> alpha, beta;
    Eigen::VectorXcd w(y.size());
    for (int j = 0; j < m; ++j) {
        apply(V.back().data(), w.data());
        double a = std::real(V.back().dot(w));
        alpha.push_back(a);
        w -= a * V.back();
        if (V.size() > 1) w -= beta.back() * V[V.size() - 2];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : V) w -= v.dot(w) * v;
        double b = w.norm();
        if (b < 1e-13 || j == m - 1) break;  // happy breakdown or full
        beta.push_back(b);
        V.push_back(w / b);
    }
    int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXcd phase(k);
    for (int i = 0; i < k; ++i) phase[i] = std::exp(cxd(0, -dt * es.eigenvalues()[i]));
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(k);
    e1[0] = 1.0;
    Eigen::VectorXcd coef = es.eigenvectors() * (phase.asDiagonal() * (es.eigenvectors().transpose() * e1));
    y.setZero();
    for (int i = 0; i < k; ++i) y += coef[i] * V[static_cast<std::size_t>(i)];
    y *= ny;
}

}
