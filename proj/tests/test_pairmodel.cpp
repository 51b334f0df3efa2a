#include <catch2/catch_amalgamated.hpp>

#include <quenchlab/pairmodel.hpp>

#include <random>

using namespace quenchlab;

TEST_CASE("coefficient assembly matches the closed forms identically") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 0.999);
    for (int i = 0; i < 100; ++i) {
        double g = uni(rng), g2 = g * g;
        PairCoefficients c = pair_coefficients(g);
        REQUIRE(c.contributions.size() == 7);
        CHECK(std::abs(c.omega_b - (8.0 - g2 / 4.0)) < 1e-14);
        CHECK(std::abs(c.t_b - g2 / 8.0) < 1e-15);
        CHECK(std::abs(c.t_b_prime - g2 / 8.0) < 1e-15);
        CHECK(std::abs(pair_gap(g) - (8.0 - 0.75 * g2)) < 1e-14);
    }
    PairCoefficients c1 = pair_coefficients(1.0);
    CHECK(c1.contributions[0].value == 8.375);
    CHECK(c1.contributions[1].value == -0.5);
    CHECK(c1.contributions[2].value == -0.125);
    CHECK(c1.contributions[3].value == -0.125);
    CHECK(c1.contributions[4].value == 0.25);
    CHECK(c1.contributions[5].value == 0.0625);
    CHECK(c1.contributions[6].value == 0.0625);
    CHECK_FALSE(c1.valid);
    CHECK(pair_coefficients(0.5).valid);
}

TEST_CASE("pair gap and dispersion") {
    CHECK(pair_gap(0.0) == 8.0);
    CHECK(pair_gap(0.5) == 7.8125);
    CHECK(pair_gap(0.25) == 7.953125);
    CHECK(std::abs(pair_gap(1.12) - 7.0592) < 1e-12);
    for (double g : {0.0, 0.3, 0.7}) {
        CHECK(pair_dispersion(g, 0.0) == pair_gap(g));
        // k = 0 is the band bottom
        for (int j = 1; j <= 32; ++j) CHECK(pair_dispersion(g, j * pi / 32) >= pair_gap(g) - 1e-14);
    }
    CHECK(std::abs(pair_dispersion(0.5, pi) - 7.9375) < 1e-14);
}

TEST_CASE("kink train energies") {
    CHECK(train_energy(0) == 0.0);
    CHECK(train_energy(1) == 6.0);
    CHECK(train_energy(2) == 8.0);
    CHECK(train_energy(3) == 10.0);
    CHECK(train_energy(4) == 12.0);
    // breaking one 4-train into two separated 2-trains costs 2 * 8 - 12 = 4
    CHECK(2 * train_energy(2) - train_energy(4) == 4.0);
    CHECK_THROWS_AS(train_energy(-1), validation_error);
}

TEST_CASE("unforced oscillator stays exactly at rest") {
    DrivenResponse r = driven_response(0.5, RampProtocol::constant(0.5), 3.0);
    for (double xv : r.x.values) CHECK(xv == 0.0);
    CHECK(r.rho_pair == 0.0);
    CHECK(r.pair_density_term_omitted);
}

TEST_CASE("constant field step rings around the shifted minimum") {
    const double g = 0.5, dgv = 0.002;
    const double w = pair_gap(g);
    DrivenResponse r = driven_response(g, RampProtocol::constant(g + dgv), 20.0 * 2 * pi / w);
    double lo = 0, hi = -1;
    for (double xv : r.x.values) {
        lo = std::min(lo, xv);
        hi = std::max(hi, xv);
    }
    // x(t) = -(2 dg / w)(1 - cos w t): swings between 0 and -4 dg / w
    CHECK(std::abs(hi - 0.0) < 1e-7);
    CHECK(std::abs(lo + 4.0 * dgv / w) < 1e-6);
}

TEST_CASE("resonant drive grows linearly: x(T) = A T at the end of one cycle") {
    const double A = 0.005, wd = 8.0, T = 2 * pi;
    RampProtocol drive = RampProtocol::sinusoidal_drive(0.0, A, wd, T);
    DrivenResponse r = driven_response(0.0, drive, T);
    // exact solution x = A t cos(w t) - (A/w) sin(w t); at t = 2 pi the sine
    // vanishes and the secular term is at full stretch
    CHECK(std::abs(r.x.values.back() - A * T) < 1e-8);
    CHECK(std::abs(r.rho_pair - 0.25 * A * T * A * T) < 1e-8);
    // zz prediction is (g/2) x, so it vanishes identically at g = 0
    for (double zv : r.zz_prediction.values) CHECK(zv == 0.0);
}

TEST_CASE("off-resonant drive matches the two-tone closed form") {
    const double g = 0.25, A = 0.005, wd = 8.0, T = 2 * pi;
    const double w = pair_gap(g);
    const double B = -2.0 * w * A / (w * w - wd * wd);
    const double C = -B * wd / w;
    RampProtocol drive = RampProtocol::sinusoidal_drive(g, A, wd, T);
    DrivenResponse r = driven_response(g, drive, T + 10.0 * 2 * pi / w);

    // during the drive window
    for (std::size_t i = 0; i < r.x.size(); i += 400) {
        double t = r.x.time(i);
        if (t > T) break;
        CHECK(std::abs(r.x.values[i] - (B * std::sin(wd * t) + C * std::sin(w * t))) < 1e-8);
    }
    // zz prediction carries the g/2 factor
    for (std::size_t i = 0; i < r.x.size(); i += 997)
        CHECK(r.zz_prediction.values[i] == 0.5 * g * r.x.values[i]);

    // after the drive: free oscillation at the pair gap with the closed-form
    // amplitude sqrt(x_T^2 + (v_T / w)^2)
    auto i0 = static_cast<std::size_t>(std::ceil((T + 1e-9) / r.x.dt));
    Signal post;
    post.t0 = r.x.time(i0);
    post.dt = r.x.dt;
    post.values.assign(r.x.values.begin() + static_cast<long>(i0), r.x.values.end());
    OscillationFit f = fit_damped_sinusoid(post, w);
    CHECK(std::abs(f.frequency - w) / w < 1e-7);
    CHECK(std::abs(f.amplitude - 0.031394477224638159) / 0.031394477224638159 < 1e-5);
    CHECK(f.residual_rms < 1e-8);
    CHECK_FALSE(f.decay_resolved);
}

TEST_CASE("closed-form post-drive amplitude") {
    // off-resonant reference value used by the driven-chain comparisons
    CHECK(std::abs(post_drive_amplitude(0.25, 0.005, 8.0, 2 * pi) - 0.031394477224638159) < 5e-16);
    // resonant growth after an integer number of cycles: amp = A T exactly
    CHECK(std::abs(post_drive_amplitude(0.0, 0.005, 8.0, 2 * pi) - 0.005 * 2 * pi) < 1e-12);
    CHECK_THROWS_AS(post_drive_amplitude(0.25, 0.005, 8.0, 0.0), validation_error);
}

TEST_CASE("driven response rejects bad inputs") {
    CHECK_THROWS_AS(driven_response(0.5, RampProtocol::linear(8.0), 1.0), validation_error);
    RampProtocol d = RampProtocol::sinusoidal_drive(0.5, 0.01, 8.0, 1.0);
    CHECK_THROWS_AS(driven_response(0.5, d, -1.0), validation_error);
    CHECK_THROWS_AS(driven_response(0.5, d, 1.0, -0.1), validation_error);
}
