#include <catch2/catch_amalgamated.hpp>

#include <quenchlab/bcs.hpp>

using namespace quenchlab;

TEST_CASE("g = 0 solves to the trivial vacuum exactly") {
    BcsState s = solve_self_consistent(0.0);
    CHECK(s.rho == 0.0);
    CHECK(s.Delta == 0.0);
    CHECK(s.t_f == 0.0);
    CHECK(s.E0_per_site == -2.0);
    CHECK(s.residual < 1e-13);
}

TEST_CASE("self-consistent fields track the perturbative expansion at small g") {
    for (double g : {0.1, 0.2, 0.4}) {
        BcsState s = solve_self_consistent(g);
        CHECK(std::abs(s.Delta - g / 8.0) <= g * g * g);
        CHECK(std::abs(s.rho - g * g / 32.0) <= g * g * g * g);
        CHECK(std::abs(s.t_f) <= g * g * g);
    }
    // frozen regression point
    BcsState s = solve_self_consistent(0.4);
    CHECK(std::abs(s.Delta - 0.0497097699913) < 1e-9);
    CHECK(std::abs(s.rho - 0.00500166081233) < 1e-9);
}

TEST_CASE("fitted cubic envelope of the gap deviation stays below 1") {
    double worst = 0.0;
    for (double g = 0.05; g < 0.401; g += 0.05) {
        BcsState s = solve_self_consistent(g, 2048);
        worst = std::max(worst, std::abs(s.Delta - g / 8.0) / (g * g * g));
    }
    CHECK(worst < 1.0);
}

TEST_CASE("fixed point re-checked on an independent 4x denser grid") {
    // away from criticality the periodic trapezoid rule converges geometrically,
    // so the 4x-grid residual stays at solver tolerance
    for (double g : {0.4, 1.3}) {
        BcsState s = solve_self_consistent(g);
        CHECK(self_consistency_residual(s, 4 * 4096) < 10.0 * 1e-13);
    }
    // near g_c the dispersion minimum shrinks, the integrands sharpen, and the
    // grid-transfer error grows; it must still be far below physical tolerances
    BcsState s = solve_self_consistent(2.48);
    CHECK(self_consistency_residual(s, 4 * 4096) < 1e-4);
}

TEST_CASE("sweep is monotone in the fields and concave in the energy") {
    std::vector<double> gs;
    for (int i = 0; i <= 40; ++i) gs.push_back(2.0 * i / 40.0);
    std::vector<BcsState> sw = sweep_self_consistent(gs, 1024);
    REQUIRE(sw.size() == gs.size());
    for (std::size_t i = 1; i < sw.size(); ++i) {
        CHECK(sw[i].rho >= sw[i - 1].rho - 1e-12);
        CHECK(sw[i].Delta >= sw[i - 1].Delta - 1e-12);
        CHECK(sw[i].E0_per_site <= sw[i - 1].E0_per_site + 1e-12);
    }
    for (std::size_t i = 1; i + 1 < sw.size(); ++i) {
        double second = sw[i + 1].E0_per_site - 2 * sw[i].E0_per_site + sw[i - 1].E0_per_site;
        CHECK(second <= 1e-8);
    }
}

TEST_CASE("quasiparticle dispersion: flat band at g = 0, u/v parity, pert match") {
    BcsState s0 = solve_self_consistent(0.0);
    MomentumGrid grid = momentum_grid(16);
    KinkDispersion d0 = dispersion(s0, grid);
    for (std::size_t j = 0; j < d0.k.size(); ++j) {
        CHECK(std::abs(d0.omega[j] - 6.0) < 1e-14);
        CHECK(std::abs(d0.u[j] - 1.0) < 1e-14);
        CHECK(std::abs(d0.v[j]) < 1e-14);
    }

    BcsState s = solve_self_consistent(0.3);
    KinkDispersion d = dispersion(s, grid);
    // u even, v odd on the symmetric grid
    std::size_t n = d.k.size();
    for (std::size_t j = 0; j < n / 2; ++j) {
        std::size_t jm = n - 1 - j;  // mirror node
        CHECK(std::abs(d.k[j] + d.k[jm]) < 1e-14);
        CHECK(std::abs(d.u[j] - d.u[jm]) < 1e-13);
        CHECK(std::abs(d.v[j] + d.v[jm]) < 1e-13);
        CHECK(std::abs(std::abs(d.omega[j]) - std::abs(d.omega[jm])) < 1e-12);
    }

    // third-order agreement with the closed-form coefficients
    PerturbativeBcs p = perturbative_state(0.3);
    for (double k : {0.0, 0.8, 1.9, pi}) {
        double H = 2.0 * (3.0 - 4.0 * s.rho) - 2.0 * (s.g - 4.0 * s.t_f) * std::cos(k);
        double D = -2.0 * (s.g + 4.0 * s.Delta) * std::sin(k);
        double w_full = std::sqrt(H * H + D * D);
        CHECK(std::abs(w_full - p.omega_k(k)) < 0.3 * 0.3 * 0.3);
        double v_full = std::sin(0.5 * std::atan2(D, H));
        CHECK(std::abs(v_full - p.v_k(k)) < 0.3 * 0.3 * 0.3);
    }
    CHECK(std::abs(min_quasiparticle_energy(s) - p.omega_0()) < 0.3 * 0.3 * 0.3);
}

TEST_CASE("perturbative state coefficients at g = 0.5") {
    PerturbativeBcs p = perturbative_state(0.5);
    CHECK(p.omega_gamma == 6.03125);
    CHECK(p.t_gamma == 0.5);
    CHECK(p.t_gamma_prime == 0.046875);
    CHECK(p.omega_0() == 4.9375);
    CHECK(p.Delta == 0.0625);
    CHECK(p.rho == 0.0078125);
    CHECK(p.valid);
    CHECK_FALSE(perturbative_state(1.2).valid);
}

TEST_CASE("critical point from the gap-slope peak") {
    double gc = locate_critical(2.40, 2.56, 17, 1024, 1e-12);
    CHECK(std::abs(gc - 2.48135) < 0.005);
    // slope still rising at the right edge of a misplaced bracket
    CHECK_THROWS_AS(locate_critical(2.0, 2.2, 9, 512, 1e-12), numerical_error);
    CHECK_THROWS_AS(locate_critical(2.6, 2.4, 9, 512), validation_error);
}

TEST_CASE("crossover roots") {
    double pert = locate_crossover(CrossoverMethod::Perturbative);
    CHECK(std::abs(pert - 1.0717967697244912) < 1e-10);
    double full = locate_crossover(CrossoverMethod::FullBcs, 0.5, 2.0, 1024);
    CHECK(full > 1.05);
    CHECK(full < 1.15);
    CHECK(std::abs(full - 1.1035) < 0.01);
    // no sign change in a bracket that misses the crossing
    CHECK_THROWS_AS(locate_crossover(CrossoverMethod::Perturbative, 1.5, 2.0), numerical_error);
}

TEST_CASE("solver error paths") {
    CHECK_THROWS_AS(solve_self_consistent(-0.5), validation_error);
    CHECK_THROWS_AS(solve_self_consistent(1.0, 32), validation_error);
    CHECK_THROWS_AS(solve_self_consistent(1.0, 4096, -1.0), validation_error);
    CHECK_THROWS_AS(solve_self_consistent(1.5, 512, 1e-13, 5), numerical_error);
}
