#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dimersim/polaron.hpp"

using namespace dimersim;
using Catch::Approx;

namespace {

const BathSpec bath300{1.29e-9, 10.0, 300.0};

DimerConfig dark_dimer_config() {
    DimerConfig cfg;
    cfg.monomer1.excitation_energy_ev = 2.65;
    cfg.monomer2.excitation_energy_ev = 2.65;
    cfg.coupling.q12 = 0.15;
    cfg.monomer1.dipoles.mu = Vec3(10, 0, 0);
    cfg.monomer2.dipoles.mu = Vec3(10, 0, 0);
    cfg.monomer1.dipoles.perm_excited = Vec3(10, 0, 0);
    cfg.monomer2.dipoles.perm_excited = Vec3(4, 0, 0);
    return cfg;
}

double lambda_for(const BathSpec& spec) {
    return 16.0 * constants::pi / 3.0 * spec.cutoff_ev * spec.coupling_strength;
}

} // namespace

TEST_CASE("polaron frame construction") {
    const EigenSystem es = diag_case_a(dark_dimer_config());

    SECTION("zero coupling is the identity frame") {
        const PolaronFrame frame = build_polaron_frame(es, 0.0);
        CHECK(frame.shifted_energies.isApprox(es.energies));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                CHECK((frame.dressed(a, b) - es.dipoles(a, b)).norm() == 0.0);
    }
    SECTION("no permanent dipoles means no dressing") {
        DimerConfig cfg = dark_dimer_config();
        cfg.monomer1.dipoles.perm_excited = Vec3::Zero();
        cfg.monomer2.dipoles.perm_excited = Vec3::Zero();
        const EigenSystem bare = diag_case_a(cfg);
        const PolaronFrame frame = build_polaron_frame(bare, 1e-7);
        CHECK(frame.shifted_energies.isApprox(bare.energies));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                CHECK((frame.dressed(a, b) - bare.dipoles(a, b)).norm() == 0.0);
    }
    SECTION("diagonal dipoles are never dressed") {
        const PolaronFrame frame = build_polaron_frame(es, 1e-7);
        for (int a = 0; a < 3; ++a)
            CHECK((frame.dressed(a, a) - es.dipoles(a, a)).norm() == 0.0);
    }
    SECTION("dressing correction bounded by 4 lambda dmax^3 / gap") {
        std::mt19937_64 gen(61);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double lambda = 1e-7;
        for (int trial = 0; trial < 30; ++trial) {
            DimerConfig cfg = dark_dimer_config();
            cfg.monomer1.dipoles.mu = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer2.dipoles.mu = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer1.dipoles.perm_excited = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer2.dipoles.perm_excited = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            const EigenSystem sys = diag_case_a(cfg);
            const PolaronFrame frame = build_polaron_frame(sys, lambda);
            double dmax = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) dmax = std::max(dmax, sys.dipoles(a, b).norm());
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    if (a == b) continue;
                    const double gap = std::abs(sys.energies(a) - sys.energies(b));
                    const double bound = 4.0 * lambda * dmax * dmax * dmax / gap;
                    CHECK((frame.dressed(a, b) - sys.dipoles(a, b)).norm() <=
                          bound * (1.0 + 1e-12));
                }
        }
    }
    SECTION("degenerate systems are rejected") {
        EigenSystem degen;
        degen.energies << 0.0, 1.0, 1.0 + 1e-13;
        CHECK_THROWS_AS(build_polaron_frame(degen, 1e-7), secular_error);
    }
}

TEST_CASE("kernel K") {
    SECTION("zero temperature, negative frequency: both terms vanish") {
        BathSpec cold = bath300;
        cold.temperature_k = 0.0;
        CHECK(kernel_K(-1.0, cold) == 0.0);
    }
    SECTION("reference value at 2.5 eV, 300 K") {
        // psi2(0) gamma(2.5) - (w2*w0)(2.5), extended-precision quadrature
        CHECK(kernel_K(2.5, bath300) == Approx(1.4167842741322432e-17).epsilon(1e-7));
    }
    SECTION("positive across the optical window") {
        for (double omega : {0.25, 0.5, 1.0, 2.0, 2.8, -0.25, -1.0})
            CHECK(kernel_K(omega, bath300) > 0.0);
    }
    SECTION("detailed balance carries over to K") {
        const double omega = 0.8;
        const double lhs = kernel_K(-omega, bath300);
        const double rhs = kernel_K(omega, bath300) * std::exp(-bath300.beta() * omega);
        CHECK(lhs == Approx(rhs).epsilon(1e-6));
    }
    SECTION("halving the coupling at least halves K") {
        BathSpec half = bath300;
        half.coupling_strength *= 0.5;
        CHECK(kernel_K(2.5, half) <= 0.5 * kernel_K(2.5, bath300));
        CHECK(kernel_K(2.5, half) == Approx(0.25 * kernel_K(2.5, bath300)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(kernel_K(0.0, bath300), secular_error);
}

TEST_CASE("corrected rates") {
    const EigenSystem es = diag_case_a(dark_dimer_config());
    const double lambda = lambda_for(bath300);
    const PolaronFrame frame = build_polaron_frame(es, lambda);

    SECTION("dark transitions stay exactly dark") {
        CHECK(es.dipoles(0, 1).squaredNorm() == 0.0);
        const PolaronRate pr = corrected_rate(frame, es, bath300, 0, 1);
        CHECK(pr.rate_ev == 0.0);
        CHECK(full_polaron_rate(frame, es, bath300, 0, 1) == 0.0);
    }
    SECTION("no permanent dipoles, no correction") {
        DimerConfig cfg = dark_dimer_config();
        cfg.monomer1.dipoles.perm_excited = Vec3::Zero();
        cfg.monomer2.dipoles.perm_excited = Vec3::Zero();
        const EigenSystem bare = diag_case_a(cfg);
        const PolaronFrame f0 = build_polaron_frame(bare, lambda);
        const PolaronRate pr = corrected_rate(f0, bare, bath300, 0, 2);
        CHECK(pr.delta_gamma_ev() == 0.0);
        CHECK(pr.rate_ev == Approx(pr.sbrme_ev).margin(0));
    }
    SECTION("eV-scale transition with 10 D dipoles: correction below 1e-5 of the rate") {
        const PolaronRate pr = corrected_rate(frame, es, bath300, 0, 2);
        CHECK(pr.sbrme_ev > 0.0);
        CHECK(std::abs(pr.delta_gamma_ev()) / pr.sbrme_ev < 1e-5);
        CHECK(std::abs(pr.delta_gamma_ev()) > 0.0);
    }
    SECTION("kernel term is never positive") {
        std::mt19937_64 gen(67);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            DimerConfig cfg = dark_dimer_config();
            cfg.monomer1.dipoles.mu = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer2.dipoles.mu = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer1.dipoles.perm_excited = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            cfg.monomer2.dipoles.perm_excited = Vec3(u(gen), u(gen), u(gen)) * 10.0;
            const EigenSystem sys = diag_case_a(cfg);
            const PolaronFrame f = build_polaron_frame(sys, lambda);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    if (a == b) continue;
                    CHECK(corrected_rate(f, sys, bath300, a, b).term_kernel_ev <= 0.0);
                }
        }
    }
    SECTION("corrections vanish linearly in lambda") {
        const PolaronFrame f1 = build_polaron_frame(es, lambda);
        const PolaronFrame f8 = build_polaron_frame(es, lambda / 8.0);
        const double d1 = corrected_rate(f1, es, bath300, 0, 2).delta_gamma_ev();
        const double d8 = corrected_rate(f8, es, bath300, 0, 2).delta_gamma_ev();
        CHECK(d1 / d8 == Approx(8.0).epsilon(1e-3));
        const double full1 = full_polaron_rate(f1, es, bath300, 0, 2);
        const double full8 = full_polaron_rate(f8, es, bath300, 0, 2);
        const double sb = corrected_rate(f1, es, bath300, 0, 2).sbrme_ev;
        CHECK((full1 - sb) / (full8 - sb) == Approx(8.0).epsilon(1e-2));
    }
    SECTION("cross-term frequency flag stays higher order") {
        const PolaronRate at_bare = corrected_rate(frame, es, bath300, 0, 2, false);
        const PolaronRate at_shifted = corrected_rate(frame, es, bath300, 0, 2, true);
        const double diff = std::abs(at_bare.rate_ev - at_shifted.rate_ev);
        CHECK(diff < 1e-3 * std::abs(at_bare.delta_gamma_ev()));
    }
}

TEST_CASE("full polaron rate") {
    const double lambda = lambda_for(bath300);

    SECTION("no coupling and no permanent dipoles reduces to |d|^2 gamma") {
        DimerConfig cfg = dark_dimer_config();
        cfg.monomer1.dipoles.perm_excited = Vec3::Zero();
        cfg.monomer2.dipoles.perm_excited = Vec3::Zero();
        const EigenSystem bare = diag_case_a(cfg);
        const PolaronFrame f0 = build_polaron_frame(bare, 0.0);
        const double r = full_polaron_rate(f0, bare, bath300, 0, 2);
        const double expected =
            bare.dipoles(0, 2).squaredNorm() * gamma_rate(bare.energies(2) - bare.energies(0), bath300);
        CHECK(r == Approx(expected).epsilon(1e-12));
    }
    SECTION("difference from the truncated correction is higher order in the dipoles") {
        auto scaled_config = [](double s) {
            DimerConfig cfg = dark_dimer_config();
            cfg.monomer1.dipoles.perm_excited = Vec3(10, 0, 0) * s;
            cfg.monomer2.dipoles.perm_excited = Vec3(4, 0, 0) * s;
            return cfg;
        };
        auto ratio_for = [&](double s) {
            const EigenSystem sys = diag_case_a(scaled_config(s));
            const PolaronFrame f = build_polaron_frame(sys, lambda);
            const PolaronRate pr = corrected_rate(f, sys, bath300, 0, 2);
            const double full = full_polaron_rate(f, sys, bath300, 0, 2);
            return std::abs(full - pr.rate_ev) / std::abs(pr.delta_gamma_ev());
        };
        const double r_full = ratio_for(1.0);
        const double r_tenth = ratio_for(0.1);
        CHECK(r_tenth < r_full / 20.0);
    }
    SECTION("dark transition gives exactly zero") {
        const EigenSystem es = diag_case_a(dark_dimer_config());
        const PolaronFrame f = build_polaron_frame(es, lambda);
        CHECK(full_polaron_rate(f, es, bath300, 0, 1) == 0.0);
    }
}
