#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvnm/bath.hpp"
#include "cvnm/coefficients.hpp"
#include "test_util.hpp"

using namespace cvnm;

namespace {
BathSpec defaults(double x = 10.0, double alpha = 0.1, double T = 100.0) {
    return BathSpec::ohmic_lorentz_drude(x, alpha, T);
}
}  // namespace

TEST_CASE("spectral density") {
    const BathSpec b = defaults();
    CHECK(spectral_density(0.0, b) == 0.0);
    CHECK(spectral_density(1.0, b) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
    // Lorentz-Drude rolloff: J ~ 1/(pi w)
    CHECK(spectral_density(1e6, b) == doctest::Approx(1.0 / (M_PI * 1e6)).epsilon(1e-6));
    CHECK_THROWS_AS(spectral_density(-0.1, b), DomainError);
}

TEST_CASE("tabulated density interpolates and vanishes off-range") {
    TabulatedDensity t;
    t.omega = {0.0, 1.0, 2.0};
    t.value = {0.0, 1.0, 0.0};
    const BathSpec b = BathSpec::tabulated(t, 1.0, 0.1, 0.0);
    CHECK(spectral_density(0.5, b) == doctest::Approx(0.5));
    CHECK(spectral_density(1.5, b) == doctest::Approx(0.5));
    CHECK(spectral_density(3.0, b) == 0.0);
}

TEST_CASE("bose occupation") {
    CHECK(bose_occupation(1.0, 100.0) == doctest::Approx(99.5008333).epsilon(1e-8));
    CHECK(bose_occupation(0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(bose_occupation(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(bose_occupation(-1.0, 1.0), DomainError);
    // high-T behavior of the Bose function itself: 2N+1 = 2 T/w to 0.01%
    const double lhs = 2.0 * bose_occupation(1.0, 100.0) + 1.0;
    CHECK(std::fabs(lhs - 200.0) / 200.0 < 1e-4);
}

TEST_CASE("bath spec invariants") {
    const BathSpec b = defaults(0.2);
    CHECK(b.invariants_ok());
    CHECK(b.omega0 * b.resonance_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(BathSpec::ohmic_lorentz_drude(0.0, 0.1, 1.0), DomainError);
    CHECK_THROWS_AS(BathSpec::ohmic_lorentz_drude(1.0, -0.1, 1.0), DomainError);
    CHECK_THROWS_AS(BathSpec::ohmic_lorentz_drude(1.0, 0.1, -1.0), DomainError);
}

TEST_CASE("closed-form coefficients vanish at tau = 0") {
    const CoefficientSet c = coefficients_closed_form(0.0, defaults());
    CHECK(c.Delta == 0.0);
    CHECK(c.Pi == 0.0);
    CHECK(c.gamma == 0.0);
    CHECK(c.r_ren == 0.0);
    CHECK_FALSE(c.r_ren_evaluated);
}

TEST_CASE("closed form rejects non-Ohmic families") {
    TabulatedDensity t;
    t.omega = {0.0, 1.0};
    t.value = {0.0, 0.3};
    const BathSpec b = BathSpec::tabulated(t, 10.0, 0.1, 100.0);
    CHECK_THROWS_AS(coefficients_closed_form(1.0, b), UnsupportedFamilyError);
}

TEST_CASE("damping asymptote and Delta/gamma ratio") {
    const BathSpec b = defaults();
    // gamma(inf) = alpha^2 omega0 x^2 / (2 (1+x^2)) = 0.1/202
    const double ginf = coefficients_closed_form(60.0, b).gamma;
    CHECK(ginf == doctest::Approx(0.1 / 202.0).epsilon(1e-10));
    // Delta/gamma -> x * T at late times
    const CoefficientSet late = coefficients_closed_form(80.0, b);
    CHECK(late.Delta / late.gamma == doctest::Approx(10.0 * 100.0).epsilon(1e-10));
    // Pi = T * gamma in this branch
    for (double tau : {0.3, 1.7, 6.0}) {
        const CoefficientSet c = coefficients_closed_form(tau, b);
        CHECK(c.Pi == doctest::Approx(100.0 * c.gamma).epsilon(1e-13));
    }
}

TEST_CASE("Delta changes sign for x = 0.2 while gamma stays nonnegative") {
    const BathSpec slow = defaults(0.2);
    bool delta_negative = false;
    double gamma_min = 1e300;
    for (int i = 1; i <= 4000; ++i) {
        const double tau = 40.0 * i / 4000.0;
        const CoefficientSet c = coefficients_closed_form(tau, slow);
        delta_negative = delta_negative || c.Delta < 0.0;
        gamma_min = std::min(gamma_min, c.gamma);
    }
    CHECK(delta_negative);
    CHECK(gamma_min >= 0.0);
    for (double x : {1.0, 10.0}) {
        const BathSpec b = defaults(x);
        for (int i = 1; i <= 400; ++i)
            CHECK(coefficients_closed_form(40.0 * i / 400.0, b).gamma >= 0.0);
    }
}

TEST_CASE("temperature linearity and exact alpha^2 scaling") {
    const BathSpec b1 = defaults(10.0, 0.1, 100.0);
    const BathSpec b2 = defaults(10.0, 0.1, 200.0);
    const CoefficientSet c1 = coefficients_closed_form(2.0, b1);
    const CoefficientSet c2 = coefficients_closed_form(2.0, b2);
    CHECK(c2.Delta == doctest::Approx(2.0 * c1.Delta).epsilon(1e-14));
    CHECK(c2.Pi == doctest::Approx(2.0 * c1.Pi).epsilon(1e-14));
    CHECK(c2.gamma == doctest::Approx(c1.gamma).epsilon(1e-14));

    const BathSpec a1 = defaults(10.0, 0.05, 100.0);
    const BathSpec a2 = defaults(10.0, 0.10, 100.0);
    const CoefficientSet d1 = coefficients_closed_form(3.0, a1);
    const CoefficientSet d2 = coefficients_closed_form(3.0, a2);
    CHECK(d2.Delta == doctest::Approx(4.0 * d1.Delta).epsilon(1e-14));
    CHECK(d2.gamma == doctest::Approx(4.0 * d1.gamma).epsilon(1e-14));
    const CoefficientSet q1 = coefficients_quadrature(1.0, a1);
    const CoefficientSet q2 = coefficients_quadrature(1.0, a2);
    CHECK(q2.Delta == doctest::Approx(4.0 * q1.Delta).epsilon(1e-12));
    CHECK(q2.r_ren == doctest::Approx(4.0 * q1.r_ren).epsilon(1e-12));
}

TEST_CASE("quadrature reproduces the closed forms in the high-T window") {
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-12;
    const BathSpec b = defaults();
    CHECK(coefficients_quadrature(0.0, b, opt).Delta == 0.0);

    const CoefficientSet cf = coefficients_closed_form(5.0, b);
    const CoefficientSet q = coefficients_quadrature(5.0, b, opt);
    CHECK(std::fabs(q.Delta - cf.Delta) / std::fabs(cf.Delta) < 1e-6);
    CHECK(std::fabs(q.Pi - cf.Pi) / std::fabs(cf.Pi) < 1e-6);
    CHECK(std::fabs(q.gamma - cf.gamma) / std::fabs(cf.gamma) < 1e-6);
    CHECK(q.r_ren_evaluated);
    // r_ren integrates the same inner transform as Delta without the thermal
    // weight, so the linear-kernel branch obeys r_ren = Delta / T exactly
    CHECK(q.r_ren == doctest::Approx(cf.Delta / 100.0).epsilon(1e-7));

    // spread over the high-T validity window (subset; acceptance runs the full grid)
    for (double x : {0.2, 1.0, 10.0}) {
        const BathSpec bb = defaults(x);
        for (double tau : {0.5, 2.0, 10.0}) {
            const CoefficientSet c = coefficients_closed_form(tau, bb);
            const CoefficientSet qq = coefficients_quadrature(tau, bb, opt);
            CHECK(std::fabs(qq.Delta - c.Delta) <= 1e-5 * std::fabs(c.Delta));
            CHECK(std::fabs(qq.Pi - c.Pi) <= 1e-5 * std::fabs(c.Pi));
            CHECK(std::fabs(qq.gamma - c.gamma) <= 1e-5 * std::fabs(c.gamma));
        }
    }
}

TEST_CASE("gamma asymptote reached through quadrature as well") {
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-12;
    const CoefficientSet q = coefficients_quadrature(30.0, defaults(), opt);
    CHECK(q.gamma == doctest::Approx(0.1 / 202.0).epsilon(1e-6));
}

TEST_CASE("vacuum bath coefficients against the exponential-integral reference") {
    const BathSpec b0 = defaults(10.0, 0.1, 0.0);
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-10;
    for (double tau : {0.5, 1.0, 3.0}) {
        const CoefficientSet q = coefficients_quadrature(tau, b0, opt);
        QuadOptions o2;
        o2.abs_tol = 1e-12;
        const double ref = 0.01 * integrate_adaptive(
                                      [&](double s) {
                                          return (1.0 / M_PI) * testutil::lorentz_cos_transform(s) *
                                                 std::cos(0.1 * s);
                                      },
                                      0.0, tau, o2)
                                      .value;
        CHECK(q.Delta == doctest::Approx(ref).epsilon(1e-7));
        // gamma has no thermal weight: closed form applies at any temperature
        const BathSpec bt = defaults(10.0, 0.1, 100.0);
        CHECK(q.gamma == doctest::Approx(coefficients_closed_form(tau, bt).gamma).epsilon(1e-8));
    }
}

TEST_CASE("exact kernel carries twice the linearized thermal diffusion") {
    const BathSpec b = defaults();
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-9;
    opt.kernel = ThermalKernel::Exact;
    const CoefficientSet qe = coefficients_quadrature(2.0, b, opt);
    const CoefficientSet cf = coefficients_closed_form(2.0, b);
    CHECK(qe.Delta / cf.Delta == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(qe.gamma == doctest::Approx(cf.gamma).epsilon(1e-8));
}

TEST_CASE("tabulated Lorentz-Drude table matches the analytic family") {
    // knots dense through the kernel structure, sparser along the thermal tail;
    // comparison tolerance is set by the interpolation and truncation error
    TabulatedDensity t;
    for (double w = 0.0; w <= 12.0; w += 0.004) {
        t.omega.push_back(w);
        t.value.push_back((1.0 / M_PI) * w / (w * w + 1.0));
    }
    for (double w = 12.2; w <= 400.0; w += 0.2) {
        t.omega.push_back(w);
        t.value.push_back((1.0 / M_PI) * w / (w * w + 1.0));
    }
    const BathSpec tab = BathSpec::tabulated(t, 10.0, 0.1, 100.0);
    const BathSpec ohm = defaults();
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-7;
    opt.inner_tol_factor = 1e-2;
    const CoefficientSet a = coefficients_quadrature(1.0, tab, opt);
    const CoefficientSet b = coefficients_quadrature(1.0, ohm, opt);
    CHECK(a.Delta == doctest::Approx(b.Delta).epsilon(2e-3));
    CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(2e-3));
}

TEST_CASE("quadrature failure carries the achieved error estimate") {
    CoefficientQuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.max_depth = 1;  // starve the outer bisection
    bool threw = false;
    try {
        coefficients_quadrature(40.0, defaults(0.2), opt);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(e.achieved > 0.0);
    }
    CHECK(threw);
}

TEST_CASE("dispatcher picks the closed form only in its validity window") {
    // below the threshold the generic path runs (vacuum kernel here)
    const BathSpec cold = defaults(10.0, 0.1, 0.0);
    const CoefficientSet c = master_equation_coefficients(1.0, cold);
    CHECK(c.r_ren_evaluated);  // quadrature branch marks r_ren as computed
    const BathSpec hot = defaults();
    CHECK_FALSE(master_equation_coefficients(1.0, hot).r_ren_evaluated);
}
