#include <doctest.h>

#include <cmath>
#include <random>

#include "modelspace/errors.hpp"
#include "modelspace/kernels.hpp"
#include "modelspace/spectral.hpp"

using namespace modelspace;

namespace {

std::vector<Complex> random_zeros(std::mt19937_64& rng, int n, double rmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Complex> z;
    for (int i = 0; i < n; ++i) z.push_back(std::polar(rmax * std::sqrt(u(rng)), kTwoPi * u(rng)));
    return z;
}

Eigen::VectorXcd random_coeffs(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd c(n);
    for (int i = 0; i < n; ++i) c[i] = Complex(g(rng), g(rng));
    return c;
}

const double kFourthRootGap = 1.0 - std::pow(0.5, 0.25);

}  // namespace

TEST_CASE("reproducing kernel examples") {
    const InnerFunction z2 = InnerFunction::monomial(2);
    CHECK(std::abs(reproducing_kernel(z2, 0.0, Complex(0.3, 0.2)) - 1.0) < 1e-15);
    CHECK(std::abs(reproducing_kernel(z2, 0.5, 1.0) - 1.5) < 1e-15);
    const std::vector<Complex> half{Complex(0.5, 0.0)};
    const InnerFunction b = InnerFunction::blaschke(half);
    CHECK(reproducing_kernel(b, -1.0, -1.0).real() == doctest::Approx(1.0 / 3.0));
    const InnerFunction atom({}, {{0.0, 1.0}});
    CHECK_THROWS_AS(reproducing_kernel(atom, 1.0, 1.0), UndefinedDiagonal);
}

TEST_CASE("kernel norm examples") {
    const InnerFunction z2 = InnerFunction::monomial(2);
    CHECK(kernel_norm(z2, 0.5, 2.0, 1, 1e-12) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
    const InnerFunction z1 = InnerFunction::monomial(1);
    for (double q : {1.0, 1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
        CHECK(kernel_norm(z1, Complex(0.3, 0.6), q, 1, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(kernel_norm(z2, 0.0, 4.0, 2, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
    // Boundary points: ||k_zeta||_2^2 = |Theta'(zeta)|.
    CHECK(std::pow(kernel_norm(z2, std::polar(1.0, 0.4), 2.0, 1, 1e-12), 2) == doctest::Approx(2.0).epsilon(1e-10));
    const InnerFunction atom({}, {{0.0, 1.0}});
    CHECK(std::isinf(kernel_norm(atom, 1.0, 2.0, 1, 1e-10)));
    // sup norm of k_z for z^2 at z = 0.5 is 1 + |z|.
    CHECK(kernel_norm(z2, 0.5, std::numeric_limits<double>::infinity(), 1, 1e-12) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK_THROWS_AS(kernel_norm(z2, 0.5, 0.5, 1, 1e-12), InvalidArgument);
}

TEST_CASE("kernel norm agrees with the closed form") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const InnerFunction b = InnerFunction::blaschke(random_zeros(rng, 1 + trial % 8, 0.95));
        const Complex z = std::polar(0.98 * std::sqrt(u(rng)), kTwoPi * u(rng));
        const double quad = std::pow(kernel_norm(b, z, 2.0, 1, 1e-11), 2);
        CHECK(quad == doctest::Approx(kernel_norm_squared_closed_form(b, z)).epsilon(1e-8));
    }
}

TEST_CASE("bernstein weights") {
    const InnerFunction z1 = InnerFunction::monomial(1);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        for (int n : {1, 2}) {
            BernsteinWeightSpec spec{p, n, WeightKind::w_pn, 0.5};
            CHECK(bernstein_weight(z1, Complex(0.2, 0.5), spec, 1e-10).value == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(bernstein_weight(z1, std::polar(1.0, 2.0), spec, 1e-10).value == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    const InnerFunction atom({}, {{0.0, 1.0}});
    CHECK(bernstein_weight(atom, 1.0, {2.0, 1, WeightKind::w_pn, 0.5}, 1e-10).value == 0.0);

    const InnerFunction z4 = InnerFunction::monomial(4);
    CHECK(bernstein_weight(z4, std::polar(1.0, 1.1), {2.0, 1, WeightKind::theta_prime_inv_n, 0.5}, 1e-10).value ==
          doctest::Approx(0.25));
    const auto d = bernstein_weight(z4, std::polar(1.0, 1.1), {2.0, 2, WeightKind::d_eps_pow_n, 0.5}, 1e-9);
    CHECK(d.value == doctest::Approx(kFourthRootGap * kFourthRootGap).epsilon(1e-7));
    CHECK(d.uncertainty <= 1e-9);

    BernsteinWeightSpec spec{2.0, 1, WeightKind::w_pn, 0.5};
    CHECK(spec.conjugate() == doctest::Approx(2.0));
    CHECK(spec.exponent() == doctest::Approx(-2.0 / 3.0));
    CHECK(BernsteinWeightSpec{1.0, 1, WeightKind::w_pn, 0.5}.conjugate() == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(bernstein_weight(z4, 0.0, {0.5, 1, WeightKind::w_pn, 0.5}, 1e-9), InvalidArgument);
}

TEST_CASE("integral representations") {
    const InnerFunction z2 = InnerFunction::monomial(2);
    Eigen::VectorXcd one(2);
    one << 1.0, 0.0;
    CHECK(derivative_representation_check(z2, one, 1, 0.3, 1e-13) <= 1e-10);
    Eigen::VectorXcd lin(2);
    lin << 0.0, 1.0;
    CHECK(derivative_representation_check(z2, lin, 1, Complex(-0.2, 0.6), 1e-13) <= 1e-10);

    std::mt19937_64 rng(31);
    const InnerFunction z5 = InnerFunction::monomial(5);
    const Eigen::VectorXcd c5 = random_coeffs(rng, 5);
    CHECK(derivative_representation_check(z5, c5, 2, std::polar(0.4, 1.0), 1e-12) <= 1e-8);

    for (int trial = 0; trial < 10; ++trial) {
        const InnerFunction b = InnerFunction::blaschke(random_zeros(rng, 2 + trial % 6, 0.9));
        const Eigen::VectorXcd c = random_coeffs(rng, b.zero_count());
        const Complex z = std::polar(0.9 * std::sqrt(std::uniform_real_distribution<double>(0, 1)(rng)), 0.3 * trial);
        CHECK(reproducing_property_check(b, c, z, 1e-12) <= 1e-8 * c.norm());
        CHECK(derivative_representation_check(b, c, 1 + trial % 3, z, 1e-12) <= 1e-8 * c.norm() * 100.0);
        // Boundary points off the spectrum.
        CHECK(derivative_representation_check(b, c, 1, std::polar(1.0, 0.7 * trial), 1e-12) <= 1e-7 * c.norm() * 100.0);
    }
}

TEST_CASE("bernstein ratio exact cases") {
    const InnerFunction z4 = InnerFunction::monomial(4);
    const auto r = bernstein_ratio(z4, DiscMeasure::arc_measure(), {2.0, 1, WeightKind::d_eps_pow_n, 0.5});
    CHECK(r.exact);
    CHECK(std::abs(r.value - 3.0 * kFourthRootGap) <= 1e-6);
    CHECK(std::abs(r.extremal[3]) == doctest::Approx(1.0).epsilon(1e-6));

    const InnerFunction z1 = InnerFunction::monomial(1);
    for (auto kind : {WeightKind::w_pn, WeightKind::d_eps_pow_n, WeightKind::theta_prime_inv_n}) {
        CHECK(bernstein_ratio(z1, DiscMeasure::arc_measure(), {2.0, 1, kind, 0.5}).value == 0.0);
        CHECK(bernstein_ratio(z1, DiscMeasure({{Complex(0.3), 1.0}}), {3.0, 1, kind, 0.5}, 16, 1).value == 0.0);
    }

    const InnerFunction z2 = InnerFunction::monomial(2);
    CHECK(bernstein_ratio(z2, DiscMeasure::arc_measure(), {2.0, 1, WeightKind::theta_prime_inv_n, 0.5}).value ==
          doctest::Approx(0.5).epsilon(1e-10));

    // For p != 2 the sampled value is a lower bound; the Bernstein inequality
    // for polynomials of degree 3 caps it at 3 d_eps, attained by zeta^3.
    const auto sampled = bernstein_ratio(z4, DiscMeasure::arc_measure(), {3.0, 1, WeightKind::d_eps_pow_n, 0.5}, 64, 7);
    CHECK_FALSE(sampled.exact);
    CHECK(sampled.samples == 64);
    CHECK(sampled.value == doctest::Approx(3.0 * kFourthRootGap).epsilon(1e-6));
    const auto again = bernstein_ratio(z4, DiscMeasure::arc_measure(), {3.0, 1, WeightKind::d_eps_pow_n, 0.5}, 64, 7);
    CHECK(again.value == sampled.value);
}

TEST_CASE("levin inequality on random elements") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const InnerFunction b = InnerFunction::blaschke(random_zeros(rng, 1 + trial % 6, 0.9));
        const Eigen::VectorXcd c = random_coeffs(rng, b.zero_count());
        const auto res = levin_check(b, c, std::polar(1.0, kTwoPi * u(rng)));
        violations += !res.holds;
        CHECK(res.theta_prime > 0.0);
    }
    CHECK(violations == 0);
    // Equality case: f = k_zeta-like extremal for z^N at zeta = 1 is f = zeta^{N-1}.
    Eigen::VectorXcd mono = Eigen::VectorXcd::Zero(3);
    mono[2] = 1.0;
    const auto eq = levin_check(InnerFunction::monomial(3), mono, 1.0);
    CHECK(eq.ratio == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("kernel diagnostics") {
    const InnerFunction b = InnerFunction::blaschke(std::vector<Complex>{Complex(0.5, 0.2), Complex(-0.3, 0.6)});
    const auto rows = weight_sandwich(b, {2.0, 1, WeightKind::w_pn, 0.3}, {0.1, 1.5, 3.0, 4.5}, 1e-8);
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        CHECK(row.weight > 0.0);
        CHECK(std::isfinite(row.lower_ratio));
        CHECK(std::isfinite(row.upper_ratio));
    }
    const double radial = radial_monotonicity(b, 3.0, 10, 5, 1e-8);
    CHECK(radial > 0.0);
    CHECK(std::isfinite(radial));
}
