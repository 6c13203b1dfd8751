#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "modelspace/errors.hpp"
#include "modelspace/geometry.hpp"

using namespace modelspace;

namespace {

InnerFunction spiral_family(int n) {
    ZeroGenerator gen{"spiral", {{"base", 2.0}, {"twist", 1.0}, {"angle", 0.0}}, n};
    return InnerFunction({}, {}, gen);
}

// Distance from a boundary angle to the pseudo-hyperbolic disc {|b_a| < eps}.
double disc_level_distance(Complex a, double eps, double t) {
    const double ra2 = std::norm(a);
    const Complex centre = a * (1.0 - eps * eps) / (1.0 - eps * eps * ra2);
    const double radius = eps * (1.0 - ra2) / (1.0 - eps * eps * ra2);
    return std::abs(std::polar(1.0, t) - centre) - radius;
}

}  // namespace

TEST_CASE("arcs") {
    const Arc a = make_arc(-0.5, 0.5);
    CHECK(a.start == doctest::Approx(kTwoPi - 0.5));
    CHECK(a.length() == doctest::Approx(1.0));
    CHECK(a.measure() == doctest::Approx(1.0 / kTwoPi));
    CHECK(a.contains(0.0));
    CHECK(a.contains(0.5));
    CHECK_FALSE(a.contains(0.6));
    CHECK(a.contains_interior(0.2));
    CHECK_FALSE(a.contains_interior(0.5));
    CHECK(a.overlap(make_arc(0.0, 2.0)) == doctest::Approx(0.5));
    CHECK(a.overlap(make_arc(6.0, 7.0)) == doctest::Approx(0.5 + (kTwoPi - 6.0)).epsilon(1e-12));
    CHECK_THROWS_AS(make_arc(1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_arc(0.0, 7.0), InvalidArgument);
}

TEST_CASE("carleson and generic squares") {
    const auto s = carleson_square(arc_from_mid(0.0, 0.2 * kPi));
    CHECK(s.rho_lo() == doctest::Approx(0.9));
    CHECK(s.h0 == 1.0);
    CHECK(s.lower_side_length() == doctest::Approx(0.2 * kPi));
    CHECK(s.contains(1.0));
    CHECK(s.contains(std::polar(0.9, 0.0)));
    CHECK(s.contains(std::polar(0.95, 0.1 * kPi)));
    CHECK_FALSE(s.contains(std::polar(0.89, 0.0)));
    CHECK_FALSE(s.contains(std::polar(0.95, 0.11 * kPi)));
    CHECK_THROWS_AS(carleson_square(make_arc(0.0, kTwoPi)), InvalidArgument);

    const auto g = make_square(0.8, 1.0, 0.5);
    CHECK(g.rho_lo() == doctest::Approx(0.8 - 0.5 / kTwoPi));
    CHECK(g.lower_side_length() == doctest::Approx(0.4));
    CHECK(g.contains(g.midpoint()));
    CHECK_THROWS_AS(make_square(0.1, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("dyadic_locate") {
    CHECK(dyadic_locate(0.0) == DyadicSquare{1, 0});
    CHECK(dyadic_locate(std::polar(0.6, kPi / 3)) == DyadicSquare{2, 0});
    CHECK(dyadic_locate(std::polar(0.9, kPi)) == DyadicSquare{4, 8});
    CHECK(dyadic_locate(0.5) == DyadicSquare{2, 0});
    CHECK(dyadic_locate(0.4999999) == DyadicSquare{1, 0});
    CHECK(dyadic_locate(Complex(-1e-300, -1e-300)).level == 1);
    CHECK_THROWS_AS(dyadic_locate(1.0), InvalidArgument);
}

TEST_CASE("dyadic cells partition the disc") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double r = 1.0 - std::pow(2.0, -12.0 * u(rng));
        const double t = kTwoPi * u(rng);
        const Complex z = std::polar(r, t);
        const auto sq = dyadic_locate(z);
        CHECK(sq.contains(z));
        CHECK(sq.index >= 0);
        CHECK(sq.index < (std::int64_t{1} << sq.level));
        const double rz = std::abs(z);
        CHECK(rz >= sq.rho_lo());
        CHECK(rz < sq.rho_hi());
        // Independent count: exactly one cell among level-neighbours contains z.
        int owners = 0;
        for (int n = std::max(1, sq.level - 1); n <= sq.level + 1; ++n) {
            for (std::int64_t m = 0; m < (std::int64_t{1} << n); ++m) owners += DyadicSquare{n, m}.contains(z) ? 1 : 0;
        }
        CHECK(owners == 1);
    }
    // Areas of levels 1..L sum to the area of the disc of radius 1 - 2^-L.
    const int L = 6;
    double area = 0.0;
    for (int n = 1; n <= L; ++n) {
        for (std::int64_t m = 0; m < (std::int64_t{1} << n); ++m) {
            const DyadicSquare s{n, m};
            area += 0.5 * (s.phi_hi() - s.phi_lo()) * (s.rho_hi() * s.rho_hi() - s.rho_lo() * s.rho_lo());
        }
    }
    CHECK(area == doctest::Approx(kPi * std::pow(1.0 - std::pow(2.0, -L), 2)));
}

TEST_CASE("dyadic_cells_meeting against the radial oracle") {
    const auto z2 = InnerFunction::monomial(2);
    const double radius = std::sqrt(0.5);
    const auto fam = dyadic_cells_meeting(z2, 0.5, 8, DyadicMode::meets_level_set);
    CHECK(fam.undecided.empty());
    std::set<std::pair<int, std::int64_t>> got;
    for (const auto& c : fam.cells) got.insert({c.level, c.index});
    std::set<std::pair<int, std::int64_t>> want;
    for (int n = 1; n <= 8; ++n) {
        for (std::int64_t m = 0; m < (std::int64_t{1} << n); ++m) {
            if (DyadicSquare{n, m}.rho_lo() < radius) want.insert({n, m});
        }
    }
    CHECK(got == want);
    CHECK(got.count({1, 0}) == 1);
    CHECK(got.count({1, 1}) == 1);
    for (const auto& c : fam.cells) CHECK(c.level < 8);

    const double A = 12.0 * kPi + 2.0;
    const auto within = dyadic_cells_meeting(z2, 0.5, 8, DyadicMode::within_distance, A);
    std::set<std::pair<int, std::int64_t>> got_w;
    for (const auto& c : within.cells) got_w.insert({c.level, c.index});
    for (const auto& key : got) CHECK(got_w.count(key) == 1);
    for (int n = 1; n <= 8; ++n) {
        const double gap = std::max(0.0, DyadicSquare{n, 0}.rho_lo() - radius);
        const bool expected = gap <= A * std::ldexp(1.0, -n);
        const bool margin = std::abs(gap - A * std::ldexp(1.0, -n)) < 1e-9;
        if (margin) continue;
        for (std::int64_t m = 0; m < (std::int64_t{1} << n); ++m) {
            const bool in = got_w.count({n, m}) == 1;
            const bool und = std::find(within.undecided.begin(), within.undecided.end(), DyadicSquare{n, m}) != within.undecided.end();
            if (!und) CHECK(in == expected);
        }
    }
}

TEST_CASE("whitney: monomial z, eps 1/2") {
    const auto dec = whitney_decompose(InnerFunction::monomial(1), 0.5, 1e-6);
    int exact = 0, remainder = 0;
    for (const auto& a : dec.arcs) (a.threshold_exact ? exact : remainder)++;
    CHECK(exact == 50);
    CHECK(remainder == 1);
    CHECK(dec.excluded.empty());
    CHECK(dec.covered_measure() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& a : dec.arcs) {
        CHECK(a.distance.width() <= 1e-4);
        CHECK(a.distance.lo <= 0.5 + 1e-12);
        CHECK(a.distance.hi >= 0.5 - 1e-12);
        CHECK(3.0 * a.arc.length() <= a.distance.lo);
        if (a.threshold_exact) {
            CHECK(a.arc.measure() == doctest::Approx(1.0 / (16.0 * kPi)).epsilon(1e-4));
            CHECK(a.distance.hi <= 5.0 * a.arc.length());
        }
    }
    // Arcs are contiguous in marching order.
    for (std::size_t k = 1; k < dec.arcs.size(); ++k) {
        CHECK(std::abs(dec.arcs[k].arc.start - dec.arcs[k - 1].arc.end) < 1e-12);
    }
    CHECK(dec.g_constant() <= 15.0 * kPi);
    CHECK(dec.g_constant() > 0.0);

    const auto csv = dec.to_csv();
    CHECK(csv.rfind("k,start_angle,end_angle,d_lo,d_hi,threshold_exact\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);
}

TEST_CASE("whitney: single zero against the closed-form distance") {
    const Complex a(0.3, 0.5);
    const Complex zs[1] = {a};
    const auto b = InnerFunction::blaschke(zs);
    const double eps = 0.4;
    const auto dec = whitney_decompose(b, eps, 1e-6);
    REQUIRE(dec.arcs.size() > 10);
    for (const auto& w : dec.arcs) {
        // Simpson integral of 1/d against normalized measure with the exact d.
        const int n = 400;
        const double h = w.arc.length() / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += wt / disc_level_distance(a, eps, w.arc.start + i * h);
        }
        s *= h / 3.0 / kTwoPi;
        if (w.threshold_exact) {
            CHECK(s == doctest::Approx(kWhitneyThreshold).epsilon(1e-4));
        } else {
            CHECK(s <= kWhitneyThreshold * (1.0 + 1e-4));
        }
        double dmin = 1e300;
        for (int i = 0; i <= n; ++i) dmin = std::min(dmin, disc_level_distance(a, eps, w.arc.start + i * h));
        CHECK(w.distance.lo <= dmin + 1e-12);
        CHECK(3.0 * w.arc.length() <= w.distance.lo);
        if (w.threshold_exact) CHECK(w.distance.hi <= 5.0 * w.arc.length());
    }
}

TEST_CASE("whitney: arcs accumulate at a boundary spectrum point") {
    const auto dec = whitney_decompose(spiral_family(12), 0.5, 1e-6);
    REQUIRE(dec.arcs.size() > 20);
    REQUIRE(dec.excluded.size() == 1);
    CHECK(dec.excluded[0].contains(0.0));
    CHECK(dec.covered_measure() + dec.excluded[0].measure() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& a : dec.arcs) CHECK(3.0 * a.arc.length() <= a.distance.lo);
    // Lengths shrink toward angle 0 on both sides.
    const auto& first = dec.arcs.front().arc;
    const auto& last = dec.arcs.back().arc;
    CHECK(first.length() < 1e-5);
    CHECK(last.length() < 1e-5);
    CHECK(first.start == doctest::Approx(1e-6));
    for (std::size_t k = 1; k < 10; ++k) CHECK(dec.arcs[k].arc.length() > dec.arcs[k - 1].arc.length());
    CHECK(dec.in_F(std::polar(0.999999, 1.0)));
    CHECK_FALSE(dec.in_F(0.0));
}
