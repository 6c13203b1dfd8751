// Acceptance run: one PASS/FAIL line per criterion.
//
// Usage: modelspace_acceptance [--known-failure N]...
// Exits 0 when every failing criterion is listed as a known failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "modelspace/criteria.hpp"
#include "modelspace/kernels.hpp"
#include "modelspace/spectral.hpp"
#include "random_cases.hpp"

using namespace modelspace;
using namespace modelspace::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_dev_from_identity(const Eigen::MatrixXcd& g) {
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

Complex random_interior(std::mt19937_64& rng, double rmax) {
    return std::polar(rmax * std::sqrt(uniform(rng, 0.0, 1.0)), uniform(rng, 0.0, kTwoPi));
}

Outcome kernel_closed_form() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const InnerFunction b = InnerFunction::blaschke(random_zeros(rng, uniform_int(rng, 1, 8), 0.95));
        const Complex z = random_interior(rng, 0.98);
        const double quad = std::pow(kernel_norm(b, z, 2.0, 1, 1e-12), 2);
        const double exact = kernel_norm_squared_closed_form(b, z);
        worst = std::max(worst, std::abs(quad - exact) / exact);
    }
    return {worst <= 1e-8, fmt("200 cases, max relative error %.3g (limit 1e-8)", worst)};
}

Outcome clark_isometry() {
    std::mt19937_64 rng(1002);
    std::vector<InnerFunction> products{InnerFunction::monomial(2), InnerFunction::monomial(5)};
    for (int i = 0; i < 5; ++i) products.push_back(InnerFunction::blaschke(random_zeros(rng, uniform_int(rng, 1, 8), 0.95)));
    double worst = 0.0;
    for (const auto& b : products) {
        for (Complex alpha : {Complex(1.0), std::polar(1.0, kPi / 4)}) {
            worst = std::max(worst, max_dev_from_identity(embedding_gram(b, clark_measure(b, alpha)).matrix));
        }
    }
    return {worst <= 1e-8, fmt("14 Gram matrices, max entry deviation %.3g (limit 1e-8)", worst)};
}

Outcome trace_identity() {
    std::mt19937_64 rng(1003);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const InnerFunction b = InnerFunction::blaschke(random_zeros(rng, uniform_int(rng, 1, 8), 0.95));
        std::vector<MeasureAtom> atoms;
        const int count = uniform_int(rng, 1, 8);
        for (int i = 0; i < count; ++i) {
            const double rho = uniform_int(rng, 0, 3) == 0 ? 1.0 : std::sqrt(uniform(rng, 0.0, 1.0)) * 0.99;
            atoms.push_back({std::polar(rho, uniform(rng, 0.0, kTwoPi)), uniform(rng, 0.01, 2.0)});
        }
        const DiscMeasure mu(atoms);
        const double trace = embedding_gram(b, mu).matrix.trace().real();
        const double hs = hs_integral(b, mu);
        worst = std::max(worst, std::abs(trace - hs) / hs);
    }
    return {worst <= 1e-10, fmt("20 atomic measures, max relative deviation %.3g (limit 1e-10)", worst)};
}

Outcome whitney_invariants() {
    const auto dec = whitney_decompose(InnerFunction::monomial(1), 0.5, 1e-6);
    int exact = 0;
    int remainder = 0;
    bool sandwich = true;
    double width = 0.0;
    for (const auto& a : dec.arcs) {
        (a.threshold_exact ? exact : remainder)++;
        if (!a.threshold_exact) continue;
        width = std::max(width, a.distance.width());
        sandwich = sandwich && 3.0 * a.arc.length() <= a.distance.lo && a.distance.hi <= 5.0 * a.arc.length();
    }
    const auto spiral = whitney_decompose(spiral_family(12), 0.5, 1e-6);
    bool lower = true;
    for (const auto& a : spiral.arcs) lower = lower && 3.0 * a.arc.length() <= a.distance.lo;
    // Lengths grow away from angle 0 on both sides and vanish at the ends.
    bool shrinking = spiral.arcs.size() > 20;
    const std::size_t m = spiral.arcs.size();
    for (std::size_t k = 1; shrinking && k < 10; ++k) {
        shrinking = spiral.arcs[k].arc.length() > spiral.arcs[k - 1].arc.length() &&
                    spiral.arcs[m - 1 - k].arc.length() > spiral.arcs[m - k].arc.length();
    }
    const double end_length = std::max(spiral.arcs.front().arc.length(), spiral.arcs.back().arc.length());
    shrinking = shrinking && end_length < 1e-5;
    const bool pass = exact == 50 && remainder == 1 && sandwich && width <= 1e-4 && lower && shrinking;
    return {pass, fmt("z: %d exact + %d remainder, 3|I|<=d<=5|I| %s, bracket width %.2g; spiral N=12: %zu arcs, "
                      "lower bound %s, end arc length %.2g",
                      exact, remainder, sandwich ? "yes" : "no", width, m, lower ? "yes" : "no", end_length)};
}

Outcome log_bound() {
    std::mt19937_64 rng(1005);
    int violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto zeros = random_zeros(rng, uniform_int(rng, 1, 8), 0.99);
        const InnerFunction b = InnerFunction::blaschke(zeros);
        const Complex z = random_interior(rng, 0.999);
        double s = 0.0;
        for (Complex a : zeros) s += (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z);
        const double lhs = std::log(std::norm(evaluate(b, z)));
        // Rounding slack only.
        violations += lhs > -(1.0 - std::norm(z)) * s + 1e-12 * std::abs(lhs);
    }
    return {violations == 0, fmt("10000 cases, %d violations", violations)};
}

Outcome levin() {
    std::mt19937_64 rng(1006);
    std::normal_distribution<double> g(0.0, 1.0);
    int violations = 0;
    int trials = 0;
    double worst = 0.0;
    while (trials < 100) {
        const auto zeros = random_zeros(rng, uniform_int(rng, 1, 6), 0.9);
        const double t = uniform(rng, 0.0, kTwoPi);
        bool near_projection = false;
        for (Complex a : zeros) near_projection = near_projection || (std::abs(a) > 0.0 && angular_gap(std::arg(a), t) < 1e-3);
        if (near_projection) continue;
        Eigen::VectorXcd c(static_cast<Eigen::Index>(zeros.size()));
        for (auto& x : c) x = Complex(g(rng), g(rng));
        const auto res = levin_check(InnerFunction::blaschke(zeros), c, std::polar(1.0, t));
        violations += !res.holds;
        worst = std::max(worst, res.ratio);
        ++trials;
    }
    return {violations == 0, fmt("100 cases, %d violations, max ratio %.4f (limit 1.001)", violations, worst)};
}

Outcome bernstein() {
    const auto r4 = bernstein_ratio(InnerFunction::monomial(4), DiscMeasure::arc_measure(),
                                    {2.0, 1, WeightKind::d_eps_pow_n, 0.5});
    const double expected = 3.0 * (1.0 - std::pow(0.5, 0.25));
    const auto r1 = bernstein_ratio(InnerFunction::monomial(1), DiscMeasure::arc_measure(),
                                    {2.0, 1, WeightKind::d_eps_pow_n, 0.5});
    const double err = std::abs(r4.value - expected);
    return {err <= 1e-6 && r1.value == 0.0,
            fmt("z^4: %.9f vs %.9f (error %.2g, limit 1e-6); z: %g", r4.value, expected, err, r1.value)};
}

Outcome coherence() {
    std::vector<double> grid;
    for (int j = 1; j <= 10; ++j) grid.push_back(std::ldexp(1.0, -j));

    std::mt19937_64 rng_a(1081);
    int clash = 0;
    int v1_holds = 0;
    int v2_fails = 0;
    int v1_holds_spectrum = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const InnerFunction theta = random_inner(rng_a);
        const DiscMeasure mu = random_measure(rng_a, theta);
        const double eps = uniform(rng_a, 0.2, 0.8);
        const Verdict v1 = check_V1(theta, mu, grid, eps, 10).verdict;
        const Verdict v2 = check_V2(theta, eps, mu, 10).verdict;
        v1_holds += v1 == Verdict::holds_at_resolution;
        v1_holds_spectrum += v1 == Verdict::holds_at_resolution && !theta.boundary_spectrum().empty();
        v2_fails += v2 == Verdict::fails_with_witness;
        clash += v1 == Verdict::holds_at_resolution && v2 == Verdict::fails_with_witness;
    }

    std::mt19937_64 rng_b(1082);
    int disorder = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const InnerFunction theta = random_inner(rng_b);
        const DiscMeasure mu = random_interior_measure(rng_b, uniform_int(rng_b, 1, 12));
        const double eps = uniform(rng_b, 0.2, 0.8);
        const double r = uniform(rng_b, 0.5, 3.0);
        const double A = uniform(rng_b, 0.01, 4.0);
        const double all = luecking_sum(mu, r, 8).value;
        const double near = thm54_family_sum(theta, eps, A, mu, r, 8).value;
        const double meets = schatten_necessary_sum(theta, eps, mu, r, 8).value;
        disorder += all < near * (1.0 - 1e-12) || near < meets * (1.0 - 1e-12);
    }

    std::mt19937_64 rng_c(1083);
    const auto whitney = whitney_decompose(InnerFunction::monomial(1), 0.5, 1e-6);
    const auto squares = whitney_squares(whitney);
    int missed = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::optional<Witness> w;
        DiscMeasure mu;
        bool certified = true;
        switch (trial % 3) {
            case 0: {
                auto zeros = random_zeros(rng_c, uniform_int(rng_c, 1, 4), 0.95);
                for (Complex& z : zeros) {
                    if (std::abs(z) < 0.5) z = std::polar(0.5 + 0.45 * std::abs(z), std::arg(z));
                }
                const InnerFunction theta = InnerFunction::blaschke(zeros);
                const double C = uniform(rng_c, 0.1, 10.0);
                const double eps = uniform(rng_c, 0.2, 0.8);
                mu = random_interior_measure(rng_c, 3).plus(DiscMeasure({{zeros[0], 4.0 * kTwoPi * C}}));
                const auto rep = check_volberg_treil(theta, eps, mu, 8, C);
                if (rep.verdict == Verdict::fails_with_witness) w = rep.witness;
                certified = w && box_meets_level_set(theta, eps, w->square.box()) == Certified::yes;
                break;
            }
            case 1: {
                mu = random_interior_measure(rng_c, 4).plus(
                    DiscMeasure({{std::polar(1.0, uniform(rng_c, 0.0, kTwoPi)), uniform(rng_c, 1e-3, 1.0)}}));
                const auto rep = check_carleson(mu, 12);
                if (rep.verdict == Verdict::fails_with_witness) w = rep.witness;
                break;
            }
            default: {
                const auto k = static_cast<std::size_t>(uniform_int(rng_c, 0, static_cast<int>(squares.size()) - 1));
                std::vector<MeasureAtom> atoms;
                for (std::size_t j = 0; j < squares.size(); ++j) {
                    atoms.push_back({squares[j].midpoint(), squares[j].lower_side_length() * uniform(rng_c, 0.0, 1.0)});
                }
                atoms[k].mass = std::ldexp(2.0, 10) * squares[k].lower_side_length();
                mu = DiscMeasure(atoms);
                const auto rep = check_thm31(InnerFunction::monomial(1), squares, mu, 3.0, 2.0, 10);
                if (rep.bounded.verdict == Verdict::fails_with_witness) w = rep.bounded.witness;
                break;
            }
        }
        missed += !(w && verify_witness(mu, *w) && certified);
    }
    const bool pass = clash == 0 && disorder == 0 && missed == 0;
    return {pass, fmt("(a) %d of 200 with V1 holds and V2 fails [V1 holds %d, %d with boundary spectrum; V2 fails %d]; (b) %d of 200 out of "
                      "order; (c) %d of 200 planted violations without a verified witness",
                      clash, v1_holds, v1_holds_spectrum, v2_fails, disorder, missed)};
}

Outcome spiral_reproduction() {
    const DiscMeasure delta1({{Complex(1.0, 0.0), 1.0}});
    const auto vt = check_volberg_treil(spiral_family(40), 0.5, delta1, 7);
    const bool fails = vt.verdict == Verdict::fails_with_witness && vt.witness && verify_witness(delta1, *vt.witness);
    std::vector<double> norms;
    for (int n = 1; n <= 12; ++n) {
        const InnerFunction finite = InnerFunction::blaschke(spiral_family(n).flat_zeros());
        norms.push_back(operator_norm(singular_values(embedding_gram(finite, delta1))));
    }
    const double sup = *std::max_element(norms.begin(), norms.end());
    const bool bounded = sup <= 2.0 * norms[5];
    return {fails && bounded, fmt("volberg_treil %s (witness ratio %.4g); operator norms N=1..12 sup %.6f, "
                                  "N=6 value %.6f, bounded %s",
                                  to_string(vt.verdict), vt.witness ? vt.witness->ratio : 0.0, sup, norms[5],
                                  bounded ? "yes" : "no")};
}

Outcome compactness_proxy() {
    const InnerFunction family = radial_family(12);
    auto measure_for = [](const InnerFunction& theta) {
        const auto w = whitney_decompose(theta, 0.5, 1e-6);
        std::vector<MeasureAtom> atoms;
        for (std::size_t k = 0; k < w.arcs.size(); ++k) {
            const Arc& I = w.arcs[k].arc;
            atoms.push_back({carleson_square(I).midpoint(), I.length() / static_cast<double>(k + 1)});
        }
        return DiscMeasure(std::move(atoms));
    };
    const auto rows = compactness_profile(family, {8, 10, 12}, measure_for, 5);
    bool monotone = true;
    std::string values;
    for (std::size_t k = 5; k <= 8; ++k) {
        values += fmt(" s%zu:", k);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            values += fmt(" %.4g", rows[i].singular_values[k - 1]);
            if (i > 0 && rows[i].singular_values[k - 1] > rows[i - 1].singular_values[k - 1]) monotone = false;
        }
    }
    for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].tail <= rows[i - 1].tail;
    return {monotone, "N = 8, 10, 12:" + values +
                          fmt("; tails beyond s5: %.4g %.4g %.4g", rows[0].tail, rows[1].tail, rows[2].tail)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) {
            known.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--known-failure N]...\n", argv[0]);
            return 64;
        }
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"kernel closed form", kernel_closed_form},
        {"Clark isometry", clark_isometry},
        {"trace identity", trace_identity},
        {"Whitney invariants", whitney_invariants},
        {"Blaschke log bound", log_bound},
        {"Levin inequality", levin},
        {"Bernstein ratio exact cases", bernstein},
        {"criterion coherence", coherence},
        {"spiral example reproduction", spiral_reproduction},
        {"compactness proxy", compactness_proxy},
    };
    int unexpected = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool expected_fail = known.count(id) > 0;
        if (!out.pass && !expected_fail) ++unexpected;
        std::printf("criterion %2d %s  %s: %s [%.1f s]%s\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first,
                    out.detail.c_str(), secs, !out.pass && expected_fail ? " (known failure)" : "");
        std::fflush(stdout);
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("total %.1f s\n", total);
    return unexpected == 0 ? 0 : 1;
}
