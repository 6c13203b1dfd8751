#include "modelspace/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "modelspace/errors.hpp"
#include "modelspace/level_set.hpp"
#include "modelspace/quadrature.hpp"
#include "modelspace/spectral.hpp"
#include "modelspace/summation.hpp"

namespace modelspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool on_circle(Complex z) { return std::abs(z) >= 1.0 - 1e-15; }

// Kernel k_z evaluated on the circle, with the removable singularity at tau = z
// filled in when z itself is a boundary point.
struct BoundaryKernel {
    const InnerFunction& theta;
    Complex z;
    Complex conj_theta_z;
    bool boundary = false;
    Complex diagonal;

    BoundaryKernel(const InnerFunction& t, Complex point) : theta(t), z(point) {
        if (on_circle(z)) {
            z /= std::abs(z);
            boundary = true;
            const auto vd = evaluate_with_derivative(theta, z);
            conj_theta_z = std::conj(vd.value);
            diagonal = conj_theta_z * vd.derivative * z;
        } else {
            conj_theta_z = std::conj(evaluate(theta, z));
        }
    }

    Complex operator()(Complex tau) const {
        if (boundary && std::abs(tau - z) < 1e-12) return diagonal;
        return (1.0 - conj_theta_z * evaluate(theta, tau)) / (1.0 - std::conj(z) * tau);
    }
};

// Breakpoints on [0, 2*pi] at the arguments of zeros, spectrum angles and extra points.
std::vector<double> circle_breaks(const InnerFunction& theta, std::initializer_list<Complex> extra) {
    std::vector<double> br{0.0, kTwoPi};
    for (int i = 1; i < 8; ++i) br.push_back(kTwoPi * i / 8.0);
    auto add = [&br](Complex p) {
        if (std::abs(p) > 0.0) br.push_back(canonical_angle(std::arg(p)));
    };
    for (const auto& z : theta.flat_zeros()) add(z);
    for (double t : theta.boundary_spectrum()) br.push_back(canonical_angle(t));
    for (const auto& p : extra) add(p);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

// Row vector of n-th derivatives of the basis, scaled by the weight.
Eigen::RowVectorXcd weighted_row(const TMBasis& basis, Complex z, int n, double weight) {
    return basis.derivatives(z, n).row(n) * weight;
}

}  // namespace

KernelPoint kernel_point(const InnerFunction& theta, Complex z) {
    KernelPoint kp;
    kp.z = z;
    kp.boundary = on_circle(z);
    if (!kp.boundary || boundary_spectrum_distance(theta, z / std::abs(z)) > kSpectrumRefusal) {
        kp.theta_value = evaluate(theta, kp.boundary ? z / std::abs(z) : z);
    }
    return kp;
}

Complex reproducing_kernel(const InnerFunction& theta, Complex z, Complex zeta) {
    if (std::abs(z) > 1.0 + 1e-12 || std::abs(zeta) > 1.0 + 1e-12) throw InvalidArgument("kernel points must lie in the closed disc");
    if (on_circle(z) && on_circle(zeta) && std::abs(z - zeta) < 1e-14) {
        const double s2 = ahern_clark_sum(theta, z / std::abs(z), 2.0);
        if (std::isinf(s2)) throw UndefinedDiagonal("boundary diagonal of the kernel is infinite (S_2 diverges)");
        return s2;
    }
    return (1.0 - std::conj(evaluate(theta, z)) * evaluate(theta, zeta)) / (1.0 - std::conj(z) * zeta);
}

double kernel_norm_squared_closed_form(const InnerFunction& theta, Complex z) {
    if (on_circle(z)) return derivative_modulus_boundary(theta, z / std::abs(z));
    return (1.0 - std::norm(evaluate(theta, z))) / (1.0 - std::norm(z));
}

double kernel_norm(const InnerFunction& theta, Complex z, double q, int power, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("kernel_norm: tol must be > 0");
    if (!(q >= 1.0)) throw InvalidArgument("kernel_norm: q must be >= 1");
    if (power < 1) throw InvalidArgument("kernel_norm: power must be >= 1");
    if (std::abs(z) > 1.0 + 1e-12) throw InvalidArgument("kernel_norm: z outside the closed disc");
    if (on_circle(z)) {
        const Complex zeta = z / std::abs(z);
        if (boundary_spectrum_distance(theta, zeta) <= kSpectrumRefusal) return kInf;
        if (std::isfinite(q) && std::isinf(ahern_clark_sum(theta, zeta, power * q))) return kInf;
    }
    const BoundaryKernel k(theta, z);
    if (std::isinf(q)) {
        // Dense sampling followed by local golden-section refinement.
        const int m = 8192;
        auto g = [&](double t) { return std::pow(std::abs(k(std::polar(1.0, t))), power); };
        double best = 0.0;
        double best_t = 0.0;
        for (int i = 0; i < m; ++i) {
            const double t = kTwoPi * (i + 0.5) / m;
            const double v = g(t);
            if (v > best) {
                best = v;
                best_t = t;
            }
        }
        double a = best_t - kTwoPi / m;
        double b = best_t + kTwoPi / m;
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60; ++it) {
            const double c = b - r * (b - a);
            const double d = a + r * (b - a);
            if (g(c) > g(d)) {
                b = d;
            } else {
                a = c;
            }
        }
        return std::max(best, g(0.5 * (a + b)));
    }
    const double s = power * q;
    auto f = [&](double t) { return std::pow(std::abs(k(std::polar(1.0, t))), s) / kTwoPi; };
    const auto br = circle_breaks(theta, {z});
    const double integral = integrate<double>(f, br, QuadratureOptions{tol, tol, 40000}).value;
    return std::pow(integral, 1.0 / q);
}

const char* to_string(WeightKind kind) {
    switch (kind) {
        case WeightKind::w_pn: return "w_pn";
        case WeightKind::d_eps_pow_n: return "d_eps_pow_n";
        case WeightKind::theta_prime_inv_n: return "theta_prime_inv_n";
    }
    return "w_pn";
}

double BernsteinWeightSpec::conjugate() const { return p == 1.0 ? kInf : p / (p - 1.0); }

double BernsteinWeightSpec::exponent() const { return -p * n / (p * n + 1.0); }

void BernsteinWeightSpec::validate() const {
    if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("Bernstein weight: p must be finite and >= 1");
    if (n < 1) throw InvalidArgument("Bernstein weight: derivative order n must be >= 1");
    if (kind == WeightKind::d_eps_pow_n && !(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("Bernstein weight: epsilon must lie in (0, 1)");
    }
}

WeightValue bernstein_weight(const InnerFunction& theta, Complex z, const BernsteinWeightSpec& spec, double tol) {
    spec.validate();
    switch (spec.kind) {
        case WeightKind::w_pn: {
            const double norm = kernel_norm(theta, z, spec.conjugate(), spec.n + 1, tol);
            if (std::isinf(norm)) return {0.0, 0.0};
            return {std::pow(norm, spec.exponent()), 0.0};
        }
        case WeightKind::d_eps_pow_n: {
            const auto br = level_distance(theta, spec.epsilon, z, tol);
            const double mid = br.mid();
            const double value = std::pow(mid, spec.n);
            const double unc = spec.n * std::pow(mid, spec.n - 1) * 0.5 * br.width();
            return {value, unc};
        }
        case WeightKind::theta_prime_inv_n: {
            const double sq = kernel_norm_squared_closed_form(theta, z);
            if (std::isinf(sq)) return {0.0, 0.0};
            return {std::pow(sq, -static_cast<double>(spec.n)), 0.0};
        }
    }
    return {};
}

double derivative_representation_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, int n,
                                       Complex z, double tol) {
    if (n < 0) throw InvalidArgument("derivative order must be >= 0");
    const TMBasis basis = TMBasis::from_inner(theta);
    if (on_circle(z) && std::isinf(ahern_clark_sum(theta, z / std::abs(z), 2.0 * (n + 1)))) {
        throw InvalidArgument("derivative representation needs S_{2(n+1)} finite at boundary points");
    }
    const BoundaryKernel k(theta, z);
    double factorial = 1.0;
    for (int i = 2; i <= n; ++i) factorial *= i;
    auto f = [&](double t) {
        const Complex tau = std::polar(1.0, t);
        return std::pow(std::conj(tau), n) * basis.evaluate(coeffs, tau) * std::pow(std::conj(k(tau)), n + 1) / kTwoPi;
    };
    const auto br = circle_breaks(theta, {z});
    const Complex quad = factorial * integrate<Complex>(f, br, QuadratureOptions{tol, tol, 40000}).value;
    const Complex exact = (basis.derivatives(on_circle(z) ? z / std::abs(z) : z, n).row(n) * coeffs).value();
    return std::abs(quad - exact);
}

double reproducing_property_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, Complex z,
                                  double tol) {
    return derivative_representation_check(theta, coeffs, 0, z, tol);
}

BernsteinRatio bernstein_ratio(const InnerFunction& theta, const DiscMeasure& mu, const BernsteinWeightSpec& spec,
                               int samples, std::uint64_t seed, double tol) {
    spec.validate();
    const TMBasis basis = TMBasis::from_inner(theta);
    const int dim = basis.size();
    BernsteinRatio out;
    out.seed = seed;
    out.extremal = Eigen::VectorXcd::Zero(dim);
    const int n = spec.n;
    auto weight_at = [&](Complex z) { return bernstein_weight(theta, z, spec, tol).value; };

    if (spec.p == 2.0) {
        out.exact = true;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& atom : mu.atoms()) {
            const Eigen::RowVectorXcd g = weighted_row(basis, atom.point, n, weight_at(atom.point));
            a += atom.mass * (g.adjoint() * g);
        }
        for (const auto& piece : mu.density()) {
            std::vector<double> br{piece.arc.start, piece.arc.end};
            for (int i = 1; i < 8; ++i) br.push_back(piece.arc.start + piece.arc.length() * i / 8.0);
            std::sort(br.begin(), br.end());
            const double scale = piece.density / kTwoPi;
            auto f = [&](double t) -> Eigen::MatrixXcd {
                const Complex tau = std::polar(1.0, t);
                const Eigen::RowVectorXcd g = weighted_row(basis, tau, n, weight_at(tau));
                return scale * (g.adjoint() * g);
            };
            a += integrate<Eigen::MatrixXcd>(f, br, QuadratureOptions{1e-14, std::max(tol * 100.0, 1e-10), 4000}).value;
        }
        a = 0.5 * (a + a.adjoint()).eval();
        if (a.cwiseAbs().maxCoeff() == 0.0) return out;
        const auto eig = hermitian_eigen(a);
        out.value = std::sqrt(std::max(eig.values[0], 0.0));
        out.extremal = eig.vectors.col(0);
        return out;
    }

    // Sampled lower bound for p != 2 on fixed quadrature grids.
    const double p = spec.p;
    std::vector<Complex> nodes;
    std::vector<double> node_mass;
    for (const auto& atom : mu.atoms()) {
        nodes.push_back(atom.point);
        node_mass.push_back(atom.mass);
    }
    for (const auto& piece : mu.density()) {
        const int panels = 64;
        const double h = piece.arc.length() / panels;
        for (int j = 0; j < panels; ++j) {
            const double c = piece.arc.start + (j + 0.5) * h;
            for (int i = 0; i < 15; ++i) {
                const int idx = i < 8 ? i : 14 - i;
                const double x = i < 8 ? -detail::kGkNodes[idx] : detail::kGkNodes[idx];
                nodes.push_back(std::polar(1.0, c + 0.5 * h * x));
                node_mass.push_back(piece.density / kTwoPi * 0.5 * h * detail::kKronrodWeights[idx]);
            }
        }
    }
    Eigen::MatrixXcd g(nodes.size(), dim);
    for (std::size_t i = 0; i < nodes.size(); ++i) g.row(i) = weighted_row(basis, nodes[i], n, weight_at(nodes[i]));
    const int m = 4096;
    Eigen::MatrixXcd e(m, dim);
    for (int i = 0; i < m; ++i) e.row(i) = basis.evaluate(std::polar(1.0, kTwoPi * i / m)).transpose();

    auto ratio = [&](const Eigen::VectorXcd& c) {
        const Eigen::VectorXcd num = g * c;
        const Eigen::VectorXcd den = e * c;
        CompensatedSum sn;
        CompensatedSum sd;
        for (Eigen::Index i = 0; i < num.size(); ++i) sn += node_mass[i] * std::pow(std::abs(num[i]), p);
        for (Eigen::Index i = 0; i < den.size(); ++i) sd += std::pow(std::abs(den[i]), p) / m;
        if (!(sd.value() > 0.0)) return 0.0;
        return std::pow(sn.value() / sd.value(), 1.0 / p);
    };
    auto consider = [&](const Eigen::VectorXcd& c) {
        const double r = ratio(c);
        if (r > out.value) {
            out.value = r;
            out.extremal = c / c.norm();
        }
    };
    for (int k = 0; k < dim; ++k) consider(Eigen::VectorXcd::Unit(dim, k));
    {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
        for (Eigen::Index i = 0; i < g.rows(); ++i) a += node_mass[i] * (g.row(i).adjoint() * g.row(i));
        if (a.cwiseAbs().maxCoeff() > 0.0) consider(hermitian_eigen(0.5 * (a + a.adjoint())).vectors.col(0));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXcd c(dim);
        for (int k = 0; k < dim; ++k) c[k] = Complex(gauss(rng), gauss(rng));
        consider(c / c.norm());
    }
    out.samples = samples;
    return out;
}

LevinCheck levin_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, Complex zeta, int samples,
                       double slack) {
    if (!on_circle(zeta)) throw InvalidArgument("levin_check: zeta must lie on the circle");
    zeta /= std::abs(zeta);
    const TMBasis basis = TMBasis::from_inner(theta);
    LevinCheck out;
    out.derivative = std::abs((basis.derivatives(zeta, 1).row(1) * coeffs).value());
    for (int i = 0; i < samples; ++i) {
        out.sup_norm = std::max(out.sup_norm, std::abs(basis.evaluate(coeffs, std::polar(1.0, kTwoPi * i / samples))));
    }
    out.theta_prime = derivative_modulus_boundary(theta, zeta);
    const double bound = out.sup_norm * out.theta_prime;
    out.ratio = bound > 0.0 ? out.derivative / bound : (out.derivative > 0.0 ? kInf : 0.0);
    out.holds = out.ratio <= 1.0 + slack;
    return out;
}

std::vector<WeightSandwichRow> weight_sandwich(const InnerFunction& theta, const BernsteinWeightSpec& spec,
                                               const std::vector<double>& angles, double tol) {
    BernsteinWeightSpec w = spec;
    w.kind = WeightKind::w_pn;
    std::vector<WeightSandwichRow> rows;
    for (double a : angles) {
        const Complex zeta = std::polar(1.0, a);
        WeightSandwichRow row;
        row.angle = a;
        row.d_eps = level_distance(theta, spec.epsilon, zeta, tol).mid();
        row.weight = bernstein_weight(theta, zeta, w, tol).value;
        const double tp = derivative_modulus_boundary(theta, zeta);
        row.inv_derivative = 1.0 / tp;
        row.lower_ratio = row.weight > 0.0 ? row.d_eps / row.weight : kInf;
        row.upper_ratio = row.weight * tp;
        rows.push_back(row);
    }
    return rows;
}

double radial_monotonicity(const InnerFunction& theta, double q, int pairs, std::uint64_t seed, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double phi = kTwoPi * u(rng);
        const double r = 0.95 * u(rng);
        const double r_inner = r * u(rng);
        const double outer = kernel_norm(theta, std::polar(r, phi), q, 1, tol);
        const double inner = kernel_norm(theta, std::polar(r_inner, phi), q, 1, tol);
        worst = std::max(worst, inner / outer);
    }
    return worst;
}

}  // namespace modelspace
