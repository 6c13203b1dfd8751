#include "modelspace/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modelspace/errors.hpp"
#include "modelspace/summation.hpp"

namespace modelspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Series = std::vector<Complex>;

Series series_mul(const Series& x, const Series& y) {
    Series out(x.size(), Complex(0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == Complex(0.0)) continue;
        for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] += x[i] * y[j];
    }
    return out;
}

// Taylor coefficients of 1/(1 - conj(a) z) about z0.
Series inverse_factor(Complex a, Complex z0, std::size_t len) {
    const Complex ca = std::conj(a);
    const Complex c = 1.0 - ca * z0;
    if (std::abs(c) < 1e-14) throw PoleOnEvaluation("basis pole at 1/conj(a)");
    Series out(len);
    Complex term = 1.0 / c;
    for (std::size_t m = 0; m < len; ++m) {
        out[m] = term;
        term *= ca / c;
    }
    return out;
}

// Sorted breakpoints in [lo, hi] at the arguments of the given points.
std::vector<double> angle_breaks(double lo, double hi, const std::vector<Complex>& points) {
    std::vector<double> br{lo, hi};
    const int pieces = 8;
    if (hi - lo > 1.0) {
        for (int i = 1; i < pieces; ++i) br.push_back(lo + (hi - lo) * i / pieces);
    }
    for (const auto& p : points) {
        if (std::abs(p) == 0.0) continue;
        double t = canonical_angle(std::arg(p));
        while (t < lo) t += kTwoPi;
        if (t < hi) br.push_back(t);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

Eigen::MatrixXcd outer(const Eigen::VectorXcd& v) { return v.conjugate() * v.transpose(); }

}  // namespace

// ---------------------------------------------------------------------------
// Basis

TMBasis::TMBasis(std::vector<Complex> zeros) : zeros_(std::move(zeros)) {
    if (zeros_.empty()) throw InvalidArgument("tm_basis: at least one zero required");
    if (zeros_.size() > static_cast<std::size_t>(kMaxBasisSize)) throw InvalidArgument("tm_basis: at most 64 zeros");
    for (const auto& a : zeros_) {
        if (!(std::abs(a) < 1.0)) throw InvalidArgument("tm_basis: zeros must lie in the open disc");
    }
}

TMBasis TMBasis::from_inner(const InnerFunction& theta) {
    if (!theta.is_finite_blaschke()) throw InvalidArgument("finite Blaschke product required");
    return TMBasis(theta.flat_zeros());
}

Eigen::VectorXcd TMBasis::evaluate(Complex z) const {
    const int n = size();
    Eigen::VectorXcd out(n);
    Complex prod = 1.0;
    for (int k = 0; k < n; ++k) {
        const Complex a = zeros_[k];
        const Complex den = 1.0 - std::conj(a) * z;
        if (std::abs(den) < 1e-14) throw PoleOnEvaluation("basis pole at 1/conj(a)");
        out[k] = prod * std::sqrt(1.0 - std::norm(a)) / den;
        prod *= (z - a) / den;
    }
    return out;
}

Complex TMBasis::evaluate(const Eigen::VectorXcd& coeffs, Complex z) const {
    if (coeffs.size() != size()) throw InvalidArgument("coefficient vector has wrong length");
    return evaluate(z).cwiseProduct(coeffs).sum();
}

Eigen::MatrixXcd TMBasis::derivatives(Complex z, int order) const {
    if (order < 0) throw InvalidArgument("derivative order must be >= 0");
    const std::size_t len = static_cast<std::size_t>(order) + 1;
    const int n = size();
    Eigen::MatrixXcd out(len, n);
    Series prod(len, Complex(0.0));
    prod[0] = 1.0;
    for (int k = 0; k < n; ++k) {
        const Complex a = zeros_[k];
        const Series inv = inverse_factor(a, z, len);
        Series ek = series_mul(prod, inv);
        double fact = 1.0;
        for (std::size_t j = 0; j < len; ++j) {
            if (j > 0) fact *= static_cast<double>(j);
            out(j, k) = ek[j] * std::sqrt(1.0 - std::norm(a)) * fact;
        }
        Series lin(len, Complex(0.0));
        lin[0] = z - a;
        if (len > 1) lin[1] = 1.0;
        prod = series_mul(prod, series_mul(lin, inv));
    }
    return out;
}

double TMBasis::orthonormality_defect(const QuadratureOptions& opts) const {
    const auto br = angle_breaks(0.0, kTwoPi, zeros_);
    auto f = [this](double t) -> Eigen::MatrixXcd { return outer(evaluate(std::polar(1.0, t))) / kTwoPi; };
    const auto res = integrate<Eigen::MatrixXcd>(f, br, opts);
    const int n = size();
    return (res.value - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double TMBasis::orthogonality_to_shifted_products(const QuadratureOptions& opts) const {
    const InnerFunction b = InnerFunction::blaschke(zeros_);
    const auto br = angle_breaks(0.0, kTwoPi, zeros_);
    const int n = size();
    auto f = [&](double t) -> Eigen::MatrixXcd {
        const Complex zeta = std::polar(1.0, t);
        const Eigen::VectorXcd e = evaluate(zeta);
        const Complex cb = std::conj(modelspace::evaluate(b, zeta));
        Eigen::MatrixXcd m(n, 4);
        Complex shift = 1.0;
        for (int j = 0; j < 4; ++j) {
            m.col(j) = e * std::conj(shift) * cb / kTwoPi;
            shift *= zeta;
        }
        return m;
    };
    return integrate<Eigen::MatrixXcd>(f, br, opts).value.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Gram

EmbeddingGram embedding_gram(const InnerFunction& theta, const DiscMeasure& mu, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("embedding_gram: tol must be > 0");
    const TMBasis basis = TMBasis::from_inner(theta);
    const int n = basis.size();
    EmbeddingGram g;
    g.matrix = Eigen::MatrixXcd::Zero(n, n);
    g.provenance = {theta.truncation(), n, mu.atoms().size(), mu.density().size(), tol};
    for (const auto& atom : mu.atoms()) g.matrix += atom.mass * outer(basis.evaluate(atom.point));
    const QuadratureOptions opts{tol, tol, 40000};
    for (const auto& piece : mu.density()) {
        const auto br = angle_breaks(piece.arc.start, piece.arc.end, basis.zeros());
        const double w = piece.density / kTwoPi;
        auto f = [&](double t) -> Eigen::MatrixXcd { return w * outer(basis.evaluate(std::polar(1.0, t))); };
        g.matrix += integrate<Eigen::MatrixXcd>(f, br, opts).value;
    }
    // Exact Hermitian symmetry.
    g.matrix = 0.5 * (g.matrix + g.matrix.adjoint()).eval();
    return g;
}

// ---------------------------------------------------------------------------
// Eigen decomposition

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& g) {
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n) throw InvalidArgument("hermitian_eigen: square matrix required");
    HermitianEigen out;
    if (n == 0) return out;
    const int m = 2 * n;
    Eigen::MatrixXd s(m, m);
    s << g.real(), -g.imag(), g.imag(), g.real();
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);

    const double scale = std::max(s.norm(), std::numeric_limits<double>::min());
    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < m; ++p) {
            for (int q = p + 1; q < m; ++q) off += s(p, q) * s(p, q);
        }
        if (std::sqrt(off) <= 1e-15 * scale) break;
        for (int p = 0; p < m - 1; ++p) {
            for (int q = p + 1; q < m; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < m; ++k) {
                    const double skp = s(k, p);
                    const double skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < m; ++k) {
                    const double spk = s(p, k);
                    const double sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < m; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps) throw EigenFailure("Jacobi iteration did not converge");
    out.sweeps = sweep;

    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&s](int x, int y) { return s(x, x) > s(y, y); });

    // Each complex eigenvector appears twice in the real embedding (v and i*v).
    out.values.resize(n);
    out.vectors.resize(n, n);
    int accepted = 0;
    for (int idx : order) {
        if (accepted == n) break;
        Eigen::VectorXcd w(n);
        for (int k = 0; k < n; ++k) w[k] = Complex(v(k, idx), v(k + n, idx));
        for (int j = 0; j < accepted; ++j) w -= out.vectors.col(j).dot(w) * out.vectors.col(j);
        const double nw = w.norm();
        if (nw < 0.5) continue;
        out.vectors.col(accepted) = w / nw;
        out.values[accepted] = s(idx, idx);
        ++accepted;
    }
    if (accepted != n) throw EigenFailure("could not extract a complex eigenbasis");

    const double gnorm = g.norm();
    double residual = 0.0;
    for (int j = 0; j < n; ++j) {
        // Rayleigh quotient sharpens the value attached to the extracted vector.
        const Eigen::VectorXcd x = out.vectors.col(j);
        out.values[j] = x.dot(g * x).real();
        residual = std::max(residual, (g * x - out.values[j] * x).norm());
    }
    out.residual = residual;
    if (residual > 1e-10 * std::max(gnorm, 1e-300) && residual > 1e-300) {
        throw EigenFailure("eigen residual " + std::to_string(residual) + " exceeds 1e-10 * ||G||");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

SpectralReport singular_values(const EmbeddingGram& gram, const std::vector<double>& r_list) {
    SpectralReport rep;
    rep.provenance = gram.provenance;
    const auto eig = hermitian_eigen(gram.matrix);
    rep.eigen_residual = eig.residual;
    for (int i = 0; i < eig.values.size(); ++i) rep.singular_values.push_back(std::sqrt(std::max(eig.values[i], 0.0)));
    std::sort(rep.singular_values.begin(), rep.singular_values.end(), std::greater<>());
    rep.operator_norm = rep.singular_values.empty() ? 0.0 : rep.singular_values.front();
    CompensatedSum hs;
    for (double s : rep.singular_values) hs += s * s;
    rep.hilbert_schmidt = hs.value();
    for (double r : r_list) rep.schatten[r] = schatten_norm(rep, r);
    return rep;
}

double schatten_norm(const SpectralReport& report, double r) {
    if (!(r > 0.0)) throw InvalidArgument("schatten_norm: r must be > 0");
    if (std::isinf(r)) return operator_norm(report);
    CompensatedSum sum;
    for (double s : report.singular_values) sum += std::pow(s, r);
    return std::pow(sum.value(), 1.0 / r);
}

double operator_norm(const SpectralReport& report) { return report.operator_norm; }

double hs_integral(const InnerFunction& theta, const DiscMeasure& mu, double tol) {
    CompensatedSum sum;
    for (const auto& atom : mu.atoms()) {
        const double r = std::abs(atom.point);
        double value;
        if (r >= 1.0 - 1e-15) {
            value = derivative_modulus_boundary(theta, atom.point / r);
        } else {
            value = (1.0 - std::norm(evaluate(theta, atom.point))) / (1.0 - r * r);
        }
        if (std::isinf(value)) return kInf;
        sum += atom.mass * value;
    }
    const QuadratureOptions opts{tol, tol, 40000};
    for (const auto& piece : mu.density()) {
        for (const auto& atom : theta.atoms()) {
            if (piece.arc.contains(atom.angle)) return kInf;
        }
        std::vector<Complex> marks = theta.flat_zeros();
        for (double t : theta.boundary_spectrum()) marks.push_back(std::polar(1.0, t));
        const auto br = angle_breaks(piece.arc.start, piece.arc.end, marks);
        auto f = [&](double t) { return derivative_modulus_boundary(theta, std::polar(1.0, t)); };
        sum += piece.density / kTwoPi * integrate<double>(f, br, opts).value;
    }
    return sum.value();
}

// ---------------------------------------------------------------------------
// Clark measures

double boundary_phase(const InnerFunction& b, double t) {
    const Complex zeta = std::polar(1.0, t);
    double phase = 0.0;
    for (const auto& a : b.flat_zeros()) {
        phase += t;
        if (a == Complex(0.0)) continue;
        phase += std::arg(-std::abs(a) / a) - 2.0 * std::arg(1.0 - std::conj(a) * zeta);
    }
    return phase;
}

DiscMeasure clark_measure(const InnerFunction& theta, Complex alpha) {
    if (!theta.is_finite_blaschke() || theta.zero_count() == 0) {
        throw InvalidArgument("clark_measure: nonconstant finite Blaschke product required");
    }
    // The finite product itself, without any declared accumulation angles.
    const InnerFunction b = InnerFunction::blaschke(theta.flat_zeros());
    if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw InvalidArgument("clark_measure: |alpha| must be 1");
    const int n = b.zero_count();
    const double phi0 = boundary_phase(b, 0.0);
    const double target0 = std::arg(alpha);
    const double m_start = std::ceil((phi0 - target0) / kTwoPi - 1e-15);
    std::vector<MeasureAtom> atoms;
    for (int j = 0; j < n; ++j) {
        const double target = target0 + kTwoPi * (m_start + j);
        double lo = 0.0;
        double hi = kTwoPi;
        for (int it = 0; it < 200 && hi - lo > 4e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (boundary_phase(b, mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 2; ++it) {
            const double d = derivative_modulus_boundary(b, std::polar(1.0, t));
            const double step = (boundary_phase(b, t) - target) / d;
            if (std::abs(step) < 1e-9) t -= step;
        }
        const Complex zeta = std::polar(1.0, canonical_angle(t));
        if (std::abs(evaluate(b, zeta) - alpha) > 1e-10) {
            throw RootRefinementFailure("clark_measure: root refinement did not reach B(zeta) = alpha");
        }
        atoms.push_back({zeta, 1.0 / derivative_modulus_boundary(b, zeta)});
    }
    return DiscMeasure(std::move(atoms));
}

// ---------------------------------------------------------------------------

std::vector<CompactnessRow> compactness_profile(
    const InnerFunction& family, const std::vector<int>& truncations,
    const std::function<DiscMeasure(const InnerFunction&)>& measure_for, int k, double tol) {
    if (k < 1) throw InvalidArgument("compactness_profile: k is 1-based");
    std::vector<CompactnessRow> rows;
    for (int n : truncations) {
        const InnerFunction theta = family.with_truncation(n);
        const auto rep = singular_values(embedding_gram(theta, measure_for(theta), tol));
        CompactnessRow row;
        row.truncation = n;
        row.singular_values = rep.singular_values;
        const auto& s = rep.singular_values;
        row.kth = static_cast<std::size_t>(k) <= s.size() ? s[k - 1] : 0.0;
        row.tail = static_cast<std::size_t>(k) < s.size() ? s[k] : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace modelspace
