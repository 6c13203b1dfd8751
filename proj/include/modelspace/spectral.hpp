#pragma once

// Finite-dimensional oracle for finite Blaschke products: the
// Takenaka-Malmquist orthonormal basis of K^2_B, embedding Gram matrices
// against a measure, their spectra, and Clark measures.

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "modelspace/inner.hpp"
#include "modelspace/measure.hpp"
#include "modelspace/quadrature.hpp"

namespace modelspace {

inline constexpr int kMaxBasisSize = 64;

// e_k(z) = sqrt(1-|a_k|^2)/(1-conj(a_k) z) * prod_{j<k} (z-a_j)/(1-conj(a_j) z).
class TMBasis {
public:
    explicit TMBasis(std::vector<Complex> zeros);
    // Basis of K^2_Theta for a finite Blaschke product.
    static TMBasis from_inner(const InnerFunction& theta);

    int size() const { return static_cast<int>(zeros_.size()); }
    const std::vector<Complex>& zeros() const { return zeros_; }

    Eigen::VectorXcd evaluate(Complex z) const;
    // Row j holds the j-th derivatives of all basis functions at z, j = 0..order.
    Eigen::MatrixXcd derivatives(Complex z, int order) const;
    Complex evaluate(const Eigen::VectorXcd& coeffs, Complex z) const;

    // max |<e_j, e_k> - delta_jk| over the circle, by quadrature.
    double orthonormality_defect(const QuadratureOptions& opts = {}) const;
    // max |<e_k, zeta^j B>| for j = 0..3.
    double orthogonality_to_shifted_products(const QuadratureOptions& opts = {}) const;

private:
    std::vector<Complex> zeros_;
};

struct GramProvenance {
    int truncation = 0;
    int dimension = 0;
    std::size_t atoms = 0;
    std::size_t density_pieces = 0;
    double tol = 0.0;
};

struct EmbeddingGram {
    Eigen::MatrixXcd matrix;  // M(j,k) = integral e_k conj(e_j) dmu
    GramProvenance provenance;
};

EmbeddingGram embedding_gram(const InnerFunction& theta, const DiscMeasure& mu, double tol = 1e-12);

struct HermitianEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXcd vectors; // columns
    double residual = 0.0;    // max ||G v - lambda v||
    int sweeps = 0;
};

// Cyclic Jacobi on the real symmetric embedding of a Hermitian matrix.
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& g);

struct SpectralReport {
    std::vector<double> singular_values;  // descending
    double operator_norm = 0.0;
    double hilbert_schmidt = 0.0;         // sum s_i^2
    std::map<double, double> schatten;    // r -> (sum s_i^r)^(1/r)
    double eigen_residual = 0.0;
    GramProvenance provenance;
};

SpectralReport singular_values(const EmbeddingGram& gram, const std::vector<double>& r_list = {1.0, 2.0});
double schatten_norm(const SpectralReport& report, double r);
double operator_norm(const SpectralReport& report);

// integral ||k_z||_2^2 dmu(z); +inf when a boundary atom sits where |Theta'| is infinite.
double hs_integral(const InnerFunction& theta, const DiscMeasure& mu, double tol = 1e-12);

// Atoms at the solutions of B(zeta) = alpha with weights 1/|B'(zeta)|.
DiscMeasure clark_measure(const InnerFunction& b, Complex alpha);

// Continuous increasing branch of arg B(e^{i t}) on [0, 2*pi].
double boundary_phase(const InnerFunction& b, double t);

struct CompactnessRow {
    int truncation = 0;
    double kth = 0.0;   // s_k
    double tail = 0.0;  // max_{i > k} s_i
    std::vector<double> singular_values;
};

// s_k and the tail beyond k along a truncation sequence; k is 1-based.
std::vector<CompactnessRow> compactness_profile(
    const InnerFunction& family, const std::vector<int>& truncations,
    const std::function<DiscMeasure(const InnerFunction&)>& measure_for, int k, double tol = 1e-12);

}  // namespace modelspace
