#pragma once

// Reproducing kernels of K^2_Theta, their boundary L^q norms, Bernstein-type
// weights, and measured weighted-derivative ratios on finite-dimensional
// model spaces.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "modelspace/inner.hpp"
#include "modelspace/measure.hpp"

namespace modelspace {

struct KernelPoint {
    Complex z;
    Complex theta_value;  // Theta(z); unused on the boundary diagonal
    bool boundary = false;
};

KernelPoint kernel_point(const InnerFunction& theta, Complex z);

// k_z(zeta) = (1 - conj(Theta(z)) Theta(zeta)) / (1 - conj(z) zeta); on the
// boundary diagonal the value is |Theta'(zeta)|.
Complex reproducing_kernel(const InnerFunction& theta, Complex z, Complex zeta);

// Closed form ||k_z||_2^2 = (1-|Theta(z)|^2)/(1-|z|^2), or |Theta'(z)| on the circle.
double kernel_norm_squared_closed_form(const InnerFunction& theta, Complex z);

// ||k_z^power||_{L^q(m)} by adaptive quadrature (q may be +inf).
// On the circle the result is +inf when S_{power*q}(zeta) diverges.
double kernel_norm(const InnerFunction& theta, Complex z, double q, int power, double tol);

enum class WeightKind { w_pn, d_eps_pow_n, theta_prime_inv_n };

const char* to_string(WeightKind kind);

struct BernsteinWeightSpec {
    double p = 2.0;
    int n = 1;
    WeightKind kind = WeightKind::w_pn;
    double epsilon = 0.5;  // level for d_eps_pow_n

    // q = p/(p-1); +inf for p = 1.
    double conjugate() const;
    // -pn/(pn+1).
    double exponent() const;
    void validate() const;
};

struct WeightValue {
    double value = 0.0;
    double uncertainty = 0.0;
};

// w_pn: ||k_z^{n+1}||_q^{-pn/(pn+1)}, 0 where the kernel power leaves L^q.
// d_eps_pow_n: dist(z, Omega)^n from the bracket midpoint.
// theta_prime_inv_n: |Theta'(zeta)|^{-n} on the circle, ||k_z||_2^{-2n} inside.
WeightValue bernstein_weight(const InnerFunction& theta, Complex z, const BernsteinWeightSpec& spec, double tol);

// |n! * integral conj(tau)^n f(tau) conj(k_z(tau))^{n+1} dm - f^{(n)}(z)| for
// f = sum coeffs_k e_k in the Takenaka-Malmquist basis.
double derivative_representation_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, int n,
                                       Complex z, double tol);

// |integral f conj(k_z) dm - f(z)|.
double reproducing_property_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, Complex z,
                                  double tol);

struct BernsteinRatio {
    double value = 0.0;
    // true for p = 2 (generalized eigenvalue); false for sampled lower bounds.
    bool exact = false;
    int samples = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXcd extremal;  // maximizing coefficient vector found
};

// sup ||f^{(n)} w||_{L^p(mu)} / ||f||_p over f in K_Theta (finite Blaschke).
BernsteinRatio bernstein_ratio(const InnerFunction& theta, const DiscMeasure& mu, const BernsteinWeightSpec& spec,
                               int samples = 256, std::uint64_t seed = 0, double tol = 1e-9);

struct LevinCheck {
    double derivative = 0.0;   // |f'(zeta)|
    double sup_norm = 0.0;     // sampled ||f||_inf
    double theta_prime = 0.0;  // |Theta'(zeta)|
    double ratio = 0.0;        // derivative / (sup_norm * theta_prime)
    bool holds = false;        // ratio <= 1 + slack
};

LevinCheck levin_check(const InnerFunction& theta, const Eigen::VectorXcd& coeffs, Complex zeta,
                       int samples = 1 << 14, double slack = 1e-3);

struct WeightSandwichRow {
    double angle = 0.0;
    double d_eps = 0.0;
    double weight = 0.0;       // w_pn
    double inv_derivative = 0.0;
    double lower_ratio = 0.0;  // d_eps / w_pn
    double upper_ratio = 0.0;  // w_pn * |Theta'|
};

// Comparability d_eps <~ w_pn <~ |Theta'|^{-1} measured at the given angles.
std::vector<WeightSandwichRow> weight_sandwich(const InnerFunction& theta, const BernsteinWeightSpec& spec,
                                               const std::vector<double>& angles, double tol);

// max ||k_{z'}||_q / ||k_z||_q over random pairs z' = r' e^{i phi}, z = r e^{i phi}, r' <= r.
double radial_monotonicity(const InnerFunction& theta, double q, int pairs, std::uint64_t seed, double tol);

}  // namespace modelspace
