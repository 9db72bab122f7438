#pragma once

// Univariate real-coefficient root finding via companion-matrix
// eigenvalues, and the first-real-root rule used by the data generators:
// the real candidate of largest magnitude, ties broken toward the positive
// root.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace syntheory {

struct DegenerateLeadingCoefficient : std::runtime_error {
    DegenerateLeadingCoefficient()
        : std::runtime_error("leading coefficient vanishes relative to the coefficient scale") {}
};

/// All complex roots of c[0] + c[1] x + ... + c[n] x^n.
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    if (coeffs.size() < 2) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::fabs(c));
    if (scale == 0.0 || std::fabs(coeffs.back()) <= 1e-12 * scale) throw DegenerateLeadingCoefficient();

    const std::size_t n = coeffs.size() - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) =
            -coeffs[i] / coeffs.back();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots;
    roots.reserve(n);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

/// First real root per the data-generation convention; nullopt when no
/// root is real.
inline std::optional<double> solve_last_variable(std::span<const double> coeffs) {
    auto roots = polynomial_roots(coeffs);
    std::optional<double> best;
    for (const auto& r : roots) {
        if (std::fabs(r.imag()) > 1e-8 * (1.0 + std::fabs(r.real()))) continue;
        double x = r.real();
        if (!best) {
            best = x;
            continue;
        }
        double bx = *best;
        bool tie = std::fabs(std::fabs(x) - std::fabs(bx)) <= 1e-12 * (1.0 + std::fabs(x));
        if (tie ? (x > bx) : (std::fabs(x) > std::fabs(bx))) best = x;
    }
    return best;
}

}  // namespace syntheory
