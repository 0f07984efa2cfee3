#pragma once

#include <cmath>
#include <complex>
#include <span>

#include "owl/errors.hpp"
#include "owl/sym_eig.hpp"

namespace owl {

// Algebraic fit of a circle constrained through the origin,
// a (x^2 + y^2) + b x + c y = 0 with (a,b,c) unit. The coefficients come
// from the smallest eigenvector of the moment matrix; the returned value is
// the RMS of the algebraic form evaluated directly over the points, which
// stays at rounding level (~1e-13) for exactly consistent data.
inline double circle_through_origin_residual(std::span<const std::complex<double>> points) {
    if (points.size() < 3)
        throw InsufficientPoints("circle_through_origin_residual: need at least 3 points");
    detail::SymMat<3> m{};
    for (const auto& p : points) {
        const double x = p.real(), y = p.imag();
        const double u[3] = {x * x + y * y, x, y};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] += u[i] * u[j];
    }
    const auto eig = detail::jacobi_eigen<3>(m);
    const auto& coeff = eig.vectors[2];
    double sq_sum = 0.0;
    for (const auto& p : points) {
        const double x = p.real(), y = p.imag();
        const double value = coeff[0] * (x * x + y * y) + coeff[1] * x + coeff[2] * y;
        sq_sum += value * value;
    }
    return std::sqrt(sq_sum / static_cast<double>(points.size()));
}

// RMS distance of the points from the best line through the origin. Used to
// verify that origin lines stay lines under inversion.
inline double line_through_origin_residual(std::span<const std::complex<double>> points) {
    if (points.size() < 2)
        throw InsufficientPoints("line_through_origin_residual: need at least 2 points");
    detail::SymMat<2> m{};
    for (const auto& p : points) {
        const double u[2] = {p.real(), p.imag()};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[i][j] += u[i] * u[j];
    }
    const auto eig = detail::jacobi_eigen<2>(m);
    const auto& normal = eig.vectors[1];
    double sq_sum = 0.0;
    for (const auto& p : points) {
        const double value = normal[0] * p.real() + normal[1] * p.imag();
        sq_sum += value * value;
    }
    return std::sqrt(sq_sum / static_cast<double>(points.size()));
}

} // namespace owl
