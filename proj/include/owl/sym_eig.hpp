#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace owl::detail {

template <std::size_t N>
using SymMat = std::array<std::array<double, N>, N>;

template <std::size_t N>
struct SymEigResult {
    std::array<double, N> values;                  // descending
    std::array<std::array<double, N>, N> vectors;  // vectors[k] pairs with values[k]
};

// Cyclic Jacobi iteration for small symmetric matrices. Deterministic and
// accurate to machine precision for the 3x3 / 4x4 problems used here.
template <std::size_t N>
SymEigResult<N> jacobi_eigen(SymMat<N> a) {
    SymMat<N> v{};
    for (std::size_t i = 0; i < N; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off == 0.0) break;

        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double g = 100.0 * std::abs(apq);
                const double h = a[q][q] - a[p][p];
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    if (i != p && i != q) {
                        const double aip = a[i][p];
                        const double aiq = a[i][q];
                        a[i][p] = aip - s * (aiq + tau * aip);
                        a[i][q] = aiq + s * (aip - tau * aiq);
                        a[p][i] = a[i][p];
                        a[q][i] = a[i][q];
                    }
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = vip - s * (viq + tau * vip);
                    v[i][q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    SymEigResult<N> result{};
    std::array<std::size_t, N> order{};
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (a[order[j]][order[j]] > a[order[i]][order[i]]) std::swap(order[i], order[j]);
    for (std::size_t k = 0; k < N; ++k) {
        result.values[k] = a[order[k]][order[k]];
        for (std::size_t i = 0; i < N; ++i) result.vectors[k][i] = v[i][order[k]];
    }
    return result;
}

} // namespace owl::detail
