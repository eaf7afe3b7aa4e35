// linalg.hpp - small dense solves shared by dynamics and experiments (internal)
#pragma once

#include <cmath>
#include <cstring>
#include <utility>

namespace nanolase::detail {

// NxN Gaussian elimination with partial pivoting; false when singular.
template <int N>
bool solve_dense(const double A_in[N][N], const double b_in[N], double x[N]) {
    double A[N][N];
    double b[N];
    std::memcpy(A, A_in, sizeof A);
    std::memcpy(b, b_in, sizeof b);
    int idx[N];
    for (int i = 0; i < N; ++i) idx[i] = i;
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::fabs(A[idx[r]][col]) > std::fabs(A[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        const double d = A[idx[col]][col];
        if (d == 0.0 || !std::isfinite(d)) return false;
        for (int r = col + 1; r < N; ++r) {
            const double m = A[idx[r]][col] / d;
            if (m == 0.0) continue;
            for (int c = col; c < N; ++c) A[idx[r]][c] -= m * A[idx[col]][c];
            b[idx[r]] -= m * b[idx[col]];
        }
    }
    for (int row = N - 1; row >= 0; --row) {
        double acc = b[idx[row]];
        for (int c = row + 1; c < N; ++c) acc -= A[idx[row]][c] * x[c];
        const double d = A[idx[row]][row];
        if (d == 0.0 || !std::isfinite(d)) return false;
        x[row] = acc / d;
    }
    return true;
}

}  // namespace nanolase::detail
