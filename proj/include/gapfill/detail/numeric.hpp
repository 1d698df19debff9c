#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gapfill/error.hpp"

namespace gapfill::detail {

/// Ordinary least squares on the normal equations with drop-tolerance pivoting:
/// columns that are (near-)linear combinations of earlier columns get zero
/// coefficients instead of poisoning the solve. Column order is meaningful.
struct OlsFit {
    std::vector<double> coef;
    std::vector<char> retained;
    double rss = 0.0;
    std::size_t n = 0;
    std::size_t rank = 0;

    double sigma2() const {
        return n > rank ? rss / static_cast<double>(n - rank) : 0.0;
    }
};

inline OlsFit ols_fit(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
    const std::size_t m = columns.size();
    const std::size_t n = y.size();
    for (const auto& c : columns)
        if (c.size() != n) throw ConfigError("regression columns must match the response length");

    std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += columns[a][t] * columns[b][t];
            xtx[a * m + b] = xtx[b * m + a] = s;
        }
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += columns[a][t] * y[t];
        xty[a] = s;
    }

    // in-order Gaussian elimination; a vanishing pivot marks a dropped column
    std::vector<double> a = xtx, b = xty;
    std::vector<char> retained(m, 1);
    std::vector<double> diag0(m);
    for (std::size_t i = 0; i < m; ++i) diag0[i] = xtx[i * m + i];

    for (std::size_t i = 0; i < m; ++i) {
        const double tol = 1e-12 * (diag0[i] > 0.0 ? diag0[i] : 1.0);
        if (std::abs(a[i * m + i]) <= tol) {
            retained[i] = 0;
            for (std::size_t j = 0; j < m; ++j) {
                a[i * m + j] = 0.0;
                a[j * m + i] = 0.0;
            }
            a[i * m + i] = 1.0;
            b[i] = 0.0;
            continue;
        }
        for (std::size_t r = i + 1; r < m; ++r) {
            const double f = a[r * m + i] / a[i * m + i];
            if (f == 0.0) continue;
            for (std::size_t j = i; j < m; ++j) a[r * m + j] -= f * a[i * m + j];
            b[r] -= f * b[i];
        }
    }

    OlsFit fit;
    fit.coef.assign(m, 0.0);
    fit.retained = retained;
    fit.n = n;
    for (std::size_t ii = m; ii-- > 0;) {
        if (!retained[ii]) continue;
        double s = b[ii];
        for (std::size_t j = ii + 1; j < m; ++j) s -= a[ii * m + j] * fit.coef[j];
        fit.coef[ii] = s / a[ii * m + ii];
        ++fit.rank;
    }

    fit.rss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t j = 0; j < m; ++j) pred += fit.coef[j] * columns[j][t];
        const double e = y[t] - pred;
        fit.rss += e * e;
    }
    return fit;
}

/// (X'X)^-1 diagonal entry for one retained column, over the retained submatrix.
inline double ols_inverse_diagonal(const std::vector<std::vector<double>>& columns,
                                   const std::vector<char>& retained, std::size_t target) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < retained.size(); ++i)
        if (retained[i]) keep.push_back(i);
    const std::size_t m = keep.size();
    std::size_t ti = m;
    for (std::size_t i = 0; i < m; ++i)
        if (keep[i] == target) ti = i;
    if (ti == m) throw ConfigError("target column was dropped from the regression");

    const std::size_t n = columns.empty() ? 0 : columns[0].size();
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += columns[keep[i]][t] * columns[keep[j]][t];
            a[i * m + j] = s;
        }

    // solve A u = e_ti by Gauss-Jordan with partial pivoting
    std::vector<double> u(m, 0.0);
    u[ti] = 1.0;
    std::vector<double> mat = a;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(mat[r * m + col]) > std::abs(mat[piv * m + col])) piv = r;
        if (mat[piv * m + col] == 0.0) throw ConfigError("singular regression matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(mat[col * m + j], mat[piv * m + j]);
            std::swap(u[col], u[piv]);
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = mat[r * m + col] / mat[col * m + col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) mat[r * m + j] -= f * mat[col * m + j];
            u[r] -= f * u[col];
        }
    }
    return u[ti] / mat[ti * m + ti];
}

/// Thomas algorithm for a tridiagonal system; diagonals (lower, main, upper).
inline std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> main,
                                             std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = main.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / main[i - 1];
        main[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / main[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / main[i];
    return x;
}

/// Levinson-Durbin recursion on autocovariances r[0..p]; returns AR coefficients
/// phi[1..p] (index 0 unused) and the innovation variance.
struct ArSolution {
    std::vector<double> phi;
    double variance = 0.0;
};

inline ArSolution levinson_durbin(const std::vector<double>& r, std::size_t order) {
    ArSolution sol;
    sol.phi.assign(order + 1, 0.0);
    sol.variance = r[0];
    if (order == 0) return sol;

    std::vector<double> prev(order + 1, 0.0);
    for (std::size_t k = 1; k <= order; ++k) {
        double acc = r[k];
        for (std::size_t j = 1; j < k; ++j) acc -= sol.phi[j] * r[k - j];
        const double reflect = sol.variance > 0.0 ? acc / sol.variance : 0.0;
        prev = sol.phi;
        sol.phi[k] = reflect;
        for (std::size_t j = 1; j < k; ++j) sol.phi[j] = prev[j] - reflect * prev[k - j];
        sol.variance *= (1.0 - reflect * reflect);
        if (sol.variance < 0.0) sol.variance = 0.0;
    }
    return sol;
}

} // namespace gapfill::detail
