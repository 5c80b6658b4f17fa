#include "linalg.hpp"

#include <cmath>

namespace catinfo {

Cholesky Cholesky::decompose(std::span<const double> a, std::size_t n, double rel_tol)
{
    Cholesky c;
    c.n_ = n;
    c.l_.assign(n * n, 0.0);

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_diag = std::max(max_diag, std::fabs(a[i * n + i]));
    const double floor = std::max(rel_tol * max_diag, 1e-300);

    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k)
            d -= c.l_[j * n + k] * c.l_[j * n + k];
        if (!(d > floor)) {
            c.bad_column_ = static_cast<int>(j);
            return c;
        }
        const double lj = std::sqrt(d);
        c.l_[j * n + j] = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= c.l_[i * n + k] * c.l_[j * n + k];
            c.l_[i * n + j] = s / lj;
        }
    }
    c.ok_ = true;
    return c;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const
{
    std::vector<double> x(b.begin(), b.end());
    // forward substitution L y = b
    for (std::size_t i = 0; i < n_; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= l_[i * n_ + k] * x[k];
        x[i] = s / l_[i * n_ + i];
    }
    // back substitution L^T x = y
    for (std::size_t i = n_; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n_; ++k)
            s -= l_[k * n_ + i] * x[k];
        x[i] = s / l_[i * n_ + i];
    }
    return x;
}

std::vector<double> Cholesky::inverse_diagonal() const
{
    std::vector<double> diag(n_, 0.0);
    std::vector<double> e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const auto col = solve(e);
        diag[j] = col[j];
    }
    return diag;
}

} // namespace catinfo
