#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace catinfo {

// Cholesky factorization of a small symmetric positive-definite matrix
// (row-major). A pivot below rel_tol times the largest diagonal marks the
// matrix rank deficient; the offending column is reported instead of
// throwing so callers can name the collinear model term.
class Cholesky {
public:
    static Cholesky decompose(std::span<const double> a, std::size_t n,
                              double rel_tol = 1e-10);

    bool ok() const { return ok_; }
    int bad_column() const { return bad_column_; }

    std::vector<double> solve(std::span<const double> b) const;
    std::vector<double> inverse_diagonal() const;

private:
    std::size_t n_ = 0;
    std::vector<double> l_;
    bool ok_ = false;
    int bad_column_ = -1;
};

} // namespace catinfo
