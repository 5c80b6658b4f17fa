#include "chisq.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace catinfo {

namespace {

// Lower regularized incomplete gamma P(a,x) by power series, x < a+1.
double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by continued fraction (modified
// Lentz), x >= a+1.
double gamma_q_cf(double a, double x)
{
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double chi_square_sf(double x, long df)
{
    if (df <= 0)
        throw DomainError("chi-square tail requires df >= 1");
    if (!(x >= 0.0))
        throw DomainError("chi-square tail requires x >= 0");
    if (x == 0.0)
        return 1.0;
    const double a = 0.5 * static_cast<double>(df);
    const double xx = 0.5 * x;
    double q = (xx < a + 1.0) ? 1.0 - gamma_p_series(a, xx) : gamma_q_cf(a, xx);
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return q;
}

} // namespace catinfo
