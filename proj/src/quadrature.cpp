#include "mafd/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mafd {

namespace {

double simpson(double fa, double fm, double fb, double width) {
    return width * (fa + 4.0 * fm + fb) / 6.0;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double abs_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * abs_tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_integrate: b < a");
    if (a == b) return 0.0;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_step(f, a, b, fa, fm, fb, whole, abs_tol, 48);
}

double adaptive_integrate_2d(const std::function<double(double, double)>& f, double x0, double x1,
                             double y0, double y1, double rel_tol) {
    if (!(x1 >= x0) || !(y1 >= y0)) throw std::invalid_argument("adaptive_integrate_2d: bad box");
    if (x0 == x1 || y0 == y1) return 0.0;
    // First pass at a coarse tolerance fixes the scale; the second pass runs
    // at the requested relative tolerance against that scale.
    const auto column = [&](double x, double tol) {
        return adaptive_integrate([&](double y) { return f(x, y); }, y0, y1, tol);
    };
    const double coarse =
        adaptive_integrate([&](double x) { return column(x, 1e-6); }, x0, x1, 1e-6);
    const double scale = std::max(std::abs(coarse), 1e-12);
    const double abs_tol = 0.25 * rel_tol * scale;
    const double inner_tol = abs_tol / (x1 - x0);
    return adaptive_integrate([&](double x) { return column(x, inner_tol); }, x0, x1, abs_tol);
}

}  // namespace mafd
