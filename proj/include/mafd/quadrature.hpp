#pragma once

#include <functional>

namespace mafd {

/// Adaptive Simpson integration of f over [a,b] to the given absolute
/// tolerance.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol);

/// Iterated adaptive Simpson integration over an axis-aligned box to a
/// relative tolerance (with an absolute floor for near-zero integrals).
double adaptive_integrate_2d(const std::function<double(double, double)>& f, double x0, double x1,
                             double y0, double y1, double rel_tol);

}  // namespace mafd
