#pragma once

#include <functional>

namespace slidecyc {

struct QuadResult {
    double value = 0;
    double error = 0;
    bool converged = true;
    int subdivisions = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b] with bisection
/// of the worst interval until the global error estimate meets
/// abs_tol + rel_tol * |integral|.
QuadResult adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10, double abs_tol = 1e-14,
                               int max_subdiv = 2000);

}  // namespace slidecyc
