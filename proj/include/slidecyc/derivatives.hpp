#pragma once

#include <cmath>
#include <functional>
#include <optional>

namespace slidecyc {

/// Richardson-extrapolated central difference of order k (k = 1..4) at x0.
/// Returns the estimate together with a crude error indicator from the last
/// extrapolation increment.
struct DiffEstimate {
    double value = 0;
    double error = 0;
    bool reliable = true;
};

DiffEstimate richardson_derivative(const std::function<double(double)>& f, double x0, int order,
                                   double h0 = 1e-2);

struct MultiplicityResult {
    int multiplicity = 0;       // smallest k with |f^(k)(x0)| above threshold
    bool at_least_m_max = false;
    bool reliable = true;
    double leading_derivative = 0;
};

/// Smallest k <= m_max with |f^(k)(x0)| > tau * scale, derivatives by
/// Richardson extrapolation; k = 0 means f(x0) itself is nonzero.
MultiplicityResult zero_multiplicity(const std::function<double(double)>& f, double x0,
                                     int m_max = 4, double tau = 1e-8, double h0 = 1e-2);

}  // namespace slidecyc
