#include "slidecyc/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace slidecyc {

namespace {

// (G7, K15) nodes and weights on [-1, 1]; symmetric halves.
constexpr double kNodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
constexpr double kWeightK[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299785, 0.0229353220105292,
};
constexpr double kWeightG[8] = {
    0.4179591836734694, 0.0, 0.3818300505051189, 0.0,
    0.2797053914892767, 0.0, 0.1294849661688697, 0.0,
};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(c);
    double k15 = kWeightK[0] * f0;
    double g7 = kWeightG[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kNodes[i];
        const double s = f(c + dx) + f(c - dx);
        k15 += kWeightK[i] * s;
        g7 += kWeightG[i] * s;
    }
    k15 *= half;
    g7 *= half;
    return {a, b, k15, std::abs(k15 - g7)};
}

}  // namespace

QuadResult adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                               double rel_tol, double abs_tol, int max_subdiv) {
    QuadResult out;
    if (a == b) return out;
    std::priority_queue<Panel> queue;
    queue.push(evaluate(f, a, b));
    double total = queue.top().value, err = queue.top().error;
    int n = 0;
    while (err > abs_tol + rel_tol * std::abs(total) && n < max_subdiv) {
        Panel worst = queue.top();
        queue.pop();
        total -= worst.value;
        err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at rounding limit
            total += worst.value;
            err += worst.error;
            break;
        }
        Panel left = evaluate(f, worst.a, mid);
        Panel right = evaluate(f, mid, worst.b);
        queue.push(left);
        queue.push(right);
        total += left.value + right.value;
        err += left.error + right.error;
        ++n;
    }
    out.value = total;
    out.error = err;
    out.subdivisions = n;
    out.converged = err <= abs_tol + rel_tol * std::abs(total) || err <= 1e-12 * std::abs(total);
    return out;
}

}  // namespace slidecyc
