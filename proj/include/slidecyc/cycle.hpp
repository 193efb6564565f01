#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slidecyc/filippov.hpp"
#include "slidecyc/model.hpp"

namespace slidecyc {

struct OrbitPoint {
    double t, x, y;
};

/// Poincare half-map of the lower field from {x>0} to {x<0} along {y=0}.
struct HalfMapResult {
    double x_out = 0;              // Pi(x)
    double derivative = 0;         // Pi'(x), variational route
    double derivative_lemma3 = 0;  // (Y-(x,0)/Y-(Pi(x),0)) exp(int div Z- dt)
    bool derivative_agreement = false;
    double transit_time = 0;
    double s0_candidate = 0;       // y at the orbit's crossing of {x=0}
    double div_integral = 0;       // int div Z- dt along the orbit
    std::vector<OrbitPoint> orbit;
};

enum class CaseTag {
    I, II, III, IV, V, V_Mirror, VI, VII, VIII,
    Excluded,   // odd interior zero: no limit cycles possible
    Uncovered,  // m- = m+ > 1 (or rho- = rho+, decided downstream)
};

std::string to_string(CaseTag tag);

struct CaseLabel {
    CaseTag tag;
    std::string detail;
};

struct SlidingCycle {
    double eta_plus = 0;
    double eta_minus = 0;
    std::vector<SlidingZero> zeros;  // all zeros in [eta-, eta+], corners tagged
    HalfMapResult half_map;
    double s0 = 0;

    std::optional<SlidingZero> corner_minus() const;
    std::optional<SlidingZero> corner_plus() const;
    std::vector<SlidingZero> interior_zeros() const;
    bool has_interior_zero_in(double a, double b) const;
};

struct HalfMapOptions {
    Tolerances tol;
    bool record_orbit = true;
};

/// Integrate the Z- orbit from (x, 0), x > 0, until it returns to {y=0, x<0}.
/// Pi' is computed both by variational equations and by the divergence-integral
/// transition identity; the result records their agreement at 1e-6 relative.
HalfMapResult half_map(const PwsModel& model, double x, const HalfMapOptions& opts = {});

SlidingCycle build_cycle(const PwsModel& model, double eta_plus, const HalfMapOptions& opts = {});

CaseLabel classify_case(const PwsModel& model, const SlidingCycle& cycle,
                        const Tolerances& tol = {});

}  // namespace slidecyc
