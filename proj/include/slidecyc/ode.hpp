#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace slidecyc {

using StateVec = Eigen::VectorXd;

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double event_tol = 1e-12;
    double h_init = 1e-4;
    double h_max = 1.0;
    double h_min = 1e-14;
    double t_max = 100.0;
    long max_steps = 50'000'000;
    // Spectral-radius threshold above which the A-stable Rosenbrock stepper is
    // used for the step; <= 0 disables switching (explicit only).
    double stiff_threshold = 0.0;
    bool record_orbit = false;
    double record_dt = 0.0;  // 0: record every accepted step
};

struct EventSpec {
    std::function<double(double t, const StateVec&)> g;
    int direction = 0;   // +1: - to +, -1: + to -, 0: any crossing
    bool terminal = true;
    // Optional filter; a located crossing failing this is ignored.
    std::function<bool(double t, const StateVec&)> accept;
};

enum class OdeStatus { ReachedTEnd, EventHit, Aborted, StepUnderflow, MaxSteps };

struct OdeResult {
    OdeStatus status = OdeStatus::ReachedTEnd;
    double t = 0;
    StateVec y;
    int event_index = -1;
    std::vector<double> times;                // recorded orbit
    std::vector<StateVec> states;
    long steps_accepted = 0, steps_rejected = 0, stiff_steps = 0;
    std::string message;
};

/// Adaptive one-step integration with event location. Explicit Dormand-Prince
/// 5(4) by default; when `jacobian` is supplied and the local spectral-radius
/// estimate exceeds options.stiff_threshold, steps switch to a linearly
/// implicit L-stable Rosenbrock 2(3) scheme.
class OdeIntegrator {
public:
    using Rhs = std::function<void(double t, const StateVec& y, StateVec& dydt)>;
    using Jac = std::function<void(double t, const StateVec& y, Eigen::MatrixXd& J)>;
    using Monitor = std::function<bool(double t, const StateVec& y)>;

    OdeIntegrator(Rhs rhs, OdeOptions opt) : rhs_(std::move(rhs)), opt_(opt) {}
    void set_jacobian(Jac jac) { jac_ = std::move(jac); }
    void set_monitor(Monitor m) { monitor_ = std::move(m); }

    OdeResult integrate(double t0, const StateVec& y0, double t_end,
                        const std::vector<EventSpec>& events = {});

private:
    Rhs rhs_;
    Jac jac_;
    Monitor monitor_;
    OdeOptions opt_;
};

}  // namespace slidecyc
