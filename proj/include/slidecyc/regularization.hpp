#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace slidecyc {

/// Monotone transition function phi : R -> (0,1) together with its derivative
/// and inverse. Built-in families are smooth at +-infinity in the sense that
/// s -> phi(+-1/s) extends smoothly through s = 0.
class Regularization {
public:
    enum class Family { Arctan, Algebraic, Custom };

    static Regularization arctan() { return Regularization(Family::Arctan, "arctan"); }
    static Regularization algebraic() { return Regularization(Family::Algebraic, "algebraic"); }
    static Regularization by_name(const std::string& name) {
        if (name == "arctan") return arctan();
        if (name == "algebraic") return algebraic();
        throw std::invalid_argument("unknown regularization family: " + name);
    }
    static Regularization custom(std::function<double(double)> phi,
                                 std::function<double(double)> dphi,
                                 std::function<double(double)> inv,
                                 std::string name = "custom") {
        Regularization r(Family::Custom, std::move(name));
        r.phi_ = std::move(phi);
        r.dphi_ = std::move(dphi);
        r.inv_ = std::move(inv);
        return r;
    }

    Family family() const { return family_; }
    const std::string& name() const { return name_; }

    double phi(double s) const {
        switch (family_) {
            case Family::Arctan: return 0.5 + std::atan(s) / M_PI;
            case Family::Algebraic: return 0.5 + 0.5 * s / std::sqrt(1.0 + s * s);
            case Family::Custom: return phi_(s);
        }
        return 0;
    }
    double dphi(double s) const {
        switch (family_) {
            case Family::Arctan: return 1.0 / (M_PI * (1.0 + s * s));
            case Family::Algebraic: {
                const double t = 1.0 + s * s;
                return 0.5 / (t * std::sqrt(t));
            }
            case Family::Custom: return dphi_(s);
        }
        return 0;
    }
    /// Inverse map (0,1) -> R.
    double inv(double u) const {
        switch (family_) {
            case Family::Arctan: return std::tan(M_PI * (u - 0.5));
            case Family::Algebraic: {
                const double v = 2.0 * u - 1.0;
                return v / std::sqrt(1.0 - v * v);
            }
            case Family::Custom: return inv_(u);
        }
        return 0;
    }

    /// phi(-1/s) for s > 0, limit 0 at s = 0; the "smooth at -infinity" chart.
    double phi_minus(double s) const {
        if (s == 0.0) return 0.0;
        return phi(-1.0 / s);
    }
    double phi_plus(double s) const {
        if (s == 0.0) return 1.0;
        return phi(1.0 / s);
    }
    /// d/ds phi(-1/s) = phi'(-1/s)/s^2, continuously extended to s = 0.
    double dphi_minus(double s) const {
        switch (family_) {
            case Family::Arctan:
                // 1/(pi (1 + 1/s^2)) / s^2 = 1/(pi (s^2 + 1))
                return 1.0 / (M_PI * (s * s + 1.0));
            case Family::Algebraic: {
                // 0.5 (1+1/s^2)^{-3/2} / s^2 = 0.5 |s| / (1+s^2)^{3/2}, one-sided s >= 0
                const double t = 1.0 + s * s;
                return 0.5 * s / (t * std::sqrt(t));
            }
            case Family::Custom:
                if (s == 0.0) return 0.0;
                return dphi_(-1.0 / s) / (s * s);
        }
        return 0;
    }

private:
    Regularization(Family f, std::string name) : family_(f), name_(std::move(name)) {}
    Family family_;
    std::string name_;
    std::function<double(double)> phi_, dphi_, inv_;
};

}  // namespace slidecyc
