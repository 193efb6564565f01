#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <utility>

namespace slidecyc {

/// Dense univariate polynomial, coefficients in ascending degree.
class Poly1 {
public:
    Poly1() : coef_(Eigen::VectorXd::Zero(1)) {}
    explicit Poly1(Eigen::VectorXd coef) : coef_(std::move(coef)) {
        if (coef_.size() == 0) coef_ = Eigen::VectorXd::Zero(1);
    }
    Poly1(std::initializer_list<double> c)
        : coef_(Eigen::Map<const Eigen::VectorXd>(c.begin(),
                                                  static_cast<Eigen::Index>(c.size()))) {
        if (coef_.size() == 0) coef_ = Eigen::VectorXd::Zero(1);
    }

    const Eigen::VectorXd& coef() const { return coef_; }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }

    template <class Scalar>
    Scalar operator()(Scalar x) const {
        Scalar acc = Scalar(0);
        for (Eigen::Index i = coef_.size() - 1; i >= 0; --i) acc = acc * x + Scalar(coef_[i]);
        return acc;
    }

    Poly1 derivative() const {
        if (coef_.size() <= 1) return Poly1();
        Eigen::VectorXd d(coef_.size() - 1);
        for (Eigen::Index i = 1; i < coef_.size(); ++i) d[i - 1] = coef_[i] * double(i);
        return Poly1(d);
    }

    Poly1 operator*(const Poly1& o) const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(coef_.size() + o.coef_.size() - 1);
        for (Eigen::Index i = 0; i < coef_.size(); ++i)
            for (Eigen::Index j = 0; j < o.coef_.size(); ++j) p[i + j] += coef_[i] * o.coef_[j];
        return Poly1(p);
    }
    Poly1 operator+(const Poly1& o) const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(std::max(coef_.size(), o.coef_.size()));
        p.head(coef_.size()) = coef_;
        p.head(o.coef_.size()) += o.coef_;
        return Poly1(p);
    }
    Poly1 operator-(const Poly1& o) const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(std::max(coef_.size(), o.coef_.size()));
        p.head(coef_.size()) = coef_;
        p.head(o.coef_.size()) -= o.coef_;
        return Poly1(p);
    }

    double coeff_scale() const { return coef_.cwiseAbs().maxCoeff(); }

private:
    Eigen::VectorXd coef_;
};

/// Dense bivariate polynomial: sum c(i,j) x^i y^j.
class Poly2 {
public:
    Poly2() : coef_(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit Poly2(Eigen::MatrixXd coef) : coef_(std::move(coef)) {
        if (coef_.size() == 0) coef_ = Eigen::MatrixXd::Zero(1, 1);
    }
    static Poly2 constant(double v) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = v;
        return Poly2(m);
    }
    static Poly2 monomial(int i, int j, double v) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(i + 1, j + 1);
        m(i, j) = v;
        return Poly2(m);
    }

    const Eigen::MatrixXd& coef() const { return coef_; }
    Eigen::MatrixXd& coef() { return coef_; }

    template <class Scalar>
    Scalar operator()(Scalar x, Scalar y) const {
        // Horner in x of Horner-in-y row evaluations.
        Scalar acc = Scalar(0);
        for (Eigen::Index i = coef_.rows() - 1; i >= 0; --i) {
            Scalar row = Scalar(0);
            for (Eigen::Index j = coef_.cols() - 1; j >= 0; --j)
                row = row * y + Scalar(coef_(i, j));
            acc = acc * x + row;
        }
        return acc;
    }

    Poly2 dx() const {
        if (coef_.rows() <= 1) return Poly2();
        Eigen::MatrixXd d(coef_.rows() - 1, coef_.cols());
        for (Eigen::Index i = 1; i < coef_.rows(); ++i) d.row(i - 1) = coef_.row(i) * double(i);
        return Poly2(d);
    }
    Poly2 dy() const {
        if (coef_.cols() <= 1) return Poly2();
        Eigen::MatrixXd d(coef_.rows(), coef_.cols() - 1);
        for (Eigen::Index j = 1; j < coef_.cols(); ++j) d.col(j - 1) = coef_.col(j) * double(j);
        return Poly2(d);
    }

    /// Restriction to the switching line {y = 0} as a univariate polynomial in x.
    Poly1 at_y0() const { return Poly1(coef_.col(0)); }

    Poly2 operator+(const Poly2& o) const {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(std::max(coef_.rows(), o.coef_.rows()),
                                                  std::max(coef_.cols(), o.coef_.cols()));
        p.topLeftCorner(coef_.rows(), coef_.cols()) = coef_;
        p.topLeftCorner(o.coef_.rows(), o.coef_.cols()) += o.coef_;
        return Poly2(p);
    }
    Poly2 operator*(double s) const { return Poly2(coef_ * s); }

private:
    Eigen::MatrixXd coef_;
};

}  // namespace slidecyc
