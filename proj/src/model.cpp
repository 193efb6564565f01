#include "slidecyc/model.hpp"

namespace slidecyc {

Vec2 eval_regularized(const PwsModel& model, const Regularization& reg,
                      const RegularizedContext& ctx, const Vec2& z) {
    if (!(ctx.eps > 0)) throw std::invalid_argument("eval_regularized requires eps > 0");
    const double lambda = ctx.lambda();
    const double s = z.y() / (ctx.eps * ctx.eps);
    if (s > ctx.s_max) return model.upper.eval(z.x(), z.y(), lambda).value();
    if (s < -ctx.s_max) return model.lower.eval(z.x(), z.y(), lambda).value();
    const double u = reg.phi(s);
    const FieldEval up = model.upper.eval(z.x(), z.y(), lambda);
    const FieldEval lo = model.lower.eval(z.x(), z.y(), lambda);
    return u * up.value() + (1.0 - u) * lo.value();
}

std::pair<Mat2, double> jacobian_regularized(const PwsModel& model, const Regularization& reg,
                                             const RegularizedContext& ctx, const Vec2& z) {
    if (!(ctx.eps > 0)) throw std::invalid_argument("jacobian_regularized requires eps > 0");
    const double lambda = ctx.lambda();
    const double e2 = ctx.eps * ctx.eps;
    const double s = z.y() / e2;
    if (s > ctx.s_max) {
        Mat2 J = model.upper.eval(z.x(), z.y(), lambda).jacobian();
        return {J, J.trace()};
    }
    if (s < -ctx.s_max) {
        Mat2 J = model.lower.eval(z.x(), z.y(), lambda).jacobian();
        return {J, J.trace()};
    }
    const double u = reg.phi(s);
    const double du = reg.dphi(s) / e2;  // d/dy phi(y/eps^2)
    const FieldEval up = model.upper.eval(z.x(), z.y(), lambda);
    const FieldEval lo = model.lower.eval(z.x(), z.y(), lambda);
    Mat2 J = u * up.jacobian() + (1.0 - u) * lo.jacobian();
    J.col(1) += du * (up.value() - lo.value());
    return {J, J.trace()};
}

}  // namespace slidecyc
