#include "glcoef/projective.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace glcoef {
namespace {

Vector canonical_unit(const Vector& v, const char* what) {
    if (v.size() < 1 || v.size() > kMaxDim) throw DomainError(std::string(what) + ": bad dimension");
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) throw DomainError(std::string(what) + ": representative must be nonzero");
    Vector u = v / nv;
    for (int i = 0; i < u.size(); ++i) {
        if (u(i) != 0.0) {
            if (u(i) < 0.0) u = -u;
            break;
        }
    }
    return u;
}

// Smallest ||g v|| we accept relative to ||g|| before calling g singular.
constexpr double kSingularRatio = 1e-300;

} // namespace

double line_angle(double v0, double v1) noexcept {
    double t = std::atan2(v1, v0);
    if (t < 0.0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t;
}

ProjectivePoint::ProjectivePoint(const Vector& v) : v_(canonical_unit(v, "ProjectivePoint")) {}

ProjectivePoint ProjectivePoint::from_angle(double theta) {
    Vector v(2);
    v << std::cos(theta), std::sin(theta);
    return ProjectivePoint(v);
}

double ProjectivePoint::angle() const {
    if (v_.size() != 2) throw DomainError("angle() is defined for d = 2 only");
    return line_angle(v_(0), v_(1));
}

DualPoint::DualPoint(const Vector& f) : f_(canonical_unit(f, "DualPoint")) {}

DualPoint DualPoint::from_angle(double theta) {
    Vector f(2);
    f << std::cos(theta), std::sin(theta);
    return DualPoint(f);
}

double DualPoint::angle() const {
    if (f_.size() != 2) throw DomainError("angle() is defined for d = 2 only");
    return line_angle(f_(0), f_(1));
}

ActResult act_with_cocycle(const Matrix& g, const ProjectivePoint& x) {
    if (g.cols() != x.dimension()) throw DomainError("act: matrix and point dimensions differ");
    const Vector w = g * x.vector();
    const double nw = w.norm();
    if (!(nw > kSingularRatio) || !std::isfinite(nw)) throw SingularMatrixError("matrix effectively singular");
    return {ProjectivePoint(w), std::log(nw)};
}

ProjectivePoint act(const Matrix& g, const ProjectivePoint& x) { return act_with_cocycle(g, x).x; }

double cocycle(const Matrix& g, const ProjectivePoint& x) { return act_with_cocycle(g, x).sigma; }

double delta(const ProjectivePoint& x, const DualPoint& y) {
    if (x.dimension() != y.dimension()) throw DomainError("delta: dimensions differ");
    return std::min(1.0, std::abs(x.vector().dot(y.vector())));
}

double log_delta(const ProjectivePoint& x, const DualPoint& y) {
    const double d = delta(x, y);
    return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

namespace {

double wedge_norm(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DomainError("angular_distance: dimensions differ");
    if (a.size() == 2) return std::abs(a(0) * b(1) - a(1) * b(0));
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j) {
            const double w = a(i) * b(j) - a(j) * b(i);
            s += w * w;
        }
    return std::min(1.0, std::sqrt(s));
}

} // namespace

double angular_distance(const ProjectivePoint& a, const ProjectivePoint& b) { return wedge_norm(a.vector(), b.vector()); }
double angular_distance(const DualPoint& a, const DualPoint& b) { return wedge_norm(a.vector(), b.vector()); }

bool WalkRecord::degenerate() const noexcept { return has_dual && !std::isfinite(log_delta); }

double WalkState::step(const Matrix& g) {
    Vector w = g * u_;
    const double nw = w.norm();
    if (!(nw > kSingularRatio) || !std::isfinite(nw)) throw SingularMatrixError("matrix effectively singular");
    u_ = w / nw;
    const double s = std::log(nw);
    // Neumaier compensation, kept inline because this is the hot loop.
    const double t = sum_ + s;
    if (std::abs(sum_) >= std::abs(s))
        comp_ += (sum_ - t) + s;
    else
        comp_ += (s - t) + sum_;
    sum_ = t;
    ++n_;
    return s;
}

WalkRecord walk(const MatrixModel& model, const ProjectivePoint& x0, const std::optional<DualPoint>& y,
                std::size_t n, RngStream& rng) {
    return walk_observed(model, x0, y, n, rng, [](std::size_t, const Matrix&, const WalkState&) {});
}

// Both oracles carry the running vector in long double. Paths that linger near
// contracting directions amplify rounding in the direction by several orders of
// magnitude, so a double-precision product is not an adequate reference there.
namespace {

using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

WideVector widen_unit(const Vector& v) {
    WideVector w = v.cast<long double>();
    return w / w.norm();
}

void multiply(const Matrix& g, WideVector& w) {
    WideVector out = WideVector::Zero(w.size());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) out(i) += static_cast<long double>(g(i, j)) * w(j);
    w = out;
}

double log_abs(long double c, long double log_scale) {
    if (!(c > 0.0L)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(std::log(c) + log_scale);
}

} // namespace

double coeff_log_direct(std::span<const Matrix> matrices, const Vector& v, const Vector& f) {
    WideVector w = widen_unit(v);
    const WideVector fu = widen_unit(f);
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        multiply(matrices[k], w);
        const long double a = w.cwiseAbs().maxCoeff();
        if (!std::isfinite(a) || a > 1e300L || (a < 1e-300L && a != 0.0L))
            throw OverflowError("explicit product leaves double range at step " + std::to_string(k + 1) +
                                "; use the stabilized walk");
    }
    return log_abs(std::abs(fu.dot(w)), 0.0L);
}

double coeff_log_rescaled(std::span<const Matrix> matrices, const Vector& v, const Vector& f) {
    WideVector w = widen_unit(v);
    const WideVector fu = widen_unit(f);
    long exponent = 0;
    for (const auto& g : matrices) {
        multiply(g, w);
        int e = 0;
        std::frexp(w.cwiseAbs().maxCoeff(), &e);
        if (e != 0) {
            for (int i = 0; i < w.size(); ++i) w(i) = std::ldexp(w(i), -e);
            exponent += e;
        }
    }
    return log_abs(std::abs(fu.dot(w)), static_cast<long double>(exponent) * std::log(2.0L));
}

} // namespace glcoef
