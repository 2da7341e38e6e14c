#pragma once

// Projective points, the norm cocycle and stabilized walks on P(V).

#include "glcoef/models.hpp"
#include "glcoef/rng.hpp"
#include "glcoef/types.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace glcoef {

/// A line Rv in P(V), stored as a unit vector whose first nonzero
/// coordinate is positive. Non-unit inputs are normalized on entry.
class ProjectivePoint {
public:
    explicit ProjectivePoint(const Vector& v);
    /// d = 2: the line through (cos theta, sin theta).
    static ProjectivePoint from_angle(double theta);

    const Vector& vector() const noexcept { return v_; }
    int dimension() const noexcept { return static_cast<int>(v_.size()); }
    /// d = 2: the line's angle in [0, pi).
    double angle() const;

    bool operator==(const ProjectivePoint& o) const noexcept { return v_ == o.v_; }

private:
    Vector v_;
};

/// A line Rf in P(V*), same conventions as ProjectivePoint.
class DualPoint {
public:
    explicit DualPoint(const Vector& f);
    static DualPoint from_angle(double theta);

    const Vector& vector() const noexcept { return f_; }
    int dimension() const noexcept { return static_cast<int>(f_.size()); }
    double angle() const;

    bool operator==(const DualPoint& o) const noexcept { return f_ == o.f_; }

private:
    Vector f_;
};

struct ActResult {
    ProjectivePoint x;
    double sigma;
};

/// g . x. Throws SingularMatrixError when g v vanishes numerically.
ProjectivePoint act(const Matrix& g, const ProjectivePoint& x);
/// sigma(g, x) = log ||g v|| for unit v.
double cocycle(const Matrix& g, const ProjectivePoint& x);
/// Both at once (one product).
ActResult act_with_cocycle(const Matrix& g, const ProjectivePoint& x);

/// |f(v)| for unit representatives, in [0, 1].
double delta(const ProjectivePoint& x, const DualPoint& y);
/// log delta; -infinity when delta is exactly 0.
double log_delta(const ProjectivePoint& x, const DualPoint& y);

/// ||v ^ v'|| for unit representatives.
double angular_distance(const ProjectivePoint& a, const ProjectivePoint& b);
double angular_distance(const DualPoint& a, const DualPoint& b);

/// Angle in [0, pi) of the line through a 2-vector.
double line_angle(double v0, double v1) noexcept;

struct WalkRecord {
    ProjectivePoint x;      // x_n
    double S = 0.0;         // sigma(G_n, x_0)
    std::size_t n = 0;
    bool has_dual = false;
    double log_delta = 0.0; // log delta(x_n, y) when has_dual
    std::uint64_t stream_key = 0;

    /// log |<f, G_n v_0>| = S_n + log delta(x_n, y); -inf when degenerate.
    double log_coeff() const noexcept { return S + log_delta; }
    bool degenerate() const noexcept;
};

/// Unit-direction state advanced in place; the inner loop of every walk.
/// Each step renormalizes and Kahan-sums log ||g u||.
class WalkState {
public:
    explicit WalkState(const ProjectivePoint& x0) : u_(x0.vector()) {}

    /// Applies g and returns sigma(g, current direction).
    double step(const Matrix& g);

    const Vector& direction() const noexcept { return u_; }
    double cocycle_sum() const noexcept { return sum_ + comp_; }
    std::size_t steps() const noexcept { return n_; }
    ProjectivePoint point() const { return ProjectivePoint(u_); }

private:
    Vector u_;
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::size_t n_ = 0;
};

/// n steps of the stabilized walk under `model`. Requires n >= 1.
WalkRecord walk(const MatrixModel& model, const ProjectivePoint& x0, const std::optional<DualPoint>& y,
                std::size_t n, RngStream& rng);

/// Same walk, calling on_step(k, g_k, state) after step k (1-based).
template <class OnStep>
WalkRecord walk_observed(const MatrixModel& model, const ProjectivePoint& x0, const std::optional<DualPoint>& y,
                         std::size_t n, RngStream& rng, OnStep&& on_step) {
    if (n == 0) throw DomainError("walk needs n >= 1");
    if (x0.dimension() != model.dimension()) throw DomainError("walk: x0 dimension does not match the model");
    WalkState st(x0);
    for (std::size_t k = 1; k <= n; ++k) {
        const Matrix g = model.sample(rng);
        st.step(g);
        on_step(k, g, st);
    }
    WalkRecord rec{st.point(), st.cocycle_sum(), n, false, 0.0, rng.key()};
    if (y) {
        rec.has_dual = true;
        rec.log_delta = log_delta(rec.x, *y);
    }
    return rec;
}

/// log |f(g_n ... g_1 v)| for unit v and f (inputs are normalized), by explicit products. Throws OverflowError when an
/// intermediate leaves double range; use the stabilized walk instead.
double coeff_log_direct(std::span<const Matrix> matrices, const Vector& v, const Vector& f);

/// Same quantity with exact power-of-two rescaling of the running vector, so
/// it never overflows. Independent of the walk's renormalization.
double coeff_log_rescaled(std::span<const Matrix> matrices, const Vector& v, const Vector& f);

} // namespace glcoef
