#include "glcoef/models.hpp"

#include "glcoef/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace glcoef {
namespace {

constexpr double kDetTol = 1e-12;
constexpr double kProbTol = 1e-15;

void check_dimension(int d) {
    if (d < 2 || d > kMaxDim)
        throw DomainError("dimension must be in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(d));
}

std::vector<double> validated_probabilities(std::vector<double> probs, std::size_t expected) {
    if (probs.size() != expected)
        throw DomainError("expected " + std::to_string(expected) + " probabilities, got " +
                          std::to_string(probs.size()));
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be finite and nonnegative");
    }
    CompensatedSum total;
    for (double p : probs) total.add(p);
    if (std::abs(total.value() - 1.0) > kProbTol)
        throw DomainError("probabilities must sum to 1 (got " + std::to_string(total.value()) + ")");
    return probs;
}

void check_invertible(const Matrix& g, const std::string& what) {
    const double det = g.determinant();
    if (!(std::abs(det) > kDetTol) || !std::isfinite(det))
        throw DomainError(what + " is not invertible (|det| <= 1e-12)");
    Eigen::JacobiSVD<Matrix> svd(g);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    if (!std::isfinite(cond)) throw DomainError(what + " has infinite condition number");
}

Matrix random_orthogonal(int d, RngStream& rng) {
    Matrix z(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) z(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::finite_support: return "finite-support";
    case ModelKind::scalar_rotation: return "scalar-rotation";
    case ModelKind::rotation_diag_rotation: return "rotation-diag-rotation";
    }
    return "unknown";
}

MatrixModel MatrixModel::finite_support(std::string id, std::vector<Matrix> matrices,
                                        std::vector<double> probabilities) {
    if (matrices.empty()) throw DomainError("finite-support model needs at least one matrix");
    const int d = static_cast<int>(matrices.front().rows());
    check_dimension(d);
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (matrices[i].rows() != d || matrices[i].cols() != d)
            throw DomainError("support matrix " + std::to_string(i) + " is not " + std::to_string(d) + "x" +
                              std::to_string(d));
        check_invertible(matrices[i], "support matrix " + std::to_string(i));
    }
    MatrixModel m;
    m.kind_ = ModelKind::finite_support;
    m.dim_ = d;
    m.id_ = std::move(id);
    m.probs_ = validated_probabilities(std::move(probabilities), matrices.size());
    m.matrices_ = std::move(matrices);
    m.build_cumulative();
    return m;
}

MatrixModel MatrixModel::scalar_rotation(std::string id, int dimension, std::vector<double> scales,
                                         std::vector<double> probabilities) {
    check_dimension(dimension);
    if (scales.empty()) throw DomainError("scalar-rotation model needs at least one scale");
    for (double c : scales) {
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scalar-rotation scales must be positive");
        if (std::pow(c, dimension) <= kDetTol) throw DomainError("scalar-rotation scale makes c*O singular");
    }
    MatrixModel m;
    m.kind_ = ModelKind::scalar_rotation;
    m.dim_ = dimension;
    m.id_ = std::move(id);
    m.probs_ = validated_probabilities(std::move(probabilities), scales.size());
    m.scales_ = std::move(scales);
    m.build_cumulative();
    return m;
}

MatrixModel MatrixModel::rotation_diag_rotation(std::string id, std::vector<double> log_scales) {
    const int d = static_cast<int>(log_scales.size());
    check_dimension(d);
    double trace = 0.0;
    for (double a : log_scales) {
        if (!std::isfinite(a) || std::abs(a) > 700.0) throw DomainError("log-scales must be finite and |a| <= 700");
        trace += a;
    }
    if (trace < std::log(kDetTol)) throw DomainError("rotation-diag-rotation diagonal is singular");
    MatrixModel m;
    m.kind_ = ModelKind::rotation_diag_rotation;
    m.dim_ = d;
    m.id_ = std::move(id);
    m.log_scales_ = std::move(log_scales);
    return m;
}

MatrixModel MatrixModel::rotation_diag_rotation(std::string id, double log_scale) {
    return rotation_diag_rotation(std::move(id), std::vector<double>{log_scale, -log_scale});
}

void MatrixModel::build_cumulative() {
    cumulative_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
}

std::size_t MatrixModel::draw_index(RngStream& rng) const {
    if (cumulative_.size() == 1) return 0;
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

Matrix MatrixModel::diagonal() const {
    Matrix dg = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < static_cast<int>(log_scales_.size()); ++i) dg(i, i) = std::exp(log_scales_[i]);
    return dg;
}

Matrix MatrixModel::sample(RngStream& rng) const {
    switch (kind_) {
    case ModelKind::finite_support: return matrices_[draw_index(rng)];
    case ModelKind::scalar_rotation: {
        const double c = scales_[draw_index(rng)];
        return c * haar_rotation(dim_, rng);
    }
    case ModelKind::rotation_diag_rotation: {
        if (dim_ == 2) {
            const double t1 = kPi * rng.uniform();
            const double t2 = kPi * rng.uniform();
            const double e1 = std::exp(log_scales_[0]);
            const double e2 = std::exp(log_scales_[1]);
            const double c1 = std::cos(t1), s1 = std::sin(t1);
            const double c2 = std::cos(t2), s2 = std::sin(t2);
            // R(t1) * diag(e1, e2) * R(t2)
            Matrix g(2, 2);
            g(0, 0) = c1 * e1 * c2 - s1 * e2 * s2;
            g(0, 1) = -c1 * e1 * s2 - s1 * e2 * c2;
            g(1, 0) = s1 * e1 * c2 + c1 * e2 * s2;
            g(1, 1) = -s1 * e1 * s2 + c1 * e2 * c2;
            return g;
        }
        const Matrix left = haar_rotation(dim_, rng);
        const Matrix right = haar_rotation(dim_, rng);
        return left * diagonal() * right;
    }
    }
    return identity_matrix(dim_);
}

Matrix rotation2(double theta) {
    Matrix r(2, 2);
    const double c = std::cos(theta), s = std::sin(theta);
    r << c, -s, s, c;
    return r;
}

Matrix identity_matrix(int d) { return Matrix::Identity(d, d); }

Matrix haar_rotation(int d, RngStream& rng) {
    if (d == 2) return rotation2(2.0 * kPi * rng.uniform());
    Matrix q = random_orthogonal(d, rng);
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return q;
}

double operator_norm(const Matrix& g) {
    Eigen::JacobiSVD<Matrix> svd(g);
    return svd.singularValues()(0);
}

double conorm(const Matrix& g) {
    Eigen::JacobiSVD<Matrix> svd(g);
    const auto& sv = svd.singularValues();
    return std::max(sv(0), 1.0 / sv(sv.size() - 1));
}

MomentEstimate estimate_moment(const MatrixModel& model, double epsilon, std::size_t n_samples, RngStream& rng) {
    if (!(epsilon > 0.0)) throw DomainError("moment exponent epsilon must be positive");
    if (n_samples == 0) throw DomainError("estimate_moment needs n_samples >= 1");
    MomentEstimate est;
    est.epsilon = epsilon;
    std::vector<double> values;
    values.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double v = std::pow(conorm(model.sample(rng)), epsilon);
        if (std::isfinite(v))
            values.push_back(v);
        else
            ++est.n_overflow;
    }
    est.n_samples = values.size();
    const auto me = mean_and_error(values);
    est.mean = me.mean;
    est.std_error = me.std_error;
    return est;
}

namespace {

// Log singular-value gap series of G_n from a two-vector frame with
// Gram-Schmidt re-orthonormalization (done twice for stability).
std::vector<double> gap_series(const MatrixModel& model, std::size_t n_steps, RngStream& rng) {
    const int d = model.dimension();
    Vector q1 = Vector::Zero(d), q2 = Vector::Zero(d);
    q1(0) = 1.0;
    q2(1) = 1.0;
    CompensatedSum l1, l2;
    std::vector<double> gaps(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Matrix g = model.sample(rng);
        Vector w1 = g * q1;
        Vector w2 = g * q2;
        const double r11 = w1.norm();
        w1 /= r11;
        for (int pass = 0; pass < 2; ++pass) w2 -= w1.dot(w2) * w1;
        const double r22 = w2.norm();
        w2 /= r22;
        l1.add(std::log(r11));
        l2.add(std::log(r22));
        q1 = w1;
        q2 = w2;
        gaps[n] = l1.value() - l2.value();
    }
    return gaps;
}

} // namespace

ConditionReport proximality_check(const MatrixModel& model, std::size_t n_steps, std::size_t n_reps,
                                  RngStream& rng, double slope_tol) {
    if (n_steps < 100) throw DomainError("proximality_check needs n_steps >= 100");
    if (n_reps == 0) throw DomainError("proximality_check needs n_reps >= 1");
    ConditionReport rep;
    rep.n_steps = n_steps;
    rep.n_reps = n_reps;
    rep.seed = rng.seed();
    std::vector<double> xs(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) xs[n] = static_cast<double>(n + 1);
    std::vector<double> slopes(n_reps);
    for (std::size_t r = 0; r < n_reps; ++r) {
        RngStream sub = rng.split(r);
        const auto ys = gap_series(model, n_steps, sub);
        slopes[r] = fit_line(xs, ys).slope;
    }
    const auto me = mean_and_error(slopes);
    rep.proximality_slope = me.mean;
    rep.proximality_slope_error = me.std_error;
    rep.proximality_detected = std::isfinite(me.mean) && me.mean > slope_tol;
    return rep;
}

namespace {

struct Line {
    Vector v; // unit representative
};

double line_distance(const Vector& a, const Vector& b) {
    // ||a ^ b|| for unit vectors
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j) {
            const double w = a(i) * b(j) - a(j) * b(i);
            s += w * w;
        }
    return std::sqrt(s);
}

std::vector<Vector> real_eigenlines(const Matrix& g) {
    std::vector<Vector> lines;
    Eigen::EigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success) return lines;
    const auto vals = es.eigenvalues();
    const auto vecs = es.eigenvectors();
    for (int k = 0; k < vals.size(); ++k) {
        if (std::abs(vals(k).imag()) > 1e-9 * std::max(1.0, std::abs(vals(k)))) continue;
        Vector v = vecs.col(k).real();
        const double nv = v.norm();
        if (nv > 0.0) lines.push_back(v / nv);
    }
    return lines;
}

bool contains_line(const std::vector<Vector>& set, const Vector& v, double tol) {
    return std::any_of(set.begin(), set.end(), [&](const Vector& w) { return line_distance(v, w) <= tol; });
}

// Prunes `lines` to its largest subset mapped into itself by every sample.
std::vector<Vector> invariant_subset(std::vector<Vector> lines, const std::vector<Matrix>& samples, double tol) {
    bool changed = true;
    while (changed && !lines.empty()) {
        changed = false;
        std::vector<Vector> kept;
        for (const auto& v : lines) {
            bool ok = true;
            for (const auto& g : samples) {
                Vector w = g * v;
                w /= w.norm();
                if (!contains_line(lines, w, tol)) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                kept.push_back(v);
            else
                changed = true;
        }
        lines = std::move(kept);
    }
    return lines;
}

} // namespace

bool irreducibility_heuristic(const MatrixModel& model, std::size_t n_products, RngStream& rng) {
    const int d = model.dimension();
    constexpr double kTol = 1e-6;
    constexpr std::size_t kMaxClusters = 32;
    constexpr std::size_t kStarts = 8;
    constexpr std::size_t kBurn = 50;
    constexpr std::size_t kInvarianceSamples = 256;

    std::vector<Matrix> samples;
    samples.reserve(kInvarianceSamples);
    for (std::size_t i = 0; i < kInvarianceSamples; ++i) samples.push_back(model.sample(rng));

    // Candidate lines: real eigenlines of a few sampled factors.
    std::vector<Vector> candidates;
    for (std::size_t i = 0; i < std::min<std::size_t>(4, samples.size()); ++i) {
        for (auto& v : real_eigenlines(samples[i]))
            if (!contains_line(candidates, v, kTol)) candidates.push_back(v);
    }

    // Orbit directions of random starting lines under the products G_n.
    std::vector<Vector> clusters;
    bool spread = false;
    const std::size_t per_start = std::max<std::size_t>(n_products / kStarts, kBurn + 1);
    for (std::size_t s = 0; s < kStarts && !spread; ++s) {
        Vector u(d);
        for (int i = 0; i < d; ++i) u(i) = rng.normal();
        u /= u.norm();
        for (std::size_t n = 0; n < per_start; ++n) {
            u = model.sample(rng) * u;
            u /= u.norm();
            if (n < kBurn) continue;
            if (!contains_line(clusters, u, kTol)) {
                clusters.push_back(u);
                if (clusters.size() > kMaxClusters) {
                    spread = true;
                    break;
                }
            }
        }
    }
    if (!spread) {
        for (auto& v : clusters)
            if (!contains_line(candidates, v, kTol)) candidates.push_back(v);
    }
    return invariant_subset(std::move(candidates), samples, 1e-8).empty();
}

ConditionReport check_conditions(const MatrixModel& model, double epsilon, std::size_t n_moment_samples,
                                 std::size_t n_steps, std::size_t n_reps, RngStream& rng, double slope_tol) {
    RngStream moment_rng = rng.split(tag_of("moment"));
    RngStream prox_rng = rng.split(tag_of("proximality"));
    RngStream irr_rng = rng.split(tag_of("irreducibility"));
    ConditionReport rep = proximality_check(model, n_steps, n_reps, prox_rng, slope_tol);
    const auto m = estimate_moment(model, epsilon, n_moment_samples, moment_rng);
    rep.moment_estimate = m.mean;
    rep.moment_std_error = m.std_error;
    rep.moment_epsilon = epsilon;
    rep.moment_samples = m.n_samples;
    rep.moment_overflows = m.n_overflow;
    rep.irreducibility_flag = irreducibility_heuristic(model, 10000, irr_rng);
    rep.seed = rng.seed();
    return rep;
}

} // namespace glcoef
