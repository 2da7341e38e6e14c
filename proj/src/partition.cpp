#include "glcoef/partition.hpp"

#include <algorithm>
#include <cmath>

namespace glcoef {

PartitionScheme::PartitionScheme(std::size_t n, double A) : n_(n), A_(A) {
    if (n < 18) throw DomainError("partition needs n >= 18, got " + std::to_string(n));
    if (!(A > 0.0) || !std::isfinite(A)) throw DomainError("partition constant A must be positive");
    const double ln = std::log(static_cast<double>(n));
    a_ = 1.0 / ln;
    if (a_ * std::exp(a_) > 0.5) throw DomainError("a_n e^{a_n} exceeds 1/2");
    M_ = static_cast<int>(std::floor(A * ln * ln));
    if (M_ < 1) throw DomainError("M_n = floor(A log^2 n) must be >= 1");
}

double PartitionScheme::U(int k, double t) const noexcept {
    if (t == INFINITY) return 1.0;
    return uniform_cdf(t / a_ - static_cast<double>(k) + 1.0);
}

double PartitionScheme::h(int k, double t) const noexcept { return U(k, t) - U(k + 1, t); }

double chi(const PartitionScheme& scheme, int k, const DualPoint& y, const ProjectivePoint& x) {
    if (k < 0) throw DomainError("chi: k must be >= 0");
    return scheme.h(k, -log_delta(x, y));
}

double chi_bar(const PartitionScheme& scheme, int k, const DualPoint& y, const ProjectivePoint& x) {
    if (k < 0) throw DomainError("chi_bar: k must be >= 0");
    return scheme.U(k, -log_delta(x, y));
}

double partition_check(const PartitionScheme& scheme, const DualPoint& y, const std::vector<ProjectivePoint>& xs) {
    double worst = 0.0;
    for (const auto& x : xs) {
        const double t = -log_delta(x, y);
        double sum = 0.0;
        for (int k = 0; k <= scheme.M(); ++k) sum += scheme.h(k, t);
        sum += scheme.U(scheme.M() + 1, t);
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

double holder_estimate(const PointFunction& f, double gamma, const std::vector<PointPair>& pairs) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("holder_estimate: gamma must be in (0, 1]");
    double sup = 0.0, quotient = 0.0;
    for (const auto& [a, b] : pairs) {
        const double fa = f(a), fb = f(b);
        sup = std::max({sup, std::abs(fa), std::abs(fb)});
        const double d = angular_distance(a, b);
        if (d > 0.0) quotient = std::max(quotient, std::abs(fa - fb) / std::pow(d, gamma));
    }
    return sup + quotient;
}

double holder_estimate(const PointFunction& f, double gamma, std::size_t n_pairs, RngStream& rng) {
    std::vector<PointPair> pairs;
    pairs.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const double t1 = kPi * rng.uniform();
        const double t2 = kPi * rng.uniform();
        pairs.emplace_back(ProjectivePoint::from_angle(t1), ProjectivePoint::from_angle(t2));
    }
    return holder_estimate(f, gamma, pairs);
}

std::vector<PointPair> chi_focused_pairs(const PartitionScheme& scheme, int k, const DualPoint& y,
                                         std::size_t n_pairs, RngStream& rng) {
    if (y.dimension() != 2) throw DomainError("chi_focused_pairs requires d = 2");
    const double a = scheme.a();
    const double lo = std::max(0.0, (k - 1) * a), hi = (k + 1) * a;
    const double ty = y.angle();
    std::vector<PointPair> pairs;
    pairs.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const double t = lo + (hi - lo) * rng.uniform();
        // delta = |cos(theta - ty)| = e^{-t}
        const double off = std::acos(std::min(1.0, std::exp(-t)));
        const double theta = ty + (rng.uniform() < 0.5 ? off : -off);
        const double step = std::exp(std::log(1e-9) * rng.uniform()) * (rng.uniform() < 0.5 ? 1.0 : -1.0);
        pairs.emplace_back(ProjectivePoint::from_angle(theta), ProjectivePoint::from_angle(theta + step));
    }
    return pairs;
}

} // namespace glcoef
