#pragma once

// Partition of unity in the variable t = -log delta(x, y):
//   U_{n,k}(t) = U((t - (k-1) a_n) / a_n),  h_{n,k} = U_{n,k} - U_{n,k+1},
//   chi_{n,k}(x) = h_{n,k}(-log delta(x, y)),  chibar_{n,k}(x) = U_{n,k}(-log delta(x, y)),
// with a_n = 1 / log n and truncation index M_n = floor(A log^2 n).

#include "glcoef/projective.hpp"
#include "glcoef/rng.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace glcoef {

class PartitionScheme {
public:
    /// Requires n >= 18 and A > 0.
    PartitionScheme(std::size_t n, double A = 4.0);

    std::size_t n() const noexcept { return n_; }
    double A() const noexcept { return A_; }
    double a() const noexcept { return a_; }
    int M() const noexcept { return M_; }

    /// U_{n,k}(t); t may be +infinity.
    double U(int k, double t) const noexcept;
    /// h_{n,k}(t) = U_{n,k}(t) - U_{n,k+1}(t).
    double h(int k, double t) const noexcept;

    /// Piece k of the truncated family at t: h_{n,k} for k < M_n, U_{n,M_n} for k = M_n.
    double piece(int k, double t) const noexcept { return k < M_ ? h(k, t) : U(M_, t); }

private:
    std::size_t n_;
    double A_;
    double a_;
    int M_;
};

/// Uniform CDF on [0, 1].
inline double uniform_cdf(double t) noexcept { return t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t); }

double chi(const PartitionScheme& scheme, int k, const DualPoint& y, const ProjectivePoint& x);
double chi_bar(const PartitionScheme& scheme, int k, const DualPoint& y, const ProjectivePoint& x);

/// max over xs of |sum_{k=0}^{M_n} chi_{n,k}(x) + chibar_{n,M_n+1}(x) - 1|.
double partition_check(const PartitionScheme& scheme, const DualPoint& y, const std::vector<ProjectivePoint>& xs);

using PointFunction = std::function<double(const ProjectivePoint&)>;
using PointPair = std::pair<ProjectivePoint, ProjectivePoint>;

/// Sampled lower bound on ||f||_gamma = sup |f| + sup |f(x) - f(x')| / d(x, x')^gamma
/// over the given pairs (both members also count towards sup |f|).
double holder_estimate(const PointFunction& f, double gamma, const std::vector<PointPair>& pairs);

/// Same, over `n_pairs` pairs with independent uniform angles (d = 2).
double holder_estimate(const PointFunction& f, double gamma, std::size_t n_pairs, RngStream& rng);

/// Pairs concentrated where chi_{n,k}^y varies: one point with -log delta
/// uniform on [(k-1) a_n, (k+1) a_n], the other a random angular offset away
/// (offsets log-uniform between 1e-9 and 1). d = 2 only.
std::vector<PointPair> chi_focused_pairs(const PartitionScheme& scheme, int k, const DualPoint& y,
                                         std::size_t n_pairs, RngStream& rng);

} // namespace glcoef
