#pragma once

// First-order Edgeworth expansions and empirical-CDF discrepancies.

#include "glcoef/bias.hpp"
#include "glcoef/partition.hpp"
#include "glcoef/tilt.hpp"

#include <functional>
#include <span>
#include <vector>

namespace glcoef {

double normal_cdf(double t) noexcept;
double normal_pdf(double t) noexcept;

struct EdgeworthParams {
    double drift = 0.0;  // Lambda'(s)
    double sigma = 1.0;  // sqrt(Lambda''(s))
    double skew = 0.0;   // Lambda'''(s)
    double bias_b = 0.0; // b_{s,phi}(x)
    double bias_d = 0.0; // d_{s,phi}(y)
    double mass = 1.0;   // pi_s(phi)
    std::size_t n = 1;

    /// Throws DomainError unless sigma > 0 and n >= 1.
    void validate() const;
};

/// mass [Phi(t) + skew / (6 sigma^3 sqrt n) (1 - t^2) phi(t)] - (b + d) / (sigma sqrt n) phi(t).
/// Not clamped to [0, 1].
double edgeworth_coeff_cdf(const EdgeworthParams& p, double t);
/// Same expansion without the d term (the norm cocycle version).
double edgeworth_cocycle_cdf(const EdgeworthParams& p, double t);

/// Sorted samples with optional nonnegative weights. Weighted tables divide
/// by `total` (default: the weight sum, so the ECDF ends at 1); a larger or
/// smaller total gives a sub- or super-probability ECDF.
class EcdfTable {
public:
    explicit EcdfTable(std::vector<double> samples);
    EcdfTable(std::span<const double> samples, std::span<const double> weights, double total = 0.0);

    std::size_t size() const noexcept { return x_.size(); }
    const std::vector<double>& sorted() const noexcept { return x_; }
    /// Cumulative weight after each sorted sample.
    const std::vector<double>& cumulative() const noexcept { return cum_; }
    /// F_N(t) = weight of samples <= t.
    double operator()(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> cum_;
};

/// sup_t |F_N(t) - F(t)| evaluated at every jump from both sides.
/// The reference must be nondecreasing or at least continuous at the jumps.
double ecdf_ks(const EcdfTable& ecdf, const std::function<double(double)>& reference);
double ecdf_ks(std::vector<double> samples, const std::function<double(double)>& reference);

/// n_points equally spaced points on [lo, hi] (default 241 on [-6, 6]).
std::vector<double> t_grid(double lo = -6.0, double hi = 6.0, int n_points = 241);

struct SandwichRow {
    int k = 0;
    double F = 0.0, upper = 0.0, lower = 0.0;
    double se_F = 0.0, se_upper = 0.0, se_lower = 0.0;
    bool ok = false;
};

struct SandwichReport {
    std::size_t n = 0;
    double t = 0.0;
    int M_n = 0;
    std::vector<SandwichRow> rows; // k = 0..M_n, upper includes W_n at k = M_n
    double W_n = 0.0;
    double W_se = 0.0;
    double w_tol = 0.0;
    bool w_ok = false;
    std::vector<int> violations;
    bool ok() const noexcept { return w_ok && violations.empty(); }
};

/// Tilted Monte Carlo estimates of the partition pieces
///   F_{n,k}(t) = E_Q[phi_{n,k}(x_n) 1{(log|<f, G_n v>| - n Lambda') / (sigma sqrt n) <= t}],
/// the upper sandwich H_{n,k} at threshold t + (k+1) a_n / (sigma sqrt n), the
/// lower one at t + (k-1) a_n / (sigma sqrt n), and the tail term W_n. Uses the
/// same paths for all pieces. spec must carry derivatives.
SandwichReport sandwich_diagnostic(const MatrixModel& model, const SpectralData& spec, const ProjectiveGrid& grid,
                                   const PartitionScheme& scheme, const ProjectivePoint& x, const DualPoint& y,
                                   const GridFunction& phi, double t, std::size_t n_mc, const RngStream& rng,
                                   const TiltOptions& opts = {}, double w_tol = -1.0);

} // namespace glcoef
