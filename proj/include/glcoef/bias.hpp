#pragma once

// Asymptotic bias functionals
//   b_{s,phi}(x) = lim_n E_{Q_s^x}[ (sigma(G_n, x) - n Lambda'(s)) phi(G_n . x) ]
//   d_{s,phi}(y) = int phi(x) log delta(x, y) pi_s(dx)
// on the d = 2 grid, and the summation bounds for the partition pieces.

#include "glcoef/partition.hpp"
#include "glcoef/projective.hpp"
#include "glcoef/spectral.hpp"

#include <vector>

namespace glcoef {

/// Per-cell quadrature adapted to a dual point y: every grid cell gets nodes
/// and weights (summing to 1) for cell averages. Cells containing the zero of
/// delta(., y) are split there.
class CellQuadrature {
public:
    CellQuadrature(const ProjectiveGrid& grid, const DualPoint& y);

    struct Node {
        double theta;
        double weight;
    };
    const std::vector<Node>& nodes(int cell) const noexcept { return nodes_[cell]; }
    /// Cell average of log delta(., y), with the log singularity integrated exactly.
    double log_delta_average(int cell) const noexcept { return log_avg_[cell]; }
    int size() const noexcept { return static_cast<int>(nodes_.size()); }

private:
    std::vector<std::vector<Node>> nodes_;
    std::vector<double> log_avg_;
};

struct BiasOptions {
    double tol = 1e-9;
    std::size_t n_max = 10000;
};

struct BValues {
    std::vector<double> values; // b at grid points
    std::size_t iters = 0;
    double last_increment = 0.0;
};

/// Holds the operators and eigen-data at one tilt s.
class BiasSolver {
public:
    BiasSolver(const MatrixModel& model, double s, const ProjectiveGrid& grid, const SpectralOptions& opts = {});

    const ProjectiveGrid& grid() const noexcept { return grid_; }
    const SpectralData& spectral() const noexcept { return spec_; }
    const OperatorMatrix& op() const noexcept { return op_; }
    /// Lambda'(s) of the discretized operator, nu^T Khat r / (kappa nu^T r).
    double drift() const noexcept { return drift_; }

    /// Q_s psi and the sigma-weighted Qhat_s psi.
    void apply_q(std::span<const double> psi, std::span<double> out) const;
    void apply_qhat(std::span<const double> psi, std::span<double> out) const;

    /// b on the whole grid by the operator recursion. Throws ConvergenceError
    /// (carrying the last increment) when n_max steps do not suffice.
    BValues b_values(const GridFunction& phi, const BiasOptions& opts = {}) const;
    /// b at an off-grid point by linear interpolation.
    double b_at(const GridFunction& phi, const ProjectivePoint& x, const BiasOptions& opts = {}) const;

    double d(const DualPoint& y, const GridFunction& phi) const;
    /// pi_s(phi) with phi piecewise constant on cells.
    double mass(const GridFunction& phi) const;

private:
    ProjectiveGrid grid_;
    OperatorMatrix op_;
    OperatorMatrix sigma_op_;
    SpectralData spec_;
    double drift_ = 0.0;
};

/// d_{s,phi}(y) for explicit stationary weights: sum_i pi_i phi_i avg_cell(log delta).
double d_bias(const ProjectiveGrid& grid, std::span<const double> pi, const DualPoint& y, const GridFunction& phi);

struct Delta020Report {
    std::size_t n = 0;
    double a_n = 0.0;
    int M_n = 0;
    double minus_d = 0.0;     // -d_{s,phi}(y)
    double mass = 0.0;        // pi_s(phi)
    double mass_pieces = 0.0; // sum_k pi_s(phi_{n,k}), equals mass
    double upper_sum = 0.0;   // sum_k (k+1) a_n pi_s(phi_{n,k})
    double lower_sum = 0.0;   // sum_k (k-1) a_n pi_s(phi_{n,k})
    double upper_bound = 0.0; // -d + 2 a_n pi_s(phi)
    double lower_bound = 0.0; // -d - 2 a_n pi_s(phi) - c ||phi||_inf / n^2
    bool upper_ok = false;
    bool lower_ok = false;
    double width() const noexcept { return upper_sum - lower_sum; }
    bool ok() const noexcept { return upper_ok && lower_ok; }
};

/// Pieces phi_{n,k} = phi chi_{n,k} (k < M_n) and phi chibar_{n,M_n}, pushed
/// through pi_s by the same cell quadrature. phi must be nonnegative.
/// c defaults to 10 when negative.
Delta020Report delta020_check(const BiasSolver& solver, const DualPoint& y, const GridFunction& phi,
                              const PartitionScheme& scheme, double c = -1.0);

/// pi_s(phi_{n,k}) for k = 0..M_n.
std::vector<double> piece_masses(const ProjectiveGrid& grid, std::span<const double> pi, const DualPoint& y,
                                 const GridFunction& phi, const PartitionScheme& scheme);

} // namespace glcoef
