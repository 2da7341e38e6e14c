#pragma once

// Matrix ensembles (the law of the i.i.d. factors g_k) and numerical
// diagnostics for the moment and proximality / irreducibility conditions.

#include "glcoef/rng.hpp"
#include "glcoef/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glcoef {

enum class ModelKind { finite_support, scalar_rotation, rotation_diag_rotation };

std::string to_string(ModelKind kind);

/// Immutable, shareable description of a distribution on GL(d, R).
///
///  - finite_support: explicit invertible matrices with probabilities.
///  - scalar_rotation: g = c * O, c from a finite set of positive scales,
///    O an independent Haar rotation. Exactly solvable (kappa(s) = E c^s) but
///    not proximal; used to validate the spectral machinery.
///  - rotation_diag_rotation: g = R(theta) * diag(exp(a_i)) * R(theta') with
///    independent Haar rotations (uniform angles on [0, pi) for d = 2).
///    Strongly irreducible and proximal whenever the log-scales are distinct.
class MatrixModel {
public:
    static MatrixModel finite_support(std::string id, std::vector<Matrix> matrices,
                                      std::vector<double> probabilities);
    static MatrixModel scalar_rotation(std::string id, int dimension, std::vector<double> scales,
                                       std::vector<double> probabilities);
    static MatrixModel rotation_diag_rotation(std::string id, std::vector<double> log_scales);
    /// d = 2 convenience: diag(e^a, e^-a).
    static MatrixModel rotation_diag_rotation(std::string id, double log_scale);

    ModelKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dim_; }
    const std::string& id() const noexcept { return id_; }

    /// Support matrices (finite_support) or the empty list.
    const std::vector<Matrix>& matrices() const noexcept { return matrices_; }
    /// Probabilities of matrices() or of scales().
    const std::vector<double>& probabilities() const noexcept { return probs_; }
    /// Scalar factors c (scalar_rotation).
    const std::vector<double>& scales() const noexcept { return scales_; }
    /// Diagonal log-scales (rotation_diag_rotation).
    const std::vector<double>& log_scales() const noexcept { return log_scales_; }
    /// diag(exp(log_scales)) for rotation_diag_rotation.
    Matrix diagonal() const;

    /// One draw from the model; depends only on the stream state.
    Matrix sample(RngStream& rng) const;

private:
    MatrixModel() = default;
    std::size_t draw_index(RngStream& rng) const;
    void build_cumulative();

    ModelKind kind_ = ModelKind::finite_support;
    int dim_ = 2;
    std::string id_;
    std::vector<Matrix> matrices_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    std::vector<double> scales_;
    std::vector<double> log_scales_;
};

Matrix rotation2(double theta);
Matrix identity_matrix(int d);
/// Haar-distributed element of SO(d).
Matrix haar_rotation(int d, RngStream& rng);

/// Spectral norm ||g||.
double operator_norm(const Matrix& g);
/// N(g) = max(||g||, ||g^-1||).
double conorm(const Matrix& g);

struct MomentEstimate {
    double epsilon = 1.0;
    double mean = 0.0;      // mean of N(g)^epsilon over the finite draws
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_overflow = 0; // draws where N(g)^epsilon was not finite
    bool ok() const noexcept { return n_overflow == 0; }
};

/// Monte Carlo estimate of the moment integral of N(g)^epsilon (epsilon > 0).
MomentEstimate estimate_moment(const MatrixModel& model, double epsilon, std::size_t n_samples,
                               RngStream& rng);

struct ConditionReport {
    double moment_estimate = 0.0;
    double moment_std_error = 0.0;
    double moment_epsilon = 1.0;
    std::size_t moment_samples = 0;
    std::size_t moment_overflows = 0;
    double proximality_slope = 0.0;       // fitted growth rate of log(s1/s2)(G_n) per step
    double proximality_slope_error = 0.0; // spread of the per-replicate slopes
    bool proximality_detected = false;    // slope > slope_tol
    bool irreducibility_flag = false;     // no invariant finite union of lines found
    std::size_t n_steps = 0;
    std::size_t n_reps = 0;
    std::uint64_t seed = 0;
};

/// Fits the singular-value gap growth of G_n by least squares, averaged over
/// replicates. The gap series is tracked with a re-orthonormalized two-vector
/// frame, so n_steps may be arbitrarily large. Requires n_steps >= 100.
ConditionReport proximality_check(const MatrixModel& model, std::size_t n_steps, std::size_t n_reps,
                                  RngStream& rng, double slope_tol = 1e-3);

/// Heuristic: true when no finite union of lines preserved by the sampled
/// products was detected. Not a proof either way.
bool irreducibility_heuristic(const MatrixModel& model, std::size_t n_products, RngStream& rng);

/// Moment, proximality and irreducibility diagnostics in one report.
ConditionReport check_conditions(const MatrixModel& model, double epsilon, std::size_t n_moment_samples,
                                 std::size_t n_steps, std::size_t n_reps, RngStream& rng,
                                 double slope_tol = 1e-3);

} // namespace glcoef
