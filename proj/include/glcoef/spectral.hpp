#pragma once

// Grid discretization of the tilted transfer operator
//   (P_s phi)(x) = E[ e^{s sigma(g, x)} phi(g . x) ]
// on P(R^2), its dominant eigen-triple and the derivatives of Lambda = log kappa.

#include "glcoef/models.hpp"
#include "glcoef/rng.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace glcoef {

/// Midpoint grid theta_i = (i + 1/2) pi / m on the circle P(R^2) of length pi.
class ProjectiveGrid {
public:
    explicit ProjectiveGrid(int m);

    int size() const noexcept { return m_; }
    double spacing() const noexcept { return h_; }
    double theta(int i) const noexcept { return (i + 0.5) * h_; }

    /// Linear periodic interpolation stencil for an angle: value ~ (1-w) f[j0] + w f[j1].
    struct Stencil {
        int j0;
        int j1;
        double w;
    };
    Stencil locate(double theta) const noexcept;
    /// Cell [i h, (i+1) h) containing theta (reduced mod pi).
    int cell_of(double theta) const noexcept;

private:
    int m_;
    double h_;
};

/// Linear periodic interpolation of grid values at angle theta.
double interpolate(const ProjectiveGrid& grid, std::span<const double> values, double theta);

/// Values of a function on the grid cells, plus an id used in CSV output.
struct GridFunction {
    std::string id;
    std::vector<double> values;
};

GridFunction constant_function(const ProjectiveGrid& grid, double c, std::string id = "const");
/// phi(theta) = c0 + sum_k (a_k cos 2k theta + b_k sin 2k theta) with random
/// coefficients in [-1, 1] (k <= n_modes); smooth and pi-periodic.
GridFunction random_trig_function(const ProjectiveGrid& grid, int n_modes, RngStream& rng, std::string id);

struct BuildOptions {
    int n_quad = 512;    // angle nodes for rotation-diag-rotation
    double s_max = 0.25; // |s| bound
    unsigned threads = 1;
};

/// Dense row-major m x m matrix K with (P_s phi)(x_i) ~ sum_j K[i][j] phi_j.
/// When sigma_weighted, each contribution also carries the factor sigma(g, x_i).
struct OperatorMatrix {
    int m = 0;
    double s = 0.0;
    bool sigma_weighted = false;
    std::vector<double> k;

    double operator()(int i, int j) const noexcept { return k[static_cast<std::size_t>(i) * m + j]; }
    std::span<const double> row(int i) const noexcept {
        return {k.data() + static_cast<std::size_t>(i) * m, static_cast<std::size_t>(m)};
    }
};

/// Throws DomainError for d != 2 or |s| > s_max.
OperatorMatrix build_operator(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                              const BuildOptions& opts = {});
/// The sigma-weighted operator used by the b recursion.
OperatorMatrix build_sigma_operator(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                                    const BuildOptions& opts = {});

/// y = K x and y = K^T x through the dispatched kernels.
void apply(const OperatorMatrix& op, std::span<const double> x, std::span<double> y);
void apply_transposed(const OperatorMatrix& op, std::span<const double> x, std::span<double> y);

struct EigenOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
};

struct SpectralData {
    double s = 0.0;
    int m = 0;
    double kappa = 1.0;
    double Lambda = 0.0;
    std::vector<double> r;  // right eigenfunction, sum_i nu_i r_i = 1
    std::vector<double> nu; // left eigenvector, sum_i nu_i = 1
    std::vector<double> pi; // stationary weights nu_i r_i / sum nu r
    bool has_derivatives = false;
    double Lambda1 = 0.0, Lambda2 = 0.0, Lambda3 = 0.0;
    double residual = 0.0;      // ||K r - kappa r||_inf / ||r||_inf
    double left_residual = 0.0; // ||K^T nu - kappa nu||_1 / ||nu||_1
    std::size_t iters = 0;

    double sigma() const;
};

/// Joint left/right power iteration from the constant vector. kappa is the
/// ratio nu^T K r / nu^T r. Throws ConvergenceError after max_iter.
SpectralData dominant_eigen(const OperatorMatrix& op, const EigenOptions& opts = {});

/// pi_i = nu_i r_i / sum_j nu_j r_j.
std::vector<double> stationary_measure(const SpectralData& spec);

enum class DerivativeScheme { plain, richardson };

struct LambdaDerivatives {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    std::array<double, 7> lambda{}; // Lambda(s + j h), j = -3..3
};

/// Finite differences of Lambda on {s + j h : j = -3..3}. `plain` uses the
/// second-order central formulas; `richardson` the sixth-order (first and
/// second derivative) and fourth-order (third derivative) stencils on the
/// same nodes. Throws DomainError if the stencil leaves (-s_max, s_max).
LambdaDerivatives lambda_derivatives(const MatrixModel& model, double s, const ProjectiveGrid& grid, double h,
                                     DerivativeScheme scheme = DerivativeScheme::richardson,
                                     const BuildOptions& build = {}, const EigenOptions& eig = {});

struct SpectralOptions {
    BuildOptions build;
    EigenOptions eig;
    double h = 0.02;
    DerivativeScheme scheme = DerivativeScheme::richardson;
    bool derivatives = true;
};

/// Operator, eigen-triple, stationary weights and (optionally) derivatives at s.
SpectralData solve_spectral(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                            const SpectralOptions& opts = {});

/// Histogram (probabilities per grid cell) of the direction chain x_n = G_n . x0
/// after n_burn steps, one entry per subsequent step. Requires n_burn >= 1000.
std::vector<double> mc_invariant_measure(const MatrixModel& model, const ProjectiveGrid& grid, std::size_t n_burn,
                                         std::size_t n_samples, RngStream& rng, double theta0 = 0.0);

struct ContractionReport {
    double rate = 0.0;           // exp(fitted slope of log ||P^n phi||_inf)
    std::vector<double> norms;   // ||P^n phi||_inf, n = 0, 1, ...
    std::size_t fitted_steps = 0;
};

/// Iterates P_0 on phi - nu(phi), stopping at n_max or when the norm drops
/// below `floor` (relative to the start).
ContractionReport remainder_contraction(const OperatorMatrix& op0, const SpectralData& spec0,
                                        std::span<const double> phi, std::size_t n_max = 200,
                                        double floor = 1e-14);

} // namespace glcoef
