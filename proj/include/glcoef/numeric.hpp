#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace glcoef {

/// Compensated (Kahan-Babuska / Neumaier) running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pairwise (cascade) summation with a fixed split, so the result depends only
/// on the input order and never on how the inputs were produced.
double pairwise_sum(std::span<const double> xs) noexcept;

struct MeanAndError {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error of the mean, both via pairwise sums.
MeanAndError mean_and_error(std::span<const double> xs);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

} // namespace glcoef
