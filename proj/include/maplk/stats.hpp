#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace maplk {

/// Monte Carlo estimate: value, standard error, sample count.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// Sample mean and standard error of the mean, summed in index order.
Estimate mean_estimate(const std::vector<double>& xs);

/// |a - b| / sqrt(se_a^2 + se_b^2); 0 when both SEs vanish and a == b.
double z_score(const Estimate& a, const Estimate& b);
double z_score(double value, double se, double target);

/// Ratio of means with delta-method SE (paired samples).
Estimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den);

struct KsResult {
    double statistic;
    double p_value;
};

/// Asymptotic Kolmogorov distribution tail P(K > lambda).
double kolmogorov_tail(double lambda);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Upper quantile of Student's t with `dof` degrees of freedom (p in (0.5, 1)).
double student_t_quantile(double p, double dof);
double normal_quantile(double p);

struct LinearFit {
    double slope;
    double intercept;
    double slope_se;
    double intercept_se;
};

/// Weighted least squares y = a + b x with weights w (inverse variances).
/// SEs are the model-based ones, i.e. they trust w.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);

}  // namespace maplk
