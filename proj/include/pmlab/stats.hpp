#ifndef PMLAB_STATS_HPP
#define PMLAB_STATS_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace pmlab::stats {

struct Summary {
    double mean = 0.0;
    double stderr_mean = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t count = 0;
};

Summary summarize(const std::vector<double>& xs);

// Pearson correlation of paired samples.
double correlation(const std::vector<double>& xs, const std::vector<double>& ys);

// Two-sample Kolmogorov-Smirnov distance. Inputs need not be sorted.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS distance of samples against a CDF.
double ks_vs_cdf(std::vector<double> samples, const std::function<double(double)>& cdf);

// Empirical quantile by linear interpolation on sorted data, u in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double u);

// Carrier for an empirical distribution: sorted samples with interpolated
// inverse CDF.
class SampledDistribution {
  public:
    SampledDistribution() = default;
    explicit SampledDistribution(std::vector<double> samples);

    double quantile(double u) const;
    const std::vector<double>& sorted_samples() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

}  // namespace pmlab::stats

#endif
