#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace svelab {

/// Which RNG streams produced a sample set.
struct SeedLineage {
  std::uint64_t master_seed = 0;
  std::uint64_t first_path = 0;
};

/// Samples of a scalar or mode-vector valued law at one time, stored
/// sample-major: value(i, n) is mode n of sample i.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(double time, std::size_t dimension, std::vector<double> data, SeedLineage lineage = {});
  /// Scalar samples.
  EmpiricalDistribution(double time, std::vector<double> samples, SeedLineage lineage = {});

  double time() const noexcept { return time_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size() / dim_; }
  const SeedLineage& lineage() const noexcept { return lineage_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double value(std::size_t sample, std::size_t mode) const { return data_[sample * dim_ + mode]; }
  /// All samples of one mode.
  std::vector<double> mode(std::size_t n) const;

  double mean(std::size_t n = 0) const;
  /// Unbiased sample variance.
  double variance(std::size_t n = 0) const;
  double mean_stderr(std::size_t n = 0) const;
  /// Large-sample standard error of the variance estimate from the fourth central moment.
  double variance_stderr(std::size_t n = 0) const;

 private:
  std::vector<double> centered(std::size_t n) const;  // shifted by the first sample
  double time_;
  std::size_t dim_;
  std::vector<double> data_;
  SeedLineage lineage_;
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y|.
double ks_statistic(std::vector<double> x, std::vector<double> y);
/// Asymptotic 5% critical value 1.358 sqrt((n + m) / (n m)).
double ks_critical_5pct(std::size_t n, std::size_t m);

/// Rows (time, path_index, mode_index, value).
void write_samples_csv(const std::string& path, const std::vector<EmpiricalDistribution>& laws);
/// Rows (time, mode_index, mean, var, stderr), stderr being that of the mean.
void write_moments_csv(const std::string& path, const std::vector<EmpiricalDistribution>& laws);

}  // namespace svelab
