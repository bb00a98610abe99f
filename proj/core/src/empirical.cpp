#include "svelab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "svelab/error.hpp"
#include "svelab/format.hpp"
#include "svelab/quadrature.hpp"

namespace svelab {

EmpiricalDistribution::EmpiricalDistribution(double time, std::size_t dimension, std::vector<double> data,
                                             SeedLineage lineage)
    : time_(time), dim_(dimension), data_(std::move(data)), lineage_(lineage) {
  if (dim_ == 0) throw ValidationError("EmpiricalDistribution: dimension must be positive");
  if (data_.empty()) throw ValidationError("EmpiricalDistribution: no samples");
  if (data_.size() % dim_ != 0) throw ValidationError("EmpiricalDistribution: samples do not share the dimension");
}

EmpiricalDistribution::EmpiricalDistribution(double time, std::vector<double> samples, SeedLineage lineage)
    : EmpiricalDistribution(time, 1, std::move(samples), lineage) {}

std::vector<double> EmpiricalDistribution::mode(std::size_t n) const {
  if (n >= dim_) throw ValidationError("EmpiricalDistribution: mode index out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data_[i * dim_ + n];
  return out;
}

std::vector<double> EmpiricalDistribution::centered(std::size_t n) const {
  auto x = mode(n);
  const double shift = x.front();
  for (double& v : x) v -= shift;
  return x;
}

double EmpiricalDistribution::mean(std::size_t n) const {
  const auto x = mode(n);
  return quad::pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size());
}

double EmpiricalDistribution::variance(std::size_t n) const {
  auto x = centered(n);
  if (x.size() < 2) return 0.0;
  const double m = quad::pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size());
  for (double& v : x) v = (v - m) * (v - m);
  return quad::pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size() - 1);
}

double EmpiricalDistribution::mean_stderr(std::size_t n) const {
  return std::sqrt(variance(n) / static_cast<double>(size()));
}

double EmpiricalDistribution::variance_stderr(std::size_t n) const {
  auto x = centered(n);
  const double N = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const double m = quad::pairwise_sum(x.data(), x.size()) / N;
  std::vector<double> d2(x.size()), d4(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    d2[i] = d * d;
    d4[i] = d2[i] * d2[i];
  }
  const double m2 = quad::pairwise_sum(d2.data(), d2.size()) / N;
  const double m4 = quad::pairwise_sum(d4.data(), d4.size()) / N;
  return std::sqrt(std::max(m4 - m2 * m2, 0.0) / N);
}

double ks_statistic(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw ValidationError("ks_statistic: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_critical_5pct(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw ValidationError("ks_critical_5pct: empty sample");
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return 1.358 * std::sqrt((a + b) / (a * b));
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_samples_csv(const std::string& path, const std::vector<EmpiricalDistribution>& laws) {
  auto out = open_csv(path);
  out << "time,path_index,mode_index,value\n";
  for (const auto& law : laws)
    for (std::size_t i = 0; i < law.size(); ++i)
      for (std::size_t n = 0; n < law.dimension(); ++n)
        out << format_double(law.time()) << ',' << law.lineage().first_path + i << ',' << n << ','
            << format_double(law.value(i, n)) << '\n';
}

void write_moments_csv(const std::string& path, const std::vector<EmpiricalDistribution>& laws) {
  auto out = open_csv(path);
  out << "time,mode_index,mean,var,stderr\n";
  for (const auto& law : laws)
    for (std::size_t n = 0; n < law.dimension(); ++n)
      out << format_double(law.time()) << ',' << n << ',' << format_double(law.mean(n)) << ','
          << format_double(law.variance(n)) << ',' << format_double(law.mean_stderr(n)) << '\n';
}

}  // namespace svelab
