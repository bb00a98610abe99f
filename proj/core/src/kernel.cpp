#include "svelab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "svelab/error.hpp"

namespace svelab {
namespace {

// phi1(y) = (e^y - 1)/y, phi2(y) = (e^y - 1 - y)/y^2
double phi1(double y) { return std::abs(y) < 1e-8 ? 1.0 + 0.5 * y : std::expm1(y) / y; }
double phi2(double y) {
  if (std::abs(y) < 1e-3) return 0.5 + y / 6.0 + y * y / 24.0 + y * y * y / 120.0;
  return (std::expm1(y) - y) / (y * y);
}

}  // namespace

struct Kernel::Table {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> slope;  // log-slope (log_linear) or linear slope per piece
  std::vector<bool> loglin;
  std::vector<double> cum1, cum2;
  TableInterp interp = TableInterp::log_linear;
  double delta = 0.0;

  // contribution of piece j at offset x in [0, t_{j+1}-t_j]
  double value(std::size_t j, double x) const {
    if (interp == TableInterp::constant_left) return v[j];
    return loglin[j] ? v[j] * std::exp(slope[j] * x) : v[j] + slope[j] * x;
  }
  double i1(std::size_t j, double x) const {
    if (interp == TableInterp::constant_left) return v[j] * x;
    return loglin[j] ? v[j] * x * phi1(slope[j] * x) : v[j] * x + 0.5 * slope[j] * x * x;
  }
  double i2(std::size_t j, double x) const {
    if (interp == TableInterp::constant_left) return 0.5 * v[j] * x * x;
    return loglin[j] ? v[j] * x * x * phi2(slope[j] * x)
                     : 0.5 * v[j] * x * x + slope[j] * x * x * x / 6.0;
  }
  // power-law head on [0, t_0]
  double head_scale() const { return v[0] * std::pow(t[0], delta); }
};

Kernel Kernel::fractional(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("fractional kernel: alpha must be positive");
  Kernel k;
  k.form_ = Form::fractional;
  k.alpha_ = alpha;
  k.gamma_alpha_ = std::tgamma(alpha);
  k.delta_ = alpha < 1.0 ? 1.0 - alpha : 0.0;
  k.c_delta_ = 1.0 / k.gamma_alpha_;
  k.completely_monotone_ = alpha <= 1.0;
  return k;
}

Kernel Kernel::log1p_inverse(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("log1p_inverse kernel: delta must lie in (0, 1)");
  Kernel k;
  k.form_ = Form::log1p_inverse;
  k.delta_ = delta;
  k.c_delta_ = 1.0 / delta;
  k.completely_monotone_ = true;
  return k;
}

Kernel Kernel::exponential_mixture(std::vector<ExpTerm> terms) {
  if (terms.empty()) throw DomainError("exponential mixture: at least one term required");
  for (const auto& t : terms)
    if (!(t.weight >= 0.0) || !(t.rate > 0.0) || !std::isfinite(t.weight) || !std::isfinite(t.rate))
      throw DomainError("exponential mixture: weights must be >= 0 and rates > 0");
  Kernel k;
  k.form_ = Form::exponential_mixture;
  k.terms_ = std::move(terms);
  k.delta_ = 0.0;
  k.c_delta_ = 0.0;
  for (const auto& t : k.terms_) k.c_delta_ += t.weight;
  k.completely_monotone_ = true;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> times, std::vector<double> values, double delta,
                         TableInterp interp) {
  if (times.size() != values.size() || times.size() < 2)
    throw ValidationError("tabulated kernel: need at least 2 (time, value) pairs of equal length");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("tabulated kernel: delta must lie in [0, 1)");
  if (!(times[0] >= 0.0)) throw ValidationError("tabulated kernel: times must be non-negative");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ValidationError("tabulated kernel: times must be strictly increasing");
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw ValidationError("tabulated kernel: values must be finite and non-negative");
  }
  auto tab = std::make_shared<Table>();
  tab->t = std::move(times);
  tab->v = std::move(values);
  tab->interp = interp;
  tab->delta = tab->t[0] > 0.0 ? delta : 0.0;
  const std::size_t m = tab->t.size();
  tab->slope.assign(m, 0.0);
  tab->loglin.assign(m, false);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = tab->t[j + 1] - tab->t[j];
    if (interp == TableInterp::log_linear && tab->v[j] > 0.0 && tab->v[j + 1] > 0.0) {
      tab->loglin[j] = true;
      tab->slope[j] = std::log(tab->v[j + 1] / tab->v[j]) / h;
    } else if (interp != TableInterp::constant_left) {
      tab->slope[j] = (tab->v[j + 1] - tab->v[j]) / h;
    }
  }
  tab->cum1.assign(m, 0.0);
  tab->cum2.assign(m, 0.0);
  if (tab->t[0] > 0.0) {
    const double s = tab->head_scale(), d = tab->delta, t0 = tab->t[0];
    tab->cum1[0] = s * std::pow(t0, 1.0 - d) / (1.0 - d);
    tab->cum2[0] = s * std::pow(t0, 2.0 - d) / ((1.0 - d) * (2.0 - d));
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = tab->t[j + 1] - tab->t[j];
    tab->cum1[j + 1] = tab->cum1[j] + tab->i1(j, h);
    tab->cum2[j + 1] = tab->cum2[j] + tab->cum1[j] * h + tab->i2(j, h);
  }
  // sampled monotonicity check
  for (std::size_t j = 0; j + 1 < m; ++j)
    if (tab->v[j + 1] > tab->v[j] * (1.0 + 1e-12) + 1e-300)
      throw ValidationError("tabulated kernel: values must be nonincreasing (node " + std::to_string(j + 1) + ")");
  Kernel k;
  k.form_ = Form::tabulated;
  k.delta_ = tab->delta;
  k.c_delta_ = tab->t[0] > 0.0 ? tab->head_scale() : tab->v[0];
  k.completely_monotone_ = false;
  k.table_ = std::move(tab);
  return k;
}

Kernel Kernel::from_grid_function(const GridFunction& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw ValidationError("grid-function kernel: values must be finite");
  std::vector<double> t(f.grid().nodes().begin(), f.grid().nodes().end());
  std::vector<double> v = f.values();
  auto tab = std::make_shared<Table>();
  tab->t = std::move(t);
  tab->v = std::move(v);
  tab->interp = f.interpolation() == Interpolation::linear ? TableInterp::linear : TableInterp::constant_left;
  const std::size_t m = tab->t.size();
  tab->slope.assign(m, 0.0);
  tab->loglin.assign(m, false);
  tab->cum1.assign(m, 0.0);
  tab->cum2.assign(m, 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = tab->t[j + 1] - tab->t[j];
    if (tab->interp == TableInterp::linear) tab->slope[j] = (tab->v[j + 1] - tab->v[j]) / h;
    tab->cum1[j + 1] = tab->cum1[j] + tab->i1(j, h);
    tab->cum2[j + 1] = tab->cum2[j] + tab->cum1[j] * h + tab->i2(j, h);
  }
  Kernel k;
  k.form_ = Form::tabulated;
  k.delta_ = 0.0;
  double sup = 0.0;
  for (double x : tab->v) sup = std::max(sup, std::abs(x));
  k.c_delta_ = sup;
  k.completely_monotone_ = false;
  k.table_ = std::move(tab);
  return k;
}

Kernel Kernel::load_csv(const std::string& path, double delta) {
  std::ifstream in(path);
  if (!in) throw ValidationError("kernel CSV: cannot open " + path);
  std::vector<double> t, v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) {
      if (lineno == 1 && t.empty()) continue;  // header
      throw ValidationError("kernel CSV: malformed row " + std::to_string(lineno) + " in " + path);
    }
    t.push_back(a);
    v.push_back(b);
  }
  return tabulated(std::move(t), std::move(v), delta);
}

double Kernel::operator()(double t) const {
  if (t < 0.0) return 0.0;
  switch (form_) {
    case Form::fractional:
      if (t == 0.0) return alpha_ < 1.0 ? std::numeric_limits<double>::infinity() : (alpha_ == 1.0 ? 1.0 : 0.0);
      return std::pow(t, alpha_ - 1.0) / gamma_alpha_;
    case Form::log1p_inverse:
      if (t == 0.0) return std::numeric_limits<double>::infinity();
      return std::log1p(1.0 / t);
    case Form::exponential_mixture: {
      double s = 0.0;
      for (const auto& e : terms_) s += e.weight * std::exp(-e.rate * t);
      return s;
    }
    case Form::tabulated: {
      const Table& tb = *table_;
      if (t < tb.t[0]) {
        if (tb.delta == 0.0) return tb.v[0];
        return t == 0.0 ? std::numeric_limits<double>::infinity() : tb.head_scale() * std::pow(t, -tb.delta);
      }
      if (t > tb.t.back()) return 0.0;
      if (t == tb.t.back()) return tb.v.back();
      const std::size_t j = static_cast<std::size_t>(std::upper_bound(tb.t.begin(), tb.t.end(), t) - tb.t.begin()) - 1;
      return tb.value(j, t - tb.t[j]);
    }
  }
  return 0.0;
}

double Kernel::primitive(double t) const {
  if (t <= 0.0) return 0.0;
  switch (form_) {
    case Form::fractional:
      return std::pow(t, alpha_) / (alpha_ * gamma_alpha_);
    case Form::log1p_inverse:
      return t * std::log1p(1.0 / t) + std::log1p(t);
    case Form::exponential_mixture: {
      double s = 0.0;
      for (const auto& e : terms_) s += e.weight * (-std::expm1(-e.rate * t)) / e.rate;
      return s;
    }
    case Form::tabulated: {
      const Table& tb = *table_;
      if (t < tb.t[0]) return tb.head_scale() * std::pow(t, 1.0 - tb.delta) / (1.0 - tb.delta);
      if (t >= tb.t.back()) return tb.cum1.back();
      const std::size_t j = static_cast<std::size_t>(std::upper_bound(tb.t.begin(), tb.t.end(), t) - tb.t.begin()) - 1;
      return tb.cum1[j] + tb.i1(j, t - tb.t[j]);
    }
  }
  return 0.0;
}

double Kernel::second_primitive(double t) const {
  if (t <= 0.0) return 0.0;
  switch (form_) {
    case Form::fractional:
      return std::pow(t, alpha_ + 1.0) / (alpha_ * (alpha_ + 1.0) * gamma_alpha_);
    case Form::log1p_inverse:
      return 0.5 * t * t * std::log1p(1.0 / t) + (t + 0.5) * std::log1p(t) - 0.5 * t;
    case Form::exponential_mixture: {
      double s = 0.0;
      for (const auto& e : terms_) {
        const double x = e.rate * t;
        // t/lambda - (1 - e^{-lambda t})/lambda^2 = (x + expm1(-x)) / lambda^2
        const double core = x < 1e-3 ? x * x * (0.5 - x / 6.0 + x * x / 24.0) : x + std::expm1(-x);
        s += e.weight * core / (e.rate * e.rate);
      }
      return s;
    }
    case Form::tabulated: {
      const Table& tb = *table_;
      if (t < tb.t[0])
        return tb.head_scale() * std::pow(t, 2.0 - tb.delta) / ((1.0 - tb.delta) * (2.0 - tb.delta));
      if (t >= tb.t.back()) return tb.cum2.back() + tb.cum1.back() * (t - tb.t.back());
      const std::size_t j = static_cast<std::size_t>(std::upper_bound(tb.t.begin(), tb.t.end(), t) - tb.t.begin()) - 1;
      const double x = t - tb.t[j];
      return tb.cum2[j] + tb.cum1[j] * x + tb.i2(j, x);
    }
  }
  return 0.0;
}

double Kernel::l1_norm() const {
  switch (form_) {
    case Form::fractional:
    case Form::log1p_inverse:
      return std::numeric_limits<double>::infinity();
    case Form::exponential_mixture: {
      double s = 0.0;
      for (const auto& e : terms_) s += e.weight / e.rate;
      return s;
    }
    case Form::tabulated:
      return table_->cum1.back();
  }
  return 0.0;
}

double Kernel::support_end() const {
  if (form_ == Form::tabulated) return table_->t.back();
  return std::numeric_limits<double>::infinity();
}

std::size_t Kernel::table_size() const noexcept { return table_ ? table_->t.size() : 0; }

std::string Kernel::describe() const {
  std::ostringstream os;
  switch (form_) {
    case Form::fractional:
      os << "fractional(alpha=" << alpha_ << ")";
      break;
    case Form::log1p_inverse:
      os << "log1p_inverse(delta=" << delta_ << ")";
      break;
    case Form::exponential_mixture:
      os << "exponential_mixture(" << terms_.size() << " terms)";
      break;
    case Form::tabulated:
      os << "tabulated(" << table_->t.size() << " nodes, delta=" << delta_ << ")";
      break;
  }
  return os.str();
}

}  // namespace svelab
