#include <cmath>
#include <stdexcept>
#include <vector>

#include "hategraph/stats.hpp"

namespace hategraph::stats {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre polynomial.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order) {
    nodes.resize(static_cast<size_t>(order));
    weights.resize(static_cast<size_t>(order));
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(order) + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < order; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = static_cast<double>(order) * (x * p0 - p1) / (x * x - 1.0);
        double dx = p0 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[static_cast<size_t>(i)] = -x;
      nodes[static_cast<size_t>(order - 1 - i)] = x;
      weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
      weights[static_cast<size_t>(order - 1 - i)] = weights[static_cast<size_t>(i)];
    }
  }
};

const GaussLegendre& gl48() {
  static const GaussLegendre g(48);
  return g;
}

template <typename Fn>
double integrate_panel(const GaussLegendre& gl, double a, double b, Fn&& fn) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (size_t i = 0; i < gl.nodes.size(); ++i) sum += gl.weights[i] * fn(mid + half * gl.nodes[i]);
  return sum * half;
}

// Modified Lentz continued fraction for the incomplete beta.
double beta_continued_fraction(double x, double a, double b) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

// k * integral of phi(z) * (Phi(z+w) - Phi(z))^(k-1) dz: the probability that
// the range of k standard normals is below w.
double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const GaussLegendre& gl = gl48();
  // The integrand is bounded by phi(z), negligible beyond |z| = 10.
  const double lo = -10.0;
  const double hi = 10.0;
  const int panels = 8;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = lo + (hi - lo) * static_cast<double>(p) / panels;
    double b = lo + (hi - lo) * static_cast<double>(p + 1) / panels;
    sum += integrate_panel(gl, a, b, [&](double z) {
      double span = norm_cdf(z + w) - norm_cdf(z);
      if (span <= 0.0) return 0.0;
      return norm_pdf(z) * std::pow(span, static_cast<double>(k - 1));
    });
  }
  return static_cast<double>(k) * sum;
}

// log density of S = sqrt(chi2_df / df).
double log_chi_scale_density(double s, double df) {
  return (1.0 - df / 2.0) * std::log(2.0) + (df / 2.0) * std::log(df) +
         (df - 1.0) * std::log(s) - df * s * s / 2.0 - std::lgamma(df / 2.0);
}

}  // namespace

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_sf(double f, double df1, double df2) {
  if (f <= 0.0) return 1.0;
  return regularized_incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0);
}

double t_sf(double t, double df) {
  if (t < 0.0) return 1.0 - t_sf(-t, df);
  return 0.5 * regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw std::invalid_argument("studentized range: k must be >= 2");
  if (df < 1.0) throw std::invalid_argument("studentized range: df must be >= 1");
  if (q <= 0.0) return 0.0;

  const GaussLegendre& gl = gl48();
  // Outer integral over the scale factor s, whose density concentrates
  // around 1 with spread ~ 1/sqrt(2 df).
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - 12.0 * spread);
  const double hi = 1.0 + 12.0 * spread;
  const int panels = 10;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = lo + (hi - lo) * static_cast<double>(p) / panels;
    double b = lo + (hi - lo) * static_cast<double>(p + 1) / panels;
    total += integrate_panel(gl, a, b, [&](double s) {
      if (s <= 0.0) return 0.0;
      return std::exp(log_chi_scale_density(s, df)) * normal_range_cdf(q * s, k);
    });
  }
  if (total < 0.0) total = 0.0;
  if (total > 1.0) total = 1.0;
  return total;
}

double studentized_range_sf(double q, int k, double df) {
  return 1.0 - studentized_range_cdf(q, k, df);
}

double studentized_range_quantile(double p, int k, double df) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("studentized range quantile: p must be in (0, 1)");
  if (k < 2) throw std::invalid_argument("studentized range quantile: k must be >= 2");
  if (df < 1.0) throw std::invalid_argument("studentized range quantile: df must be >= 1");

  double lo = 0.0, hi = 1.0;
  int expansions = 0;
  while (studentized_range_cdf(hi, k, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60)
      throw std::runtime_error("studentized range quantile: bracket expansion failed");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-9) return mid;
    (studentized_range_cdf(mid, k, df) < p ? lo : hi) = mid;
  }
  throw std::runtime_error("studentized range quantile: no convergence within iteration budget");
}

}  // namespace hategraph::stats
