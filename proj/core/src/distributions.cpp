#include "icbd/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

namespace icbd {

namespace {

void validate_dims(const DetectorDims& d) {
  if (d.N < 1 || d.L < 1 || d.p < 1 || d.q < 1) {
    throw ValidationError("detector dims: all dimensions must be positive");
  }
  if (d.p + d.q >= d.N) {
    throw ValidationError("detector dims: p + q must be less than N");
  }
  if (d.L < d.N - d.q) {
    throw ValidationError("detector dims: L must satisfy L >= N - q");
  }
}

void validate_f_spec(const FDistSpec& spec) {
  if (spec.numerator_dof < 1 || spec.denominator_dof < 1) {
    throw ValidationError("F law: DOFs must be at least 1");
  }
  if (!(spec.noncentrality >= 0.0)) {
    throw ValidationError("F law: noncentrality must be nonnegative");
  }
}

void validate_beta_spec(const BetaDistSpec& spec) {
  if (spec.a < 1 || spec.b < 1) {
    throw ValidationError("Beta law: DOFs must be at least 1");
  }
}

// Gauss-Legendre rule on (0, 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule compute_gauss_legendre_unit(int order) {
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int k = 0; k < (order + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = 0.5 * (1.0 - x);  // descending x maps to ascending node
    rule.weights[k] = 0.5 * w;
    rule.nodes[order - 1 - k] = 0.5 * (1.0 + x);
    rule.weights[order - 1 - k] = 0.5 * w;
  }
  return rule;
}

const QuadratureRule& gauss_legendre_unit() {
  static const QuadratureRule rule = compute_gauss_legendre_unit(96);
  return rule;
}

// Integral of f over (lo, hi) with the fixed unit rule mapped affinely.
template <typename F>
double integrate(F&& f, double lo, double hi) {
  if (!(hi > lo)) {
    return 0.0;
  }
  const QuadratureRule& rule = gauss_legendre_unit();
  const double span = hi - lo;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(lo + span * rule.nodes[i]);
  }
  return acc * span;
}

double central_survival(int a, int b, double eta) {
  // T/(1+T) ~ Beta(a, b), so P(T > eta) = I_{1/(1+eta)}(b, a).
  return boost::math::ibeta(static_cast<double>(b), static_cast<double>(a),
                            1.0 / (1.0 + eta));
}

}  // namespace

FDistSpec glrt_he_law(const DetectorDims& dims, double noncentrality) {
  validate_dims(dims);
  return FDistSpec{dims.p, dims.L - dims.N + dims.q + 1, noncentrality};
}

BetaDistSpec loss_factor_law(const DetectorDims& dims) {
  validate_dims(dims);
  return BetaDistSpec{dims.L - dims.N + dims.p + dims.q + 1, dims.N - dims.p - dims.q};
}

double cf_survival(const FDistSpec& spec, double eta) {
  validate_f_spec(spec);
  if (!(eta >= 0.0)) {
    throw ValidationError("cf_survival: threshold must be nonnegative");
  }
  if (eta == 0.0) {
    return 1.0;
  }
  const double delta = spec.noncentrality;
  if (delta <= 0.0) {
    return central_survival(spec.numerator_dof, spec.denominator_dof, eta);
  }

  // Poisson mixture over the numerator shape, summed outward from the modal
  // weight; the omitted Poisson tail bounds the truncation error by 1e-12.
  const double x = 1.0 / (1.0 + eta);
  const auto term = [&](int k) {
    return boost::math::ibeta(static_cast<double>(spec.denominator_dof),
                              static_cast<double>(spec.numerator_dof + k), x);
  };
  const int k0 = static_cast<int>(delta);
  const double log_w0 = k0 * std::log(delta) - delta - std::lgamma(k0 + 1.0);
  const double w0 = std::exp(log_w0);

  double total = w0 * term(k0);
  double mass = w0;

  double w = w0;
  for (int k = k0; k > 0 && w > 1e-18; --k) {
    w *= k / delta;
    total += w * term(k - 1);
    mass += w;
  }
  w = w0;
  for (int k = k0 + 1; mass < 1.0 - 1e-12; ++k) {
    w *= delta / k;
    if (w <= 0.0) {
      break;
    }
    total += w * term(k);
    mass += w;
  }
  return std::clamp(total, 0.0, 1.0);
}

double cf_cdf(const FDistSpec& spec, double eta) { return 1.0 - cf_survival(spec, eta); }

double cb_pdf(const BetaDistSpec& spec, double beta) {
  validate_beta_spec(spec);
  if (beta <= 0.0 || beta >= 1.0) {
    return 0.0;
  }
  return boost::math::ibeta_derivative(static_cast<double>(spec.a),
                                       static_cast<double>(spec.b), beta);
}

double cb_cdf(const BetaDistSpec& spec, double x) {
  validate_beta_spec(spec);
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  return boost::math::ibeta(static_cast<double>(spec.a), static_cast<double>(spec.b), x);
}

namespace {

// Conditional threshold on the principal statistic given the loss factor:
// the statistic exceeds eta iff the conditioned variate exceeds this value.
// Returns the integration support and the mapping.
struct LossIntegrand {
  double lo = 0.0;
  double hi = 1.0;
  std::function<double(double)> threshold_given_beta;
};

std::optional<LossIntegrand> loss_integrand(DetectorKind kind, double eta) {
  LossIntegrand spec;
  switch (kind) {
    case DetectorKind::IcbdGlrtHe:
      spec.threshold_given_beta = [eta](double) { return eta; };
      return spec;
    case DetectorKind::IcbdWaldHe:
      spec.threshold_given_beta = [eta](double beta) { return eta * beta; };
      return spec;
    case DetectorKind::IcbdRaoHe:
      if (eta >= 1.0) {
        return std::nullopt;
      }
      spec.lo = eta;
      spec.threshold_given_beta = [eta](double beta) { return eta / (beta - eta); };
      return spec;
    case DetectorKind::IcbdPhe:
      if (eta >= 1.0) {
        return std::nullopt;
      }
      spec.threshold_given_beta = [eta](double beta) {
        return eta * (1.0 - beta) / (1.0 - eta);
      };
      return spec;
    default:
      throw ValidationError("analytic laws apply to ICBD detectors only");
  }
}

double exceedance_probability(DetectorKind kind, const DetectorDims& dims,
                              double rho, double eta) {
  validate_dims(dims);
  if (!(eta >= 0.0)) {
    throw ValidationError("threshold must be nonnegative");
  }
  if (!(rho >= 0.0)) {
    throw ValidationError("eSNR must be nonnegative");
  }
  const auto integrand = loss_integrand(kind, eta);
  if (!integrand) {
    return 0.0;
  }
  if (kind == DetectorKind::IcbdGlrtHe && rho == 0.0) {
    // Central conditional law does not depend on the loss factor.
    return cf_survival(glrt_he_law(dims, 0.0), eta);
  }
  const BetaDistSpec beta_law = loss_factor_law(dims);
  const int a = dims.p;
  const int b = dims.L - dims.N + dims.q + 1;
  return std::clamp(
      integrate(
          [&](double beta) {
            const FDistSpec f{a, b, rho * beta};
            return cf_survival(f, integrand->threshold_given_beta(beta)) *
                   cb_pdf(beta_law, beta);
          },
          integrand->lo, integrand->hi),
      0.0, 1.0);
}

}  // namespace

double pfa_theoretical(DetectorKind kind, const DetectorDims& dims, double eta) {
  return exceedance_probability(kind, dims, 0.0, eta);
}

double pd_theoretical(DetectorKind kind, const DetectorDims& dims, double rho,
                      double eta) {
  return exceedance_probability(kind, dims, rho, eta);
}

double threshold_theoretical(DetectorKind kind, const DetectorDims& dims, double pfa) {
  validate_dims(dims);
  if (!is_icbd(kind)) {
    throw ValidationError("analytic laws apply to ICBD detectors only");
  }
  if (!(pfa > 0.0 && pfa <= 1.0)) {
    throw ValidationError("threshold_theoretical: pfa must lie in (0, 1]");
  }
  if (pfa == 1.0) {
    return 0.0;
  }

  const auto objective = [&](double eta) {
    return pfa_theoretical(kind, dims, eta) - pfa;
  };

  double lo = 0.0;
  double hi;
  const bool bounded =
      kind == DetectorKind::IcbdRaoHe || kind == DetectorKind::IcbdPhe;
  if (bounded) {
    hi = 1.0 - 1e-13;
    if (objective(hi) > 0.0) {
      throw NumericalError("threshold_theoretical: target pfa below reachable range");
    }
  } else {
    hi = 1.0;
    while (objective(hi) > 0.0) {
      hi *= 2.0;
      if (hi > 1e12) {
        throw NumericalError("threshold_theoretical: failed to bracket threshold");
      }
    }
  }

  boost::math::tools::eps_tolerance<double> tol(30);
  std::uintmax_t max_iter = 200;
  const auto bracket =
      boost::math::tools::toms748_solve(objective, lo, hi, tol, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw ValidationError("ks_statistic: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_value(std::size_t n, double significance) {
  if (n == 0 || !(significance > 0.0 && significance < 1.0)) {
    throw ValidationError("ks_critical_value: invalid arguments");
  }
  return std::sqrt(-0.5 * std::log(significance / 2.0)) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace icbd
