#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "icbd/detectors.hpp"
#include "icbd/types.hpp"

namespace icbd {

/// Complex noncentral F law: the ratio X/Y of a complex noncentral
/// chi-square with `numerator_dof` complex DOFs and noncentrality `delta`
/// over an independent complex central chi-square with `denominator_dof`
/// complex DOFs. A complex chi-square with k complex DOFs is a Gamma(k)
/// variate (k complex DOFs = 2k real DOFs at half the variance).
struct FDistSpec {
  int numerator_dof = 1;    // a
  int denominator_dof = 1;  // b
  double noncentrality = 0.0;
};

/// Complex central Beta law; coincides with the real Beta(a, b) density
/// under the same ratio construction.
struct BetaDistSpec {
  int a = 1;
  int b = 1;
};

/// Problem dimensions the analytic laws depend on.
struct DetectorDims {
  int N = 0;
  int L = 0;
  int p = 0;
  int q = 0;
};

/// Conditional law of the principal HE statistic: a = p, b = L - N + q + 1.
FDistSpec glrt_he_law(const DetectorDims& dims, double noncentrality);
/// Loss-factor law: Beta(L - N + p + q + 1, N - p - q).
BetaDistSpec loss_factor_law(const DetectorDims& dims);

/// P(T > eta) under the complex noncentral F law, via a Poisson-weighted
/// series of central incomplete-beta terms truncated at 1e-12 tail mass.
double cf_survival(const FDistSpec& spec, double eta);
double cf_cdf(const FDistSpec& spec, double eta);

/// Density and CDF of the complex central Beta law.
double cb_pdf(const BetaDistSpec& spec, double beta);
double cb_cdf(const BetaDistSpec& spec, double x);

/// False-alarm probability of an ICBD statistic at threshold eta, by
/// integrating the conditional survival over the loss-factor law.
double pfa_theoretical(DetectorKind kind, const DetectorDims& dims, double eta);

/// Detection probability at eSNR rho (linear) and threshold eta.
double pd_theoretical(DetectorKind kind, const DetectorDims& dims, double rho,
                      double eta);

/// Threshold with pfa_theoretical(kind, dims, eta) = pfa, by bracketed
/// root-finding to ~1e-9 relative.
double threshold_theoretical(DetectorKind kind, const DetectorDims& dims, double pfa);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
/// Asymptotic KS critical value at the given significance level.
double ks_critical_value(std::size_t n, double significance);

}  // namespace icbd
