#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamcon/grid_field.hpp"

namespace lamcon {

/// Truncated Laurent series in lambda with matrix-valued 1-form
/// coefficients; models a family of connections  d + xi^lambda,
/// xi^lambda = sum_k lambda^k xi_k.
class LambdaFamily {
  public:
    LambdaFamily() = default;
    LambdaFamily(const Domain& dom, int kmin, int kmax, int dim = 2);

    const Domain& domain() const { return dom_; }
    int dim() const { return dim_; }
    int kmin() const { return kmin_; }
    int kmax() const { return kmax_; }
    bool contains(int k) const { return k >= kmin_ && k <= kmax_; }

    const GridField& coefficient(int k) const;
    void set_coefficient(int k, GridField f);

    /// Laurent sum at lambda0 != 0 (pole error at 0 with negative powers).
    GridField evaluate(cplx lambda0) const;

    /// Drop leading/trailing coefficients with sup-norm <= tol, recording the
    /// dropped mass in the truncation budget.
    void shrink(double tol);

    /// Sum of sup-norms of coefficients discarded by truncating operations.
    double truncation_residual() const { return trunc_residual_; }
    void add_truncation_residual(double r) { trunc_residual_ += r; }

    /// Max sup-norm over retained coefficients.
    double sup_norm() const;

    std::string provenance;

  private:
    Domain dom_ = Domain::unit_torus(8, 8);
    int dim_ = 2;
    int kmin_ = 0, kmax_ = -1;
    std::vector<GridField> coef_;
    double trunc_residual_ = 0.0;
};

/// Truncated Laurent series of pointwise invertible matrix fields; models
/// lambda-families of gauge transformations g(lambda).
class GaugeFamily {
  public:
    GaugeFamily() = default;
    GaugeFamily(const Domain& dom, int kmin, int kmax, int dim = 2);

    static GaugeFamily identity(const Domain& dom, int dim = 2);

    const Domain& domain() const { return dom_; }
    int dim() const { return dim_; }
    int kmin() const { return kmin_; }
    int kmax() const { return kmax_; }
    bool contains(int k) const { return k >= kmin_ && k <= kmax_; }

    const MatrixField& coefficient(int k) const;
    void set_coefficient(int k, MatrixField f);

    MatrixField evaluate(cplx lambda0) const;

    double sup_norm() const;

  private:
    Domain dom_ = Domain::unit_torus(8, 8);
    int dim_ = 2;
    int kmin_ = 0, kmax_ = -1;
    std::vector<MatrixField> coef_;
};

// -- operations ---------------------------------------------------------------

/// Sup-norm of each lambda-power coefficient of the curvature of d + xi:
/// F_k = d xi_k + sum_{i+j=k} xi_i ^ xi_j. A family is accepted as flat when
/// the max over k is below tolerance.
std::map<int, double> flatness_residual(const LambdaFamily& fam);

/// Max over k of flatness_residual.
double max_flatness_residual(const LambdaFamily& fam);

/// Product of two gauge families, truncated to [kmin_keep, kmax_keep].
GaugeFamily gauge_compose(const GaugeFamily& a, const GaugeFamily& b, int kmin_keep,
                          int kmax_keep);

/// Inverse of a gauge family on the coefficient window [kmin_out, kmax_out].
/// Polynomial gauges (kmin = 0) with invertible constant term are inverted by
/// the formal Neumann series, which is exact on any finite window. General
/// Laurent gauges are inverted by evaluation on roots of unity, pointwise
/// matrix inversion and Fourier re-interpolation in lambda.
GaugeFamily gauge_inverse(const GaugeFamily& g, int kmin_out, int kmax_out);

/// Gauge action  xi |-> g^-1 xi g + g^-1 dg, with the result truncated to
/// [kmin_keep, kmax_keep]; dropped coefficient norms are added to the result's
/// truncation budget. A precomputed inverse may be supplied (e.g. the closed
/// form for splitting gauges); otherwise gauge_inverse is used on the window
/// needed to make every retained output coefficient exact.
LambdaFamily gauge_apply(const LambdaFamily& fam, const GaugeFamily& g, int kmin_keep,
                         int kmax_keep, const GaugeFamily* ginv_hint = nullptr);

/// Convenience overload keeping the family's own power window.
LambdaFamily gauge_apply(const LambdaFamily& fam, const GaugeFamily& g);

enum class Involution { Tau, Rho, N };

/// The induced map on the lambda-line: Tau: -1/conj(lambda), Rho:
/// 1/conj(lambda), N: -lambda.
cplx involution_on_lambda(Involution s, cplx lambda);

/// Pullback of the family under the involution, defined so that evaluation
/// satisfies (sigma* xi)^lambda = -conj(xi^{sigma(lambda)})^T for the
/// anti-holomorphic involutions, and (N* xi)^lambda = xi^{-lambda}.
LambdaFamily sigma_pullback(const LambdaFamily& fam, Involution s);

/// Substitute lambda -> lambda^2: coefficient k moves to power 2k.
LambdaFamily substitute_lambda_squared(const LambdaFamily& fam);

/// Winding number of lambda -> det g(lambda) around 0 along |lambda| = 1,
/// evaluated at one reference node and checked for constancy on sample nodes.
/// The parity invariant is this winding mod 2.
int det_winding(const GaugeFamily& g);

}  // namespace lamcon
