#pragma once

#include <cstdint>

#include "lamcon/laurent.hpp"

namespace lamcon {

enum class Target { H3, S3 };

/// Frame data (u, q) of a conformal harmonic map: conformal factor u (metric
/// e^{2u} dz dzbar) and Hopf differential coefficient q (holomorphic).
struct SolutionData {
    Domain domain = Domain::unit_torus(8, 8);
    MatrixField u;  // dim 1, real valued
    MatrixField q;  // dim 1, holomorphic
    Target target = Target::S3;
};

/// Check the SolutionData invariants: u real to 1e-12, d_zbar q = 0 to 1e-10.
void validate(const SolutionData& sol);

/// Associated family of the frame data: a 3-coefficient Laurent family
///
///   xi_-1 = [[0, e^u dz], [0, 0]]
///   xi_0  = [[u_z dz/2 - u_zbar dzbar/2,  -e^-u conj(q) dzbar],
///            [e^-u q dz,                  -u_z dz/2 + u_zbar dzbar/2]]
///   xi_1  = +- conj(xi_-1)^T          (+ for H3, - for S3)
///
/// H3 families are fixed by the tau pullback, S3 families by rho.
LambdaFamily family_from_uq(const SolutionData& sol);

/// Scalar lambda^0 flatness coefficient of the constant-(u, q) family,
/// measured on a small probe grid. Root in u <=> the constant family is flat.
double constant_flatness_scalar(double u, cplx q0, Target target);

/// Solve the constant reduction for u0 (S3 only; the H3 reduction has no
/// root). Bisection on [-10, 10] followed by a Newton polish to 1e-14.
double solve_constant(cplx q0, Target target);

/// Location of the minimum of the reduced H3 potential (the starting value
/// that yields slowly varying strip solutions).
double strip_potential_minimum(cplx q0);

/// Integrate the y-independent reduction of the lambda^0 flatness equation
/// for target H3 on x in [x0, x1] with nx grid nodes (nx >= 256, even), and
/// return patch SolutionData constant in y. The right-hand side of the ODE is
/// probed from the flatness coefficient of the built family, not hard-coded.
/// Aborts with a partial-solution error if |u| exceeds 20 before x1.
SolutionData solve_gordon_strip(cplx q0, double u_init, double du_init, double x0, double x1,
                                int nx, double y0, double y1, int ny);

/// g(lambda) = exp(sum_{k=1..K} lambda^k A_k) with smooth random band-limited
/// trace-free A_k, truncated to powers [0, K]. Deterministic for fixed seed;
/// the constant term is the identity, so det-winding is 0.
GaugeFamily random_lift_perturbation(const Domain& dom, std::uint64_t seed, int K);

/// Random lambda-independent gauge with unit determinant.
GaugeFamily random_constant_sl2(const Domain& dom, std::uint64_t seed);

/// Random admissible-shaped (not necessarily flat) family: k = -1 coefficient
/// pure (1,0), k = +1 coefficient pure (0,1), k = 0 arbitrary 1-form, all
/// trace-free band-limited.
LambdaFamily random_admissible_family(const Domain& dom, std::uint64_t seed);

}  // namespace lamcon
