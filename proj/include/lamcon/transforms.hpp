#pragma once

#include "lamcon/laurent.hpp"

namespace lamcon {

enum class SplitProvenance { KernelOfHiggs, Supplied };

/// Pointwise rank-1 projector pair encoding a line splitting E = L + Lperp.
struct LineSplitting {
    Domain domain = Domain::unit_torus(8, 8);
    MatrixField p_line;   // orthogonal projector onto L
    MatrixField p_perp;   // 1 - p_line
    SplitProvenance provenance = SplitProvenance::Supplied;
    /// sup|grad p| * min|Phi| / sup|grad Phi|; meaningful for kernel splittings.
    double smoothness_ratio = 0.0;
};

/// Orthogonal projector field onto the kernel line of a pointwise nilpotent,
/// nonvanishing (1,0)-form Phi (w.r.t. the standard hermitian metric).
LineSplitting kernel_splitting(const GridField& phi);

/// Wrap a supplied projector field (validated: p^2 = p, tr p = 1).
LineSplitting supplied_splitting(MatrixField p);

/// The splitting gauge h(lambda) = diag(lambda^-1, 1) w.r.t. L + Lperp, i.e.
/// h = p_perp + lambda^-1 p_line, and its exact inverse p_perp + lambda p_line.
/// diag(1, lambda) differs from h by a central scalar in lambda and induces
/// the identical gauge action on connections.
GaugeFamily splitting_gauge(const LineSplitting& split);
GaugeFamily splitting_gauge_inverse(const LineSplitting& split);

/// Twist: substitute lambda -> lambda^2, then gauge by h(lambda). The result
/// extends to lambda = 0 (all powers below -1 drop below 1e-10 and are
/// removed); the new k = -1 coefficient has off-diagonal block structure
/// w.r.t. the splitting.
LambdaFamily twist(const LambdaFamily& fam, const LineSplitting& split);

/// Dual surface construction: the same gauge without the substitution,
/// swapping the roles of the kernel line.
LambdaFamily dual_surface(const LambdaFamily& fam, const LineSplitting& split);

/// Scalar curvature 2-form of the induced connection on L = im(p) inside the
/// lambda^0 connection D = d + xi_0:
///   tr(p F^D p + p Dp ^ Dp p),   Dp = dp + [xi_0, p].
GridField line_block_curvature(const LambdaFamily& fam, const LineSplitting& split);

/// deg L = (i / 2 pi) * integral of the line-block curvature (torus only).
double line_degree(const LambdaFamily& fam, const LineSplitting& split);

}  // namespace lamcon
