#pragma once

#include <array>
#include <vector>

#include "lamcon/builders.hpp"
#include "lamcon/laurent.hpp"

namespace lamcon {

/// Parallel frame F solving dF = -xi^lambda0 F on a patch, F(base) = Id.
struct FrameField {
    Domain domain = Domain::unit_torus(8, 8);
    cplx lambda0{1.0, 0.0};
    MatrixField F;  // 2x2 per node
    int base_ix = 0, base_iy = 0;
    double path_mismatch = 0.0;  // row-then-column vs column-then-row transport
    double det_drift = 0.0;      // sup |det F - 1|
};

/// Integrate the parallel frame on a patch (4th-order transport along the
/// base row, then along columns). The path mismatch doubles as a flatness
/// certificate at lambda0.
FrameField integrate_frame(const LambdaFamily& fam, cplx lambda0, int base_ix = 0,
                           int base_iy = 0);

/// sup-norm of (F^l)^-1 - conj(F^{-1/conj(l)})^T, the parallel-frame reality
/// relation satisfied by self-duality families.
double frame_reality_deviation(const LambdaFamily& fam, cplx lambda0);

enum class Cycle { X, Y };

/// Full-cycle parallel transport around a torus cycle from node (0, 0).
cmat holonomy(const LambdaFamily& fam, cplx lambda0, Cycle cycle);

/// Holonomy traces (x- and y-cycle) at the sampled lambda values.
std::vector<std::array<cplx, 2>> fingerprint(const LambdaFamily& fam,
                                             const std::vector<cplx>& samples);

/// Worst deviation of the reality relation on holonomy traces:
/// tau/rho: tr Hol(lambda) = conj(tr Hol(sigma(lambda))); N: equality without
/// conjugation. Gauge-invariant witness of sigma-reality of the section.
double fingerprint_reality_deviation(const LambdaFamily& fam, Involution s,
                                     const std::vector<cplx>& samples);

// -- the V = hermitian(2) + R model of R^{4,1} --------------------------------

/// Vector of V: a 2x2 matrix part and a scalar part, with quadratic form
/// q(A, r) = -det(A) + r^2.
struct VVector {
    cmat A{cmat::Zero(2, 2)};
    cplx r{0.0, 0.0};
};

/// The isometry Psi: R^{4,1} -> V,
/// (x0..x4) |-> ([[x0+x1, x2+ix3], [x2-ix3, x0-x1]], x4).
VVector isometry_psi(const std::array<double, 5>& x);

cplx minkowski_q(const VVector& v);
cplx minkowski_form(const VVector& a, const VVector& b);

/// Coordinates of a V-vector in the R^{4,1} model (complex-linear inverse of
/// the isometry); the form becomes diag(-1, 1, 1, 1, 1).
std::array<cplx, 5> v_coords(const VVector& v);
VVector v_from_coords(const std::array<cplx, 5>& x);

/// Field of V-vectors stored as five coordinate components.
struct VField {
    Domain domain = Domain::unit_torus(8, 8);
    std::array<MatrixField, 5> comp;  // each dim 1

    std::array<cplx, 5> coords_at(long p) const {
        return {comp[0].entry(p, 0, 0), comp[1].entry(p, 0, 0), comp[2].entry(p, 0, 0),
                comp[3].entry(p, 0, 0), comp[4].entry(p, 0, 0)};
    }
};

/// Lightcone lift of the minimal surface: hatf = ((F^-1)^-1 F^+1, 1) computed
/// as (inv(Fm) Fp, 1); by the reality relation the matrix part is hermitian
/// positive and q(hatf) = 0 pointwise.
VField embed_hatf(const FrameField& fp, const FrameField& fm,
                  double* hermiticity_dev = nullptr);

/// sup over nodes of |q(hatf)|.
double lightcone_deviation(const VField& f);

/// Moving frame psi_1..psi_5 of V (x) C built from F = F^{+1}:
/// psi_1 = (conj(F)^T F, 0), psi_2/3 with E12/E21 inserted, psi_4 = (0,1),
/// psi_5 with diag(1,-1) inserted. psi_1..psi_4 span the complexified mean
/// curvature sphere bundle.
std::array<VField, 5> psi_frame(const FrameField& f);

/// The closed-form dz / dzbar connection matrices of the psi-frame at the
/// given lambda (entries built from u, u_z, u_zbar, q).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> so5_connection_matrices(double u, cplx uz,
                                                                      cplx uzb, cplx q,
                                                                      cplx lambda);

/// Differentiate the psi-frame numerically, express the derivatives in the
/// frame (least squares), and compare with the closed-form matrices at each
/// lambda sample. Returns the sup deviation.
double so5_connection_check(const SolutionData& sol, const FrameField& f,
                            const std::vector<cplx>& lambdas);

/// Check that D-hat^lambda (A, f) = (dA + xihat^(-lambda) A - A xihat^lambda, df)
/// expressed in the frame (e5, e2, -e3, e4, e1) reproduces the same connection
/// matrices; famhat must be the dual-surface family of sol. Pure pointwise
/// algebra; returns the sup deviation over lambda samples.
double dual_so5_equivalence(const SolutionData& sol, const LambdaFamily& famhat,
                            const std::vector<cplx>& lambdas);

struct WillmoreReport {
    Domain domain = Domain::unit_torus(8, 8);
    // densities w.r.t. dx dy per node
    std::vector<double> integrand_a;  // 4 |q|^2 e^{-2u}
    std::vector<double> integrand_b;  // from -2i tr(Phihat ^ Psihat)
    std::vector<double> integrand_c;  // geometric (H^2 - K + Kbar) dA
    std::vector<double> mean_curv;    // H per node
    std::vector<double> gauss_curv;   // K per node
    double dev_ab = 0.0;
    double dev_ac_interior = 0.0;
    double sup_h_interior = 0.0;
    double metric_conformal_dev = 0.0;
    double convention_factor = 0.0;  // induced-metric normalization vs e^{2u}
    double area_geometric = 0.0;
    double energy_patch = 0.0;       // patch energy contribution of the base family
    double energy_dual_patch = 0.0;  // same for the dual family
    double area_energy_residual = 0.0;      // |Area + 4 pi E| / Area
    double willmore_energy_residual = 0.0;  // |W_geo - 4 pi E_dual| / |W_geo|
    int interior_margin = 4;
};

/// Compare the algebraic, dual-family and geometric Willmore integrands of an
/// H3 strip solution; also checks minimality (H ~ 0) and the conformal shape
/// of the induced metric.
WillmoreReport willmore_compare(const SolutionData& sol, const LambdaFamily& famhat,
                                const VField& fhat);

void write_willmore_csv(const SolutionData& sol, const WillmoreReport& rep,
                        const std::string& path);

struct SphereReport {
    bool signature_ok = false;   // restricted form has signature (3,1) everywhere
    double max_e4_residual = 0.0;  // projection of (0,1) onto the complement
    double min_rank_gap = 0.0;     // smallest normalized Gram eigenvalue
    int interior_margin = 4;
};

/// Per-point span(hatf, hatf_z, hatf_zbar, hatf_zzbar): verify rank 4,
/// signature (3,1), and that the constant space-like vector (0,1) lies in the
/// congruence.
SphereReport mean_curvature_sphere(const VField& fhat);

}  // namespace lamcon
