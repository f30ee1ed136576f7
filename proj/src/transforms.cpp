#include "lamcon/transforms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lamcon {

namespace {

double grad_sup(const MatrixField& f) {
    return std::max(grid_derivative(f, 1).sup_norm(), grid_derivative(f, 2).sup_norm());
}

void check_projector(const MatrixField& p) {
    MatrixField idem = matmul(p, p);
    idem -= p;
    if (idem.sup_norm() > 1e-12)
        throw ConfigurationError("splitting projector is not idempotent to 1e-12");
    MatrixField tr = p.trace_field();
    double dev = 0.0;
    for (const cplx& v : tr.raw()) dev = std::max(dev, std::abs(v - cplx(1.0, 0.0)));
    if (dev > 1e-12) throw ConfigurationError("splitting projector must have rank 1");
}

}  // namespace

LineSplitting kernel_splitting(const GridField& phi) {
    if (phi.degree() != FormDegree::One || phi.dim() != 2)
        throw ShapeError("kernel splitting expects a 2x2 matrix 1-form");
    const Domain& dom = phi.domain();
    const MatrixField& a = phi.dz();
    if (phi.dzbar().sup_norm() > 1e-10 * std::max(1.0, a.sup_norm()))
        throw ShapeError("kernel splitting expects a (1,0)-form");

    const double scale = a.sup_norm();
    MatrixField sq = matmul(a, a);
    if (sq.sup_norm() > 1e-10 * std::max(1.0, scale * scale))
        throw ConfigurationError("Higgs field is not pointwise nilpotent");

    MatrixField p(dom, 2);
    double min_norm = std::numeric_limits<double>::infinity();
    for (long pt = 0; pt < dom.points(); ++pt) {
        const cplx a00 = a.entry(pt, 0, 0), a01 = a.entry(pt, 0, 1);
        const cplx a10 = a.entry(pt, 1, 0), a11 = a.entry(pt, 1, 1);
        const double nrm = std::sqrt(std::norm(a00) + std::norm(a01) + std::norm(a10) +
                                     std::norm(a11));
        min_norm = std::min(min_norm, nrm);
        if (nrm <= 1e-8 * std::max(1.0, scale)) {
            std::ostringstream os;
            os << "Higgs field vanishes at grid node (" << (pt % dom.nx()) << ", "
               << (pt / dom.nx()) << ") (branch point; unsupported)";
            throw ZeroLocusError(os.str());
        }
        // Kernel of a rank-1 nilpotent matrix: (a01, -a00) or (a11, -a10),
        // whichever row is better conditioned.
        cplx v0, v1;
        if (std::norm(a00) + std::norm(a01) >= std::norm(a10) + std::norm(a11)) {
            v0 = a01;
            v1 = -a00;
        } else {
            v0 = a11;
            v1 = -a10;
        }
        const double vn = std::norm(v0) + std::norm(v1);
        p.entry(pt, 0, 0) = v0 * std::conj(v0) / vn;
        p.entry(pt, 0, 1) = v0 * std::conj(v1) / vn;
        p.entry(pt, 1, 0) = v1 * std::conj(v0) / vn;
        p.entry(pt, 1, 1) = v1 * std::conj(v1) / vn;
    }

    LineSplitting split;
    split.domain = dom;
    split.p_perp = MatrixField::constant(dom, cmat::Identity(2, 2));
    split.p_perp -= p;
    split.p_line = std::move(p);
    split.provenance = SplitProvenance::KernelOfHiggs;
    const double dphi = grad_sup(a);
    const double dp = grad_sup(split.p_line);
    split.smoothness_ratio = (dphi > 1e-14) ? dp * min_norm / dphi : 0.0;
    return split;
}

LineSplitting supplied_splitting(MatrixField p) {
    check_projector(p);
    LineSplitting split;
    split.domain = p.domain();
    split.p_perp = MatrixField::constant(p.domain(), cmat::Identity(2, 2));
    split.p_perp -= p;
    split.p_line = std::move(p);
    split.provenance = SplitProvenance::Supplied;
    return split;
}

GaugeFamily splitting_gauge(const LineSplitting& split) {
    GaugeFamily h(split.domain, -1, 0, 2);
    h.set_coefficient(-1, split.p_line);
    h.set_coefficient(0, split.p_perp);
    return h;
}

GaugeFamily splitting_gauge_inverse(const LineSplitting& split) {
    GaugeFamily hinv(split.domain, 0, 1, 2);
    hinv.set_coefficient(0, split.p_perp);
    hinv.set_coefficient(1, split.p_line);
    return hinv;
}

namespace {

void check_higgs_kernel(const LambdaFamily& fam, const LineSplitting& split) {
    if (!fam.contains(-1)) throw InvalidLiftError("family has no k = -1 coefficient");
    const GridField& phi = fam.coefficient(-1);
    const double scale = std::max(1.0, phi.sup_norm());
    if (phi.dzbar().sup_norm() > 1e-10 * scale)
        throw InvalidLiftError("k = -1 coefficient is not a (1,0)-form");
    MatrixField sq = matmul(phi.dz(), phi.dz());
    if (sq.sup_norm() > 1e-10 * scale * scale)
        throw ConfigurationError("k = -1 coefficient is not pointwise nilpotent");
    MatrixField ker = matmul(phi.dz(), split.p_line);
    if (ker.sup_norm() > 1e-8 * scale)
        throw ConfigurationError("splitting is not the kernel line of the Higgs field");
}

/// Gauge by h, then enforce that all powers below -1 are numerically zero and
/// drop them ("extends to lambda = 0").
LambdaFamily gauge_and_trim(const LambdaFamily& fam, const LineSplitting& split) {
    GaugeFamily h = splitting_gauge(split);
    GaugeFamily hinv = splitting_gauge_inverse(split);
    LambdaFamily out = gauge_apply(fam, h, fam.kmin() - 1, fam.kmax() + 1, &hinv);
    for (int k = out.kmin(); k <= -2; ++k) {
        const double n = out.coefficient(k).sup_norm();
        if (n > 1e-10) {
            std::ostringstream os;
            os << "power " << k << " survives with sup-norm " << n
               << "; family is not twistable";
            throw NotTwistableError(os.str());
        }
    }
    // rebuild on [-1, kmax], trimming exact-zero top coefficients
    LambdaFamily trimmed(out.domain(), -1, out.kmax(), out.dim());
    trimmed.provenance = out.provenance;
    trimmed.add_truncation_residual(out.truncation_residual());
    for (int k = out.kmin(); k <= out.kmax(); ++k) {
        if (k < -1)
            trimmed.add_truncation_residual(out.coefficient(k).sup_norm());
        else if (k <= trimmed.kmax())
            trimmed.set_coefficient(k, out.coefficient(k));
    }
    trimmed.shrink(1e-14);
    return trimmed;
}

}  // namespace

LambdaFamily twist(const LambdaFamily& fam, const LineSplitting& split) {
    check_higgs_kernel(fam, split);
    LambdaFamily sub = substitute_lambda_squared(fam);
    LambdaFamily out = gauge_and_trim(sub, split);
    out.provenance = fam.provenance + "_twist";
    return out;
}

LambdaFamily dual_surface(const LambdaFamily& fam, const LineSplitting& split) {
    check_higgs_kernel(fam, split);
    LambdaFamily out = gauge_and_trim(fam, split);
    out.provenance = fam.provenance + "_dual";
    return out;
}

GridField line_block_curvature(const LambdaFamily& fam, const LineSplitting& split) {
    const Domain& dom = fam.domain();
    GridField xi0 = fam.contains(0) ? fam.coefficient(0)
                                    : GridField::zeros(dom, fam.dim(), FormDegree::One);

    // ambient curvature of the lambda^0 connection
    GridField curv = exterior_derivative(xi0);
    curv += wedge(xi0, xi0);

    // covariant derivative of the projector: Dp = dp + [xi_0, p]
    GridField dp = derive(GridField::zero_form(split.p_line));
    GridField comm = rmul(xi0, split.p_line);
    comm -= lmul(split.p_line, xi0);
    dp += comm;

    GridField total = lmul(split.p_line, rmul(curv, split.p_line));
    total += lmul(split.p_line, rmul(wedge(dp, dp), split.p_line));
    return GridField::two_form(total.dzdzbar().trace_field());
}

double line_degree(const LambdaFamily& fam, const LineSplitting& split) {
    if (!fam.domain().is_torus())
        throw UnsupportedDomainError("line bundle degree needs a closed (torus) domain");
    GridField f = line_block_curvature(fam, split);
    const cplx total = integrate(f, Reduce::Trace);
    return (cplx(0.0, 1.0) / (2.0 * kPi) * total).real();
}

}  // namespace lamcon
