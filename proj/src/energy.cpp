#include "lamcon/energy.hpp"

#include <cmath>

namespace lamcon {

namespace {

const cplx kTwoPiI(0.0, 2.0 * kPi);

/// Quadrature of a 2-form on the stride-2 subgrid (non-uniform trapezoid on a
/// patch); used as an a-posteriori error estimate for the full-grid value.
cplx integrate_coarse_trace(const GridField& w) {
    const MatrixField& m = w.dzdzbar();
    const Domain& dom = m.domain();
    auto tr_at = [&](int ix, int iy) {
        cplx t(0.0, 0.0);
        for (int r = 0; r < m.dim(); ++r) t += m.entry(m.index(ix, iy), r, r);
        return t;
    };
    if (dom.is_torus()) {
        cplx acc(0.0, 0.0);
        long cnt = 0;
        for (int iy = 0; iy < dom.ny(); iy += 2)
            for (int ix = 0; ix < dom.nx(); ix += 2) {
                acc += tr_at(ix, iy);
                ++cnt;
            }
        return acc * dom.area_form_scale() / static_cast<double>(cnt);
    }
    // patch: composite trapezoid over nodes {0, 2, 4, ..., n-1}
    auto weights = [](int n, double h) {
        std::vector<int> idx;
        for (int i = 0; i < n - 1; i += 2) idx.push_back(i);
        idx.push_back(n - 1);
        std::vector<double> w(idx.size(), 0.0);
        for (size_t s = 0; s + 1 < idx.size(); ++s) {
            const double len = h * (idx[s + 1] - idx[s]);
            w[s] += 0.5 * len;
            w[s + 1] += 0.5 * len;
        }
        return std::pair(idx, w);
    };
    auto [ix_idx, wx] = weights(dom.nx(), dom.dx());
    auto [iy_idx, wy] = weights(dom.ny(), dom.dy());
    cplx acc(0.0, 0.0);
    for (size_t sy = 0; sy < iy_idx.size(); ++sy)
        for (size_t sx = 0; sx < ix_idx.size(); ++sx)
            acc += wx[sx] * wy[sy] * tr_at(ix_idx[sx], iy_idx[sy]);
    return acc * dom.area_form_scale();
}

}  // namespace

void validate(const TangentPair& t) {
    if (t.gamma.degree() != FormDegree::One || t.beta.degree() != FormDegree::One)
        throw ShapeError("tangent pair slots must be 1-forms");
    const double sg = std::max(1.0, t.gamma.sup_norm());
    const double sb = std::max(1.0, t.beta.sup_norm());
    if (t.gamma.dz().sup_norm() > 1e-12 * sg)
        throw ShapeError("gamma slot must be a (0,1)-form");
    if (t.beta.dzbar().sup_norm() > 1e-12 * sb)
        throw ShapeError("beta slot must be a (1,0)-form");
}

TangentPair make_tangent(GridField gamma, GridField beta) {
    TangentPair t{std::move(gamma), std::move(beta)};
    validate(t);
    return t;
}

EnergyReport energy(const LambdaFamily& fam) {
    if (!fam.contains(-1)) throw InvalidLiftError("family has no k = -1 coefficient");
    const GridField& phi = fam.coefficient(-1);
    if (phi.dzbar().sup_norm() > 1e-10 * std::max(1.0, phi.sup_norm()))
        throw InvalidLiftError(
            "k = -1 coefficient has a (0,1) part; not a section lift at lambda = 0");

    const Domain& dom = fam.domain();
    GridField psi = GridField::zeros(dom, fam.dim(), FormDegree::One);
    if (fam.contains(1)) {
        // (0,1)-part only; the (1,0)-part of the k = +1 coefficient belongs to
        // the D-slot of the lift and does not enter the energy.
        psi = GridField::one_form(MatrixField(dom, fam.dim()), fam.coefficient(1).dzbar());
    }
    GridField w = wedge(phi, psi);
    const cplx full = integrate(w, Reduce::Trace);
    const cplx coarse = integrate_coarse_trace(w);

    EnergyReport rep;
    rep.energy = full / kTwoPiI;
    rep.quad_err = std::abs((full - coarse) / kTwoPiI);
    rep.trunc_err = fam.truncation_residual();
    rep.family_id = fam.provenance;
    return rep;
}

cplx energy_sigma(const LambdaFamily& fam, Involution s) {
    if (s == Involution::N) throw ConfigurationError("energy_sigma expects tau or rho");
    if (fam.kmin() < -1 || fam.kmax() > 1)
        throw ConfigurationError(
            "energy_sigma is stated for admissible-shaped families (powers in [-1, 1])");
    return energy(sigma_pullback(fam, s)).energy;
}

cplx moment_map(const GridField& phi) {
    if (phi.degree() != FormDegree::One) throw ShapeError("moment map expects a 1-form");
    return -integrate(wedge(phi, phi.adjoint()), Reduce::Trace);
}

cplx omega_c(const TangentPair& t1, const TangentPair& t2) {
    validate(t1);
    validate(t2);
    GridField w = wedge(t2.beta, t1.gamma);
    w -= wedge(t1.beta, t2.gamma);
    return cplx(0.0, 2.0) * integrate(w, Reduce::Trace);
}

cplx contract_Y(const GridField& phi, const TangentPair& t) {
    validate(t);
    return 2.0 * integrate(wedge(phi, t.gamma), Reduce::Trace);
}

cplx residue_rhs(const GridField& phi, const TangentPair& lift_tangent,
                 const TangentPair& reference_tangent, cplx mu) {
    validate(lift_tangent);
    validate(reference_tangent);
    GridField diff = lift_tangent.gamma;
    diff -= reference_tangent.gamma;
    return -integrate(wedge(phi, diff), Reduce::Trace) + mu;
}

}  // namespace lamcon
