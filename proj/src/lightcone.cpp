#include "lamcon/lightcone.hpp"

#include "lamcon/energy.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <limits>

namespace lamcon {

namespace {

using M2 = Eigen::Matrix2cd;

M2 e12() {
    M2 m = M2::Zero();
    m(0, 1) = 1.0;
    return m;
}
M2 e21() {
    M2 m = M2::Zero();
    m(1, 0) = 1.0;
    return m;
}
M2 hmat() {
    M2 m = M2::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

/// 4-point interpolation of the coefficient matrix at the midpoint of the
/// step [i, i+1].
cmat midpoint(const std::vector<cmat>& m, int i, bool periodic) {
    const int n = static_cast<int>(m.size());
    auto at = [&](int j) -> const cmat& { return m[((j % n) + n) % n]; };
    if (periodic)
        return (-at(i - 1) + 9.0 * at(i) + 9.0 * at(i + 1) - at(i + 2)) / 16.0;
    if (i == 0) return (5.0 * m[0] + 15.0 * m[1] - 5.0 * m[2] + m[3]) / 16.0;
    if (i >= n - 2)
        return (m[n - 4] - 5.0 * m[n - 3] + 15.0 * m[n - 2] + 5.0 * m[n - 1]) / 16.0;
    return (-m[i - 1] + 9.0 * m[i] + 9.0 * m[i + 1] - m[i + 2]) / 16.0;
}

cmat rk4_step(const cmat& f, const cmat& m0, const cmat& mh, const cmat& m1, double h) {
    cmat k1 = -(m0 * f);
    cmat k2 = -(mh * (f + 0.5 * h * k1));
    cmat k3 = -(mh * (f + 0.5 * h * k2));
    cmat k4 = -(m1 * (f + h * k3));
    return f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// March dF = -M F along the line from the start node in both directions.
void transport_line(const std::vector<cmat>& m, double h, int start, std::vector<cmat>& f) {
    const int n = static_cast<int>(m.size());
    for (int i = start; i + 1 < n; ++i)
        f[i + 1] = rk4_step(f[i], m[i], midpoint(m, i, false), m[i + 1], h);
    for (int i = start; i - 1 >= 0; --i)
        f[i - 1] = rk4_step(f[i], m[i], midpoint(m, i - 1, false), m[i - 1], -h);
}

cmat transport_cycle(const std::vector<cmat>& m, double h) {
    const int n = static_cast<int>(m.size());
    cmat f = cmat::Identity(2, 2);
    for (int i = 0; i < n; ++i)
        f = rk4_step(f, m[i], midpoint(m, i, true), m[(i + 1) % n], h);
    return f;
}

MatrixField directional(const GridField& xi, std::pair<cplx, cplx> dir) {
    MatrixField m = xi.dz();
    m *= dir.first;
    MatrixField t = xi.dzbar();
    t *= dir.second;
    m += t;
    return m;
}

std::vector<cmat> row_of(const MatrixField& m, int iy) {
    std::vector<cmat> out(m.domain().nx());
    for (int ix = 0; ix < m.domain().nx(); ++ix) out[ix] = m.at(ix, iy);
    return out;
}

std::vector<cmat> column_of(const MatrixField& m, int ix) {
    std::vector<cmat> out(m.domain().ny());
    for (int iy = 0; iy < m.domain().ny(); ++iy) out[iy] = m.at(ix, iy);
    return out;
}

cmat inv2(const cmat& m) {
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    cmat out(2, 2);
    out(0, 0) = m(1, 1) / det;
    out(0, 1) = -m(0, 1) / det;
    out(1, 0) = -m(1, 0) / det;
    out(1, 1) = m(0, 0) / det;
    return out;
}

void check_flat_for_transport(const LambdaFamily& fam) {
    const double r = max_flatness_residual(fam);
    if (r > 1e-5)
        throw FlatnessViolationError("family too far from flat for parallel transport (residual " +
                                     std::to_string(r) + ")");
}

}  // namespace

FrameField integrate_frame(const LambdaFamily& fam, cplx lambda0, int base_ix, int base_iy) {
    if (fam.domain().is_torus())
        throw UnsupportedDomainError("parallel frames are single-valued on patches only");
    check_flat_for_transport(fam);
    const Domain& dom = fam.domain();
    const int nx = dom.nx(), ny = dom.ny();

    GridField xi = fam.evaluate(lambda0);
    MatrixField m1 = directional(xi, dom.dir1());
    MatrixField m2 = directional(xi, dom.dir2());

    auto sweep = [&](bool row_first) {
        MatrixField f(dom, 2);
        if (row_first) {
            std::vector<cmat> frow(nx);
            std::vector<cmat> mrow = row_of(m1, base_iy);
            frow[base_ix] = cmat::Identity(2, 2);
            transport_line(mrow, dom.dx(), base_ix, frow);
            for (int ix = 0; ix < nx; ++ix) {
                std::vector<cmat> fcol(ny);
                fcol[base_iy] = frow[ix];
                std::vector<cmat> mcol = column_of(m2, ix);
                transport_line(mcol, dom.dy(), base_iy, fcol);
                for (int iy = 0; iy < ny; ++iy) f.set(ix, iy, fcol[iy]);
            }
        } else {
            std::vector<cmat> fcol(ny);
            std::vector<cmat> mcol = column_of(m2, base_ix);
            fcol[base_iy] = cmat::Identity(2, 2);
            transport_line(mcol, dom.dy(), base_iy, fcol);
            for (int iy = 0; iy < ny; ++iy) {
                std::vector<cmat> frow(nx);
                frow[base_ix] = fcol[iy];
                std::vector<cmat> mrow = row_of(m1, iy);
                transport_line(mrow, dom.dx(), base_ix, frow);
                for (int ix = 0; ix < nx; ++ix) f.set(ix, iy, frow[ix]);
            }
        }
        return f;
    };

    FrameField out;
    out.domain = dom;
    out.lambda0 = lambda0;
    out.base_ix = base_ix;
    out.base_iy = base_iy;
    out.F = sweep(true);
    MatrixField alt = sweep(false);
    alt -= out.F;
    out.path_mismatch = alt.sup_norm();
    double drift = 0.0;
    for (long p = 0; p < out.F.points(); ++p) {
        const cmat m = out.F.at(p);
        drift = std::max(drift,
                         std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) - cplx(1.0, 0.0)));
    }
    out.det_drift = drift;
    return out;
}

double frame_reality_deviation(const LambdaFamily& fam, cplx lambda0) {
    FrameField fa = integrate_frame(fam, lambda0);
    FrameField fb = integrate_frame(fam, -1.0 / std::conj(lambda0));
    double dev = 0.0;
    for (long p = 0; p < fa.F.points(); ++p) {
        const cmat d = inv2(fa.F.at(p)) - fb.F.at(p).conjugate().transpose();
        dev = std::max(dev, d.norm());
    }
    return dev;
}

cmat holonomy(const LambdaFamily& fam, cplx lambda0, Cycle cycle) {
    if (!fam.domain().is_torus())
        throw UnsupportedDomainError("holonomy needs a torus domain");
    check_flat_for_transport(fam);
    const Domain& dom = fam.domain();
    GridField xi = fam.evaluate(lambda0);
    if (cycle == Cycle::X) {
        MatrixField m1 = directional(xi, dom.dir1());
        return transport_cycle(row_of(m1, 0), dom.dx());
    }
    MatrixField m2 = directional(xi, dom.dir2());
    return transport_cycle(column_of(m2, 0), dom.dy());
}

std::vector<std::array<cplx, 2>> fingerprint(const LambdaFamily& fam,
                                             const std::vector<cplx>& samples) {
    std::vector<std::array<cplx, 2>> out;
    out.reserve(samples.size());
    for (cplx l : samples)
        out.push_back({holonomy(fam, l, Cycle::X).trace(), holonomy(fam, l, Cycle::Y).trace()});
    return out;
}

double fingerprint_reality_deviation(const LambdaFamily& fam, Involution s,
                                     const std::vector<cplx>& samples) {
    double dev = 0.0;
    for (cplx l : samples) {
        const cplx lm = involution_on_lambda(s, l);
        for (Cycle c : {Cycle::X, Cycle::Y}) {
            const cplx t = holonomy(fam, l, c).trace();
            cplx tm = holonomy(fam, lm, c).trace();
            if (s != Involution::N) tm = std::conj(tm);
            dev = std::max(dev, std::abs(t - tm));
        }
    }
    return dev;
}

// -- V model -------------------------------------------------------------------

VVector isometry_psi(const std::array<double, 5>& x) {
    VVector v;
    v.A(0, 0) = x[0] + x[1];
    v.A(0, 1) = cplx(x[2], x[3]);
    v.A(1, 0) = cplx(x[2], -x[3]);
    v.A(1, 1) = x[0] - x[1];
    v.r = x[4];
    return v;
}

cplx minkowski_q(const VVector& v) {
    return -(v.A(0, 0) * v.A(1, 1) - v.A(0, 1) * v.A(1, 0)) + v.r * v.r;
}

std::array<cplx, 5> v_coords(const VVector& v) {
    return {0.5 * (v.A(0, 0) + v.A(1, 1)), 0.5 * (v.A(0, 0) - v.A(1, 1)),
            0.5 * (v.A(0, 1) + v.A(1, 0)), cplx(0.0, -0.5) * (v.A(0, 1) - v.A(1, 0)), v.r};
}

VVector v_from_coords(const std::array<cplx, 5>& x) {
    VVector v;
    v.A(0, 0) = x[0] + x[1];
    v.A(0, 1) = x[2] + cplx(0.0, 1.0) * x[3];
    v.A(1, 0) = x[2] - cplx(0.0, 1.0) * x[3];
    v.A(1, 1) = x[0] - x[1];
    v.r = x[4];
    return v;
}

cplx minkowski_form(const VVector& a, const VVector& b) {
    const auto x = v_coords(a), y = v_coords(b);
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3] + x[4] * y[4];
}

VField embed_hatf(const FrameField& fp, const FrameField& fm, double* hermiticity_dev) {
    if (fp.domain != fm.domain) throw ShapeError("frames live on different domains");
    const Domain& dom = fp.domain;
    VField out;
    out.domain = dom;
    for (auto& c : out.comp) c = MatrixField(dom, 1);
    double hdev = 0.0;
    for (long p = 0; p < dom.points(); ++p) {
        const cmat a = inv2(fm.F.at(p)) * fp.F.at(p);
        hdev = std::max(hdev, (a - cmat(a.conjugate().transpose())).norm());
        VVector v;
        v.A = a;
        v.r = 1.0;
        const auto x = v_coords(v);
        for (int c = 0; c < 5; ++c) out.comp[c].entry(p, 0, 0) = x[c];
    }
    if (hermiticity_dev) *hermiticity_dev = hdev;
    return out;
}

double lightcone_deviation(const VField& f) {
    double dev = 0.0;
    for (long p = 0; p < f.domain.points(); ++p) {
        const auto x = f.coords_at(p);
        dev = std::max(dev, std::abs(-x[0] * x[0] + x[1] * x[1] + x[2] * x[2] +
                                     x[3] * x[3] + x[4] * x[4]));
    }
    return dev;
}

std::array<VField, 5> psi_frame(const FrameField& f) {
    const Domain& dom = f.domain;
    std::array<VField, 5> psi;
    for (auto& field : psi) {
        field.domain = dom;
        for (auto& c : field.comp) c = MatrixField(dom, 1);
    }
    const M2 u2 = e12(), u3 = e21(), u5 = hmat();
    for (long p = 0; p < dom.points(); ++p) {
        const cmat fr = f.F.at(p);
        const cmat fct = fr.conjugate().transpose();
        auto put = [&](int i, const cmat& a, cplx r) {
            VVector v;
            v.A = a;
            v.r = r;
            const auto x = v_coords(v);
            for (int c = 0; c < 5; ++c) psi[i].comp[c].entry(p, 0, 0) = x[c];
        };
        put(0, fct * fr, 0.0);
        put(1, fct * u2 * fr, 0.0);
        put(2, fct * u3 * fr, 0.0);
        put(3, cmat::Zero(2, 2), 1.0);
        put(4, fct * u5 * fr, 0.0);
    }
    return psi;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> so5_connection_matrices(double u, cplx uz,
                                                                      cplx uzb, cplx q,
                                                                      cplx lambda) {
    const double eu = std::exp(u), emu = std::exp(-u);
    Eigen::MatrixXcd az = Eigen::MatrixXcd::Zero(5, 5);
    Eigen::MatrixXcd azb = Eigen::MatrixXcd::Zero(5, 5);
    az(0, 2) = -eu;
    az(1, 0) = -2.0 * eu;
    az(1, 1) = uz;
    az(2, 2) = -uz;
    az(2, 4) = 2.0 * q * emu / lambda;
    az(4, 1) = -q * emu / lambda;
    azb(0, 1) = -eu;
    azb(1, 1) = -uzb;
    azb(1, 4) = 2.0 * std::conj(q) * emu * lambda;
    azb(2, 0) = -2.0 * eu;
    azb(2, 2) = uzb;
    azb(4, 2) = -std::conj(q) * emu * lambda;
    return {az, azb};
}

double so5_connection_check(const SolutionData& sol, const FrameField& f,
                            const std::vector<cplx>& lambdas) {
    if (sol.domain != f.domain) throw ShapeError("solution and frame domains differ");
    const Domain& dom = sol.domain;
    const auto psi = psi_frame(f);

    // numerical d of every frame coordinate
    MatrixField dz[5][5], dzb[5][5];
    for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 5; ++c) {
            GridField g = derive(GridField::zero_form(psi[i].comp[c]));
            dz[i][c] = g.dz();
            dzb[i][c] = g.dzbar();
        }

    GridField du = derive(GridField::zero_form(sol.u));

    double dev = 0.0;
    Eigen::MatrixXcd big(5, 5), dzm(5, 5), dzbm(5, 5);
    for (long p = 0; p < dom.points(); ++p) {
        for (int i = 0; i < 5; ++i) {
            const auto x = psi[i].coords_at(p);
            for (int c = 0; c < 5; ++c) {
                big(c, i) = x[c];
                dzm(c, i) = dz[i][c].entry(p, 0, 0);
                dzbm(c, i) = dzb[i][c].entry(p, 0, 0);
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(big, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double cond =
            svd.singularValues()(0) / std::max(svd.singularValues()(4), 1e-300);
        if (cond > 1e8)
            throw IllConditionedError("psi-frame numerically degenerate (condition " +
                                      std::to_string(cond) + ")");
        const Eigen::MatrixXcd cz = svd.solve(dzm);
        const Eigen::MatrixXcd czb = svd.solve(dzbm);

        const double uval = sol.u.entry(p, 0, 0).real();
        const cplx qval = sol.q.entry(p, 0, 0);
        const cplx uzv = du.dz().entry(p, 0, 0), uzbv = du.dzbar().entry(p, 0, 0);
        for (cplx l : lambdas) {
            const auto [az, azb] = so5_connection_matrices(uval, uzv, uzbv, qval, l);
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) {
                    const bool off = (r == 4) != (c == 4);
                    const cplx nz = off ? cz(r, c) / l : cz(r, c);
                    const cplx nzb = off ? czb(r, c) * l : czb(r, c);
                    dev = std::max(dev, std::abs(nz - az(r, c)));
                    dev = std::max(dev, std::abs(nzb - azb(r, c)));
                }
        }
    }
    return dev;
}

double dual_so5_equivalence(const SolutionData& sol, const LambdaFamily& famhat,
                            const std::vector<cplx>& lambdas) {
    if (sol.domain != famhat.domain()) throw ShapeError("solution and family domains differ");
    const Domain& dom = sol.domain;
    GridField du = derive(GridField::zero_form(sol.u));

    // frame e-tilde: matrix parts of (e5, e2, -e3, e4, e1)
    const M2 basis[5] = {hmat(), e12(), -e21(), M2::Zero(), M2::Identity()};

    double dev = 0.0;
    for (cplx l : lambdas) {
        GridField xm = famhat.evaluate(-l);
        GridField xp = famhat.evaluate(l);
        for (long p = 0; p < dom.points(); ++p) {
            const cmat xmz = xm.dz().at(p), xmzb = xm.dzbar().at(p);
            const cmat xpz = xp.dz().at(p), xpzb = xp.dzbar().at(p);
            const double uval = sol.u.entry(p, 0, 0).real();
            const cplx qval = sol.q.entry(p, 0, 0);
            const auto [az, azb] = so5_connection_matrices(
                uval, du.dz().entry(p, 0, 0), du.dzbar().entry(p, 0, 0), qval, l);
            for (int i = 0; i < 5; ++i) {
                if (i == 3) {
                    // scalar slot: parallel, so the model column must vanish
                    for (int r = 0; r < 5; ++r) {
                        dev = std::max(dev, std::abs(az(r, 3)));
                        dev = std::max(dev, std::abs(azb(r, 3)));
                    }
                    continue;
                }
                const cmat ei = basis[i];
                auto expand = [&](const cmat& m, int r_target,
                                  const Eigen::MatrixXcd& model) {
                    // m = alpha H + beta E12 + gamma (-E21) + delta Id
                    const cplx alpha = 0.5 * (m(0, 0) - m(1, 1));
                    const cplx beta = m(0, 1);
                    const cplx gamma = -m(1, 0);
                    const cplx delta = 0.5 * (m(0, 0) + m(1, 1));
                    const cplx rows[5] = {alpha, beta, gamma, cplx(0.0, 0.0), delta};
                    double d = 0.0;
                    for (int r = 0; r < 5; ++r)
                        d = std::max(d, std::abs(rows[r] - model(r, r_target)));
                    return d;
                };
                dev = std::max(dev, expand(cmat(xmz * ei - ei * xpz), i, az));
                dev = std::max(dev, expand(cmat(xmzb * ei - ei * xpzb), i, azb));
            }
        }
    }
    return dev;
}

// -- Willmore integrands ---------------------------------------------------------

WillmoreReport willmore_compare(const SolutionData& sol, const LambdaFamily& famhat,
                                const VField& fhat) {
    validate(sol);
    if (sol.target != Target::H3)
        throw ConfigurationError("Willmore comparison expects an H3 solution");
    const Domain& dom = sol.domain;
    if (fhat.domain != dom || famhat.domain() != dom)
        throw ShapeError("willmore_compare inputs live on different domains");
    const int nx = dom.nx(), ny = dom.ny();
    const long n = dom.points();

    WillmoreReport rep;
    rep.domain = dom;
    rep.integrand_a.assign(n, 0.0);
    rep.integrand_b.assign(n, 0.0);
    rep.integrand_c.assign(n, 0.0);
    rep.mean_curv.assign(n, 0.0);
    rep.gauss_curv.assign(n, 0.0);

    // (a) algebraic density w.r.t. dx dy: 4 |q|^2 e^{-2u}
    for (long p = 0; p < n; ++p) {
        const double uval = sol.u.entry(p, 0, 0).real();
        if (std::exp(2.0 * uval) < 1e-8)
            throw DegenerateSurfaceError("conformal factor below 1e-8; immersion degenerate");
        rep.integrand_a[p] = 4.0 * std::norm(sol.q.entry(p, 0, 0)) * std::exp(-2.0 * uval);
    }

    // (b) from the dual family: the 2-form -2i tr(Phihat ^ Psihat), as a
    // dx dy density (one factor -2i from the orientation convention)
    {
        const GridField& phih = famhat.coefficient(-1);
        GridField psih = GridField::one_form(MatrixField(dom, 2), famhat.coefficient(1).dzbar());
        GridField w = wedge(phih, psih);
        MatrixField tr = w.dzdzbar().trace_field();
        for (long p = 0; p < n; ++p) {
            const cplx density = cplx(0.0, -2.0) * tr.entry(p, 0, 0) * cplx(0.0, -2.0);
            rep.integrand_b[p] = density.real();
            rep.dev_ab = std::max(rep.dev_ab, std::abs(density - rep.integrand_a[p]));
        }
    }

    // (c) geometric route: reconstruct the surface in the hyperbolic ball
    // chart from the hyperboloid coordinates of hatf and run classical
    // surface geometry with the curvature -1 metric.
    std::array<MatrixField, 3> ball;
    for (auto& b : ball) b = MatrixField(dom, 1);
    for (long p = 0; p < n; ++p) {
        const auto x = fhat.coords_at(p);
        const double x0 = x[0].real(), x1 = x[1].real(), x2 = x[2].real(),
                     x3 = x[3].real();
        const double nrm = std::sqrt(std::max(x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3, 1e-300));
        const double denom = 1.0 + x0 / nrm;
        ball[0].entry(p, 0, 0) = x1 / nrm / denom;
        ball[1].entry(p, 0, 0) = x2 / nrm / denom;
        ball[2].entry(p, 0, 0) = x3 / nrm / denom;
    }
    std::array<MatrixField, 3> byx, byy, byxx, byxy, byyy;
    for (int c = 0; c < 3; ++c) {
        byx[c] = grid_derivative(ball[c], 1);
        byy[c] = grid_derivative(ball[c], 2);
        byxx[c] = grid_derivative(byx[c], 1);
        byxy[c] = grid_derivative(byx[c], 2);
        byyy[c] = grid_derivative(byy[c], 2);
    }

    const int margin = rep.interior_margin;
    auto interior = [&](int ix, int iy) {
        return ix >= margin && ix < nx - margin && iy >= margin && iy < ny - margin;
    };

    std::vector<double> sqrt_detI(n, 0.0);
    std::vector<double> ixx(n, 0.0), iyy(n, 0.0), ixy(n, 0.0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const long p = static_cast<long>(iy) * nx + ix;
            Eigen::Vector3d y, t1, t2, s11, s12, s22;
            for (int c = 0; c < 3; ++c) {
                y(c) = ball[c].entry(p, 0, 0).real();
                t1(c) = byx[c].entry(p, 0, 0).real();
                t2(c) = byy[c].entry(p, 0, 0).real();
                s11(c) = byxx[c].entry(p, 0, 0).real();
                s12(c) = byxy[c].entry(p, 0, 0).real();
                s22(c) = byyy[c].entry(p, 0, 0).real();
            }
            const double r2 = y.squaredNorm();
            const double phi = 2.0 / (1.0 - r2);
            const Eigen::Vector3d w = phi * y;  // grad log(phi) = 2 y / (1 - |y|^2)

            // hyperbolic first fundamental form
            const double g11 = phi * phi * t1.dot(t1);
            const double g22 = phi * phi * t2.dot(t2);
            const double g12 = phi * phi * t1.dot(t2);
            const double detI = g11 * g22 - g12 * g12;
            ixx[p] = g11;
            iyy[p] = g22;
            ixy[p] = g12;

            // unit normal (conformal metric: euclidean orthogonality)
            Eigen::Vector3d ne = t1.cross(t2);
            const double ne_norm = ne.norm();
            if (ne_norm < 1e-14 || detI < 1e-16) {
                sqrt_detI[p] = 0.0;
                continue;
            }
            const Eigen::Vector3d nrm = ne / (phi * ne_norm);

            // Levi-Civita correction of the conformal metric:
            // Gamma(u, v) = (w . u) v + (w . v) u - (u . v) w
            auto christoffel = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                return Eigen::Vector3d(w.dot(a) * b + w.dot(b) * a - a.dot(b) * w);
            };
            const Eigen::Vector3d c11 = s11 + christoffel(t1, t1);
            const Eigen::Vector3d c12 = s12 + christoffel(t1, t2);
            const Eigen::Vector3d c22 = s22 + christoffel(t2, t2);
            const double l11 = phi * phi * c11.dot(nrm);
            const double l12 = phi * phi * c12.dot(nrm);
            const double l22 = phi * phi * c22.dot(nrm);

            const double h = 0.5 * (l11 * g22 - 2.0 * l12 * g12 + l22 * g11) / detI;
            const double k_ext = (l11 * l22 - l12 * l12) / detI;  // K - Kbar
            sqrt_detI[p] = std::sqrt(detI);
            rep.mean_curv[p] = h;
            rep.gauss_curv[p] = -1.0 + k_ext;
            rep.integrand_c[p] = (h * h - k_ext) * sqrt_detI[p];
            if (interior(ix, iy)) {
                rep.sup_h_interior = std::max(rep.sup_h_interior, std::abs(h));
                rep.dev_ac_interior = std::max(
                    rep.dev_ac_interior, std::abs(rep.integrand_c[p] - rep.integrand_a[p]));
            }
        }

    // induced-metric normalization vs e^{2u}: calibrate once at the center
    {
        const int cx = nx / 2, cy = ny / 2;
        const long pc = static_cast<long>(cy) * nx + cx;
        rep.convention_factor = ixx[pc] / std::exp(2.0 * sol.u.entry(pc, 0, 0).real());
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                if (!interior(ix, iy)) continue;
                const long p = static_cast<long>(iy) * nx + ix;
                const double ref =
                    rep.convention_factor * std::exp(2.0 * sol.u.entry(p, 0, 0).real());
                rep.metric_conformal_dev =
                    std::max({rep.metric_conformal_dev, std::abs(ixx[p] / ref - 1.0),
                              std::abs(iyy[p] / ref - 1.0), std::abs(ixy[p] / ref)});
            }
    }

    // area and the energy relations
    {
        double area = 0.0, wgeo = 0.0;
        for (int iy = 0; iy < ny; ++iy) {
            const double wy = (iy == 0 || iy == ny - 1) ? 0.5 : 1.0;
            for (int ix = 0; ix < nx; ++ix) {
                const double wx = (ix == 0 || ix == nx - 1) ? 0.5 : 1.0;
                const long p = static_cast<long>(iy) * nx + ix;
                area += wx * wy * sqrt_detI[p];
                wgeo += wx * wy * rep.integrand_c[p];
            }
        }
        area *= dom.dx() * dom.dy();
        wgeo *= dom.dx() * dom.dy();
        rep.area_geometric = area;

        LambdaFamily fam = family_from_uq(sol);
        rep.energy_patch = energy(fam).energy.real();
        rep.energy_dual_patch = energy(famhat).energy.real();
        rep.area_energy_residual = std::abs(area + 4.0 * kPi * rep.energy_patch) / area;
        rep.willmore_energy_residual =
            std::abs(wgeo - 4.0 * kPi * rep.energy_dual_patch) / std::max(std::abs(wgeo), 1e-300);
    }
    return rep;
}

void write_willmore_csv(const SolutionData& sol, const WillmoreReport& rep,
                        const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << "x,y,u,integrand_a,integrand_b,integrand_c,H,K\n";
    os.precision(15);
    const Domain& dom = rep.domain;
    for (int iy = 0; iy < dom.ny(); ++iy)
        for (int ix = 0; ix < dom.nx(); ++ix) {
            const long p = static_cast<long>(iy) * dom.nx() + ix;
            const cplx z = dom.point(ix, iy);
            os << z.real() << ',' << z.imag() << ',' << sol.u.entry(p, 0, 0).real() << ','
               << rep.integrand_a[p] << ',' << rep.integrand_b[p] << ','
               << rep.integrand_c[p] << ',' << rep.mean_curv[p] << ',' << rep.gauss_curv[p]
               << '\n';
        }
}

SphereReport mean_curvature_sphere(const VField& fhat) {
    const Domain& dom = fhat.domain;
    const int nx = dom.nx(), ny = dom.ny();

    std::array<MatrixField, 5> fx, fy, fxx, fyy;
    for (int c = 0; c < 5; ++c) {
        fx[c] = grid_derivative(fhat.comp[c], 1);
        fy[c] = grid_derivative(fhat.comp[c], 2);
        fxx[c] = grid_derivative(fx[c], 1);
        fyy[c] = grid_derivative(fy[c], 2);
    }

    SphereReport rep;
    rep.signature_ok = true;
    rep.min_rank_gap = std::numeric_limits<double>::infinity();
    const Eigen::Matrix<double, 5, 1> eta = (Eigen::Matrix<double, 5, 1>() << -1.0, 1.0, 1.0,
                                             1.0, 1.0)
                                                .finished();
    const int margin = rep.interior_margin;
    for (int iy = margin; iy < ny - margin; ++iy)
        for (int ix = margin; ix < nx - margin; ++ix) {
            const long p = static_cast<long>(iy) * nx + ix;
            Eigen::Matrix<double, 5, 4> basis;
            for (int c = 0; c < 5; ++c) {
                basis(c, 0) = fhat.comp[c].entry(p, 0, 0).real();
                basis(c, 1) = fx[c].entry(p, 0, 0).real();
                basis(c, 2) = fy[c].entry(p, 0, 0).real();
                // hatf_zzbar = (hatf_xx + hatf_yy) / 4
                basis(c, 3) =
                    0.25 * (fxx[c].entry(p, 0, 0).real() + fyy[c].entry(p, 0, 0).real());
            }
            Eigen::Matrix4d gram;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    gram(i, j) = (basis.col(i).array() * eta.array() * basis.col(j).array()).sum();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(gram);
            const auto ev = es.eigenvalues();
            const double scale = std::max(std::abs(ev(0)), std::abs(ev(3)));
            const double gap = std::abs(ev.cwiseAbs().minCoeff()) / scale;
            rep.min_rank_gap = std::min(rep.min_rank_gap, gap);
            if (gap < 1e-9)
                throw RankError("sphere congruence rank drop (branch point?)");
            int neg = 0;
            for (int i = 0; i < 4; ++i)
                if (ev(i) < 0.0) ++neg;
            if (neg != 1) rep.signature_ok = false;

            // complement direction: solve <b_i, n> = 0
            Eigen::Matrix<double, 4, 5> sys;
            for (int i = 0; i < 4; ++i)
                sys.row(i) = (basis.col(i).array() * eta.array()).transpose();
            Eigen::JacobiSVD<Eigen::Matrix<double, 4, 5>> svd(sys, Eigen::ComputeFullV);
            const Eigen::Matrix<double, 5, 1> nvec = svd.matrixV().col(4);
            const double nq = (nvec.array() * eta.array() * nvec.array()).sum();
            const double e4_comp = std::abs(nvec(4)) / std::sqrt(std::abs(nq));
            rep.max_e4_residual = std::max(rep.max_e4_residual, e4_comp);
        }
    return rep;
}

}  // namespace lamcon
