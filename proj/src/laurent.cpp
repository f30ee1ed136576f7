#include "lamcon/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lamcon {

namespace {

cplx lambda_power(cplx lambda, int k) {
    if (k == 0) return cplx(1.0, 0.0);
    cplx base = (k > 0) ? lambda : cplx(1.0, 0.0) / lambda;
    cplx out(1.0, 0.0);
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
}

/// Pointwise inverse; throws naming the grid node when |det| <= det_tol.
MatrixField pointwise_inverse(const MatrixField& f, double det_tol = 1e-12) {
    MatrixField out(f.domain(), f.dim());
    const int nx = f.domain().nx();
    for (long p = 0; p < f.points(); ++p) {
        cmat m = f.at(p);
        const cplx det = m.determinant();
        if (std::abs(det) <= det_tol) {
            std::ostringstream os;
            os << "gauge not invertible at grid node (" << (p % nx) << ", " << (p / nx)
               << "), |det| = " << std::abs(det);
            throw SingularGaugeError(os.str());
        }
        out.set(p, m.inverse());
    }
    return out;
}

}  // namespace

// -- LambdaFamily -------------------------------------------------------------

LambdaFamily::LambdaFamily(const Domain& dom, int kmin, int kmax, int dim)
    : dom_(dom), dim_(dim), kmin_(kmin), kmax_(kmax) {
    if (kmax_ < kmin_) throw ConfigurationError("empty lambda power range");
    coef_.reserve(kmax_ - kmin_ + 1);
    for (int k = kmin_; k <= kmax_; ++k)
        coef_.push_back(GridField::zeros(dom_, dim_, FormDegree::One));
}

const GridField& LambdaFamily::coefficient(int k) const {
    if (!contains(k)) throw ShapeError("lambda power outside the stored range");
    return coef_[k - kmin_];
}

void LambdaFamily::set_coefficient(int k, GridField f) {
    if (!contains(k)) throw ShapeError("lambda power outside the stored range");
    if (f.degree() != FormDegree::One) throw ShapeError("family coefficients are 1-forms");
    if (f.domain() != dom_ || f.dim() != dim_)
        throw ShapeError("coefficient domain/dimension mismatch");
    coef_[k - kmin_] = std::move(f);
}

GridField LambdaFamily::evaluate(cplx lambda0) const {
    if (lambda0 == cplx(0.0, 0.0)) {
        if (kmin_ < 0) throw PoleError("evaluation at lambda = 0 with negative powers");
        return contains(0) ? coefficient(0) : GridField::zeros(dom_, dim_, FormDegree::One);
    }
    GridField acc = GridField::zeros(dom_, dim_, FormDegree::One);
    for (int k = kmin_; k <= kmax_; ++k) acc += lambda_power(lambda0, k) * coefficient(k);
    return acc;
}

void LambdaFamily::shrink(double tol) {
    while (kmax_ > kmin_ ) {
        const double n = coef_.back().sup_norm();
        if (n > tol) break;
        trunc_residual_ += n;
        coef_.pop_back();
        --kmax_;
    }
    while (kmin_ < kmax_) {
        const double n = coef_.front().sup_norm();
        if (n > tol) break;
        trunc_residual_ += n;
        coef_.erase(coef_.begin());
        ++kmin_;
    }
}

double LambdaFamily::sup_norm() const {
    double m = 0.0;
    for (const auto& c : coef_) m = std::max(m, c.sup_norm());
    return m;
}

// -- GaugeFamily ----------------------------------------------------------------

GaugeFamily::GaugeFamily(const Domain& dom, int kmin, int kmax, int dim)
    : dom_(dom), dim_(dim), kmin_(kmin), kmax_(kmax) {
    if (kmax_ < kmin_) throw ConfigurationError("empty lambda power range");
    for (int k = kmin_; k <= kmax_; ++k) coef_.push_back(MatrixField(dom_, dim_));
}

GaugeFamily GaugeFamily::identity(const Domain& dom, int dim) {
    GaugeFamily g(dom, 0, 0, dim);
    g.set_coefficient(0, MatrixField::constant(dom, cmat::Identity(dim, dim)));
    return g;
}

const MatrixField& GaugeFamily::coefficient(int k) const {
    if (!contains(k)) throw ShapeError("lambda power outside the stored range");
    return coef_[k - kmin_];
}

void GaugeFamily::set_coefficient(int k, MatrixField f) {
    if (!contains(k)) throw ShapeError("lambda power outside the stored range");
    if (f.domain() != dom_ || f.dim() != dim_)
        throw ShapeError("coefficient domain/dimension mismatch");
    coef_[k - kmin_] = std::move(f);
}

MatrixField GaugeFamily::evaluate(cplx lambda0) const {
    if (lambda0 == cplx(0.0, 0.0) && kmin_ < 0)
        throw PoleError("gauge evaluation at lambda = 0 with negative powers");
    MatrixField acc(dom_, dim_);
    for (int k = kmin_; k <= kmax_; ++k) {
        MatrixField t = coefficient(k);
        t *= lambda_power(lambda0, k);
        acc += t;
    }
    return acc;
}

double GaugeFamily::sup_norm() const {
    double m = 0.0;
    for (const auto& c : coef_) m = std::max(m, c.sup_norm());
    return m;
}

// -- flatness -------------------------------------------------------------------

std::map<int, double> flatness_residual(const LambdaFamily& fam) {
    const int kmin = fam.kmin(), kmax = fam.kmax();
    const int lo = std::min(kmin, 2 * kmin), hi = std::max(kmax, 2 * kmax);
    std::map<int, double> out;
    for (int k = lo; k <= hi; ++k) {
        GridField fk = GridField::zeros(fam.domain(), fam.dim(), FormDegree::Two);
        if (fam.contains(k)) fk += exterior_derivative(fam.coefficient(k));
        for (int i = std::max(kmin, k - kmax); i <= std::min(kmax, k - kmin); ++i)
            fk += wedge(fam.coefficient(i), fam.coefficient(k - i));
        out[k] = fk.sup_norm();
    }
    return out;
}

double max_flatness_residual(const LambdaFamily& fam) {
    double m = 0.0;
    for (const auto& [k, r] : flatness_residual(fam)) m = std::max(m, r);
    return m;
}

// -- gauge algebra ----------------------------------------------------------------

GaugeFamily gauge_compose(const GaugeFamily& a, const GaugeFamily& b, int kmin_keep,
                          int kmax_keep) {
    GaugeFamily out(a.domain(), kmin_keep, kmax_keep, a.dim());
    for (int k = kmin_keep; k <= kmax_keep; ++k) {
        MatrixField acc(a.domain(), a.dim());
        for (int i = std::max(a.kmin(), k - b.kmax()); i <= std::min(a.kmax(), k - b.kmin());
             ++i)
            acc += matmul(a.coefficient(i), b.coefficient(k - i));
        out.set_coefficient(k, std::move(acc));
    }
    return out;
}

GaugeFamily gauge_inverse(const GaugeFamily& g, int kmin_out, int kmax_out) {
    // Formal Neumann series for polynomial gauges: with g = g0 (1 + n),
    // n_0 = 0, each inverse coefficient is the finite sum
    // (sum_j (-n)^j g0^-1)_k with j <= k, hence exact on the window.
    if (g.kmin() == 0) {
        MatrixField g0inv = pointwise_inverse(g.coefficient(0));
        const int hi = std::max(kmax_out, 0);
        // n = g0^-1 g - 1, supported on [1, kmax].
        std::vector<MatrixField> n;  // n[k-1] = coefficient k
        for (int k = 1; k <= g.kmax(); ++k) n.push_back(matmul(g0inv, g.coefficient(k)));
        // acc = (1+n)^-1 truncated to [0, hi]
        std::vector<MatrixField> acc(hi + 1, MatrixField(g.domain(), g.dim()));
        acc[0] = MatrixField::constant(g.domain(), cmat::Identity(g.dim(), g.dim()));
        std::vector<MatrixField> pw = acc;  // (-n)^j, j = 0
        for (int j = 1; j <= hi && !n.empty(); ++j) {
            std::vector<MatrixField> next(hi + 1, MatrixField(g.domain(), g.dim()));
            bool any = false;
            for (int k = j; k <= hi; ++k) {
                MatrixField s(g.domain(), g.dim());
                for (int i = 1; i <= std::min<int>(g.kmax(), k); ++i) {
                    if (k - i > hi) continue;
                    s += matmul(pw[k - i], cplx(-1.0, 0.0) * n[i - 1]);
                }
                if (s.sup_norm() > 0.0) any = true;
                next[k] = std::move(s);
            }
            pw = std::move(next);
            if (!any) break;
            for (int k = j; k <= hi; ++k) acc[k] += pw[k];
        }
        GaugeFamily out(g.domain(), kmin_out, kmax_out, g.dim());
        for (int k = std::max(kmin_out, 0); k <= kmax_out; ++k)
            out.set_coefficient(k, matmul(acc[k], g0inv));
        return out;
    }

    // General Laurent gauge: evaluate on roots of unity, invert pointwise,
    // recover coefficients by the discrete Fourier transform in lambda.
    const int span = kmax_out - kmin_out + 1;
    const int m = std::max(64, 4 * span + 32);
    std::vector<MatrixField> samples;
    samples.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * kPi * j / m;
        samples.push_back(pointwise_inverse(g.evaluate(cplx(std::cos(th), std::sin(th))), 1e-8));
    }
    GaugeFamily out(g.domain(), kmin_out, kmax_out, g.dim());
    for (int k = kmin_out; k <= kmax_out; ++k) {
        MatrixField acc(g.domain(), g.dim());
        for (int j = 0; j < m; ++j) {
            const double th = -2.0 * kPi * j * k / m;
            MatrixField t = samples[j];
            t *= cplx(std::cos(th), std::sin(th)) / static_cast<double>(m);
            acc += t;
        }
        out.set_coefficient(k, std::move(acc));
    }
    return out;
}

LambdaFamily gauge_apply(const LambdaFamily& fam, const GaugeFamily& g, int kmin_keep,
                         int kmax_keep, const GaugeFamily* ginv_hint) {
    const int pad = 2;  // adjacent dropped coefficients feed the truncation budget
    const int lo = kmin_keep - pad, hi = kmax_keep + pad;

    // b = xi g + dg (exact finite Laurent range)
    const int bmin = std::min(fam.kmin() + g.kmin(), g.kmin());
    const int bmax = std::max(fam.kmax() + g.kmax(), g.kmax());
    std::vector<GridField> b(bmax - bmin + 1,
                             GridField::zeros(fam.domain(), fam.dim(), FormDegree::One));
    for (int j = fam.kmin(); j <= fam.kmax(); ++j)
        for (int l = g.kmin(); l <= g.kmax(); ++l)
            b[j + l - bmin] += rmul(fam.coefficient(j), g.coefficient(l));
    for (int l = g.kmin(); l <= g.kmax(); ++l)
        b[l - bmin] += derive(GridField::zero_form(g.coefficient(l)));

    GaugeFamily ginv;
    if (ginv_hint) {
        ginv = *ginv_hint;
    } else {
        ginv = gauge_inverse(g, lo - bmax, hi - bmin);
    }

    // out_k = sum_{i+m=k} ginv_i b_m
    LambdaFamily out(fam.domain(), kmin_keep, kmax_keep, fam.dim());
    out.provenance = fam.provenance;
    out.add_truncation_residual(fam.truncation_residual());
    for (int k = lo; k <= hi; ++k) {
        GridField acc = GridField::zeros(fam.domain(), fam.dim(), FormDegree::One);
        for (int i = std::max(ginv.kmin(), k - bmax); i <= std::min(ginv.kmax(), k - bmin);
             ++i)
            acc += lmul(ginv.coefficient(i), b[k - i - bmin]);
        if (k >= kmin_keep && k <= kmax_keep)
            out.set_coefficient(k, std::move(acc));
        else
            out.add_truncation_residual(acc.sup_norm());
    }
    return out;
}

LambdaFamily gauge_apply(const LambdaFamily& fam, const GaugeFamily& g) {
    return gauge_apply(fam, g, fam.kmin(), fam.kmax());
}

// -- involutions ------------------------------------------------------------------

cplx involution_on_lambda(Involution s, cplx lambda) {
    switch (s) {
        case Involution::Tau: return -1.0 / std::conj(lambda);
        case Involution::Rho: return 1.0 / std::conj(lambda);
        default: return -lambda;
    }
}

LambdaFamily sigma_pullback(const LambdaFamily& fam, Involution s) {
    if (s == Involution::N) {
        LambdaFamily out(fam.domain(), fam.kmin(), fam.kmax(), fam.dim());
        out.provenance = fam.provenance;
        for (int k = fam.kmin(); k <= fam.kmax(); ++k) {
            GridField c = fam.coefficient(k);
            if (k % 2 != 0) c *= cplx(-1.0, 0.0);
            out.set_coefficient(k, std::move(c));
        }
        return out;
    }
    // Anti-holomorphic involutions act on connections as the conjugate dual
    // xi |-> -conj(xi)^T; expanding xi^{sigma(lambda)} in powers of lambda
    // gives, per coefficient, (sigma* xi)_k = -(+-1)^k conj(xi_{-k})^T with
    // the sign pattern only present for Tau.
    LambdaFamily out(fam.domain(), -fam.kmax(), -fam.kmin(), fam.dim());
    out.provenance = fam.provenance;
    for (int k = fam.kmin(); k <= fam.kmax(); ++k) {
        GridField c = fam.coefficient(k).adjoint();
        cplx sign(-1.0, 0.0);
        if (s == Involution::Tau && (k % 2 != 0)) sign = -sign;
        c *= sign;
        out.set_coefficient(-k, std::move(c));
    }
    return out;
}

LambdaFamily substitute_lambda_squared(const LambdaFamily& fam) {
    LambdaFamily out(fam.domain(), 2 * fam.kmin(), 2 * fam.kmax(), fam.dim());
    out.provenance = fam.provenance;
    for (int k = fam.kmin(); k <= fam.kmax(); ++k) out.set_coefficient(2 * k, fam.coefficient(k));
    return out;
}

// -- winding ------------------------------------------------------------------------

namespace {

int winding_at_node(const GaugeFamily& g, long node, int samples) {
    double total = 0.0;
    cplx prev;
    for (int j = 0; j <= samples; ++j) {
        const double th = 2.0 * kPi * j / samples;
        cmat m(g.dim(), g.dim());
        m.setZero();
        const cplx lambda(std::cos(th), std::sin(th));
        for (int k = g.kmin(); k <= g.kmax(); ++k)
            m += lambda_power(lambda, k) * g.coefficient(k).at(node);
        const cplx det = m.determinant();
        if (std::abs(det) < 1e-8)
            throw IndeterminateWindingError("|det g| below 1e-8 on the unit circle");
        if (j > 0) {
            const double inc = std::arg(det / prev);
            total += inc;
        }
        prev = det;
    }
    const double w = total / (2.0 * kPi);
    const int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.25)
        throw IndeterminateWindingError("winding number failed to converge to an integer");
    return wi;
}

}  // namespace

int det_winding(const GaugeFamily& g) {
    const int w0 = winding_at_node(g, 0, 256);
    std::mt19937_64 rng(0x5eed0123u);
    std::uniform_int_distribution<long> pick(0, g.domain().points() - 1);
    for (int t = 0; t < 8; ++t) {
        if (winding_at_node(g, pick(rng), 256) != w0)
            throw IndeterminateWindingError("det winding varies over grid nodes");
    }
    return w0;
}

}  // namespace lamcon
