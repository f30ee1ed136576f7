#include "lamcon/grid_field.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace lamcon {

namespace {

// Cached 1d FFT plans (forward + backward) per length, executed on an
// internal buffer. Sized for the modest line lengths used here.
class FftLine {
  public:
    explicit FftLine(int n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftLine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftLine(const FftLine&) = delete;
    FftLine& operator=(const FftLine&) = delete;

    /// In-place spectral derivative of a periodic line: multiply mode m by
    /// 2*pi*i*m (signed frequency, Nyquist mode zeroed).
    void spectral_derivative(cplx* line) {
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = line[i].real();
            buf_[i][1] = line[i].imag();
        }
        fftw_execute(fwd_);
        for (int m = 0; m < n_; ++m) {
            int ms = (m <= n_ / 2) ? m : m - n_;
            if (2 * m == n_) ms = 0;  // Nyquist
            const double w = 2.0 * kPi * ms / n_;  // includes 1/n normalization
            const double re = buf_[m][0], im = buf_[m][1];
            buf_[m][0] = -w * im;
            buf_[m][1] = w * re;
        }
        fftw_execute(bwd_);
        for (int i = 0; i < n_; ++i) line[i] = cplx(buf_[i][0], buf_[i][1]);
    }

  private:
    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

FftLine& fft_line(int n) {
    static std::map<int, std::unique_ptr<FftLine>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftLine>(n)).first;
    return *it->second;
}

// 4th order centered differences on a closed line. The closure rows use
// 7-point one-sided stencils of order 6: repeated differentiation feeds on
// the smoothness of the truncation-error field, and lower-order closures
// would leave an O(h^4) kink at the stencil transition that the second pass
// differentiates into an O(h^3) edge artifact.
void fd4_line(const cplx* f, cplx* out, int n, double h) {
    static const double w0[7] = {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4,
                                 6.0 / 5,    -1.0 / 6};
    static const double w1[7] = {-1.0 / 6, -77.0 / 60, 5.0 / 2,  -5.0 / 3,
                                 5.0 / 6,  -1.0 / 4,   1.0 / 30};
    static const double w2[7] = {1.0 / 30, -2.0 / 5, -7.0 / 12, 4.0 / 3,
                                 -1.0 / 2, 2.0 / 15, -1.0 / 60};
    const double* closure[3] = {w0, w1, w2};
    const double inv = 1.0 / h;
    for (int r = 0; r < 3; ++r) {
        cplx lo(0.0, 0.0), hi(0.0, 0.0);
        for (int j = 0; j < 7; ++j) {
            lo += closure[r][j] * f[j];
            hi -= closure[r][j] * f[n - 1 - j];
        }
        out[r] = inv * lo;
        out[n - 1 - r] = inv * hi;
    }
    const double s = inv / 12.0;
    for (int i = 3; i < n - 3; ++i)
        out[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
}

}  // namespace

MatrixField grid_derivative(const MatrixField& f, int direction) {
    const Domain& dom = f.domain();
    const int nx = dom.nx(), ny = dom.ny(), d = f.dim();
    const int dd = d * d;
    MatrixField out(dom, d);
    const int n = (direction == 1) ? nx : ny;
    std::vector<cplx> line(n), dline(n);

    const int nlines = (direction == 1) ? ny : nx;
    for (int l = 0; l < nlines; ++l) {
        for (int e = 0; e < dd; ++e) {
            for (int i = 0; i < n; ++i) {
                const long p = (direction == 1) ? (static_cast<long>(l) * nx + i)
                                                : (static_cast<long>(i) * nx + l);
                line[i] = f.raw()[p * dd + e];
            }
            if (dom.is_torus()) {
                // Lattice coordinate runs over [0,1); the FFT derivative
                // already contains the 2*pi scale for that period.
                for (int i = 0; i < n; ++i) dline[i] = line[i];
                fft_line(n).spectral_derivative(dline.data());
            } else {
                const double h = (direction == 1) ? dom.dx() : dom.dy();
                fd4_line(line.data(), dline.data(), n, h);
            }
            for (int i = 0; i < n; ++i) {
                const long p = (direction == 1) ? (static_cast<long>(l) * nx + i)
                                                : (static_cast<long>(i) * nx + l);
                out.raw()[p * dd + e] = dline[i];
            }
        }
    }
    return out;
}

GridField derive(const GridField& f) {
    if (f.degree() != FormDegree::Zero) throw ShapeError("derive expects a 0-form");
    const Domain& dom = f.domain();
    MatrixField d1 = grid_derivative(f.value(), 1);
    MatrixField d2 = grid_derivative(f.value(), 2);

    // Solve  d1 = dz(e1) d_z + dzbar(e1) d_zbar,  d2 likewise, for the
    // (d_z, d_zbar) components.
    const auto [a1, b1] = dom.dir1();
    const auto [a2, b2] = dom.dir2();
    const cplx det = a1 * b2 - a2 * b1;
    MatrixField fz = (b2 / det) * d1 + (-b1 / det) * d2;
    MatrixField fzbar = (-a2 / det) * d1 + (a1 / det) * d2;
    return GridField::one_form(std::move(fz), std::move(fzbar));
}

GridField exterior_derivative(const GridField& a) {
    if (a.degree() != FormDegree::One)
        throw ShapeError("exterior_derivative expects a 1-form");
    GridField daz = derive(GridField::zero_form(a.dz()));
    GridField dazb = derive(GridField::zero_form(a.dzbar()));
    MatrixField w = dazb.dz();
    w -= daz.dzbar();
    return GridField::two_form(std::move(w));
}

GridField wedge(const GridField& a, const GridField& b) {
    if (a.degree() != FormDegree::One || b.degree() != FormDegree::One)
        throw ShapeError("wedge expects two 1-forms");
    a.dz().check_same(b.dz());
    MatrixField w = matmul(a.dz(), b.dzbar());
    w -= matmul(a.dzbar(), b.dz());
    return GridField::two_form(std::move(w));
}

GridField lmul(const MatrixField& g, const GridField& a) {
    switch (a.degree()) {
        case FormDegree::Zero: return GridField::zero_form(matmul(g, a.value()));
        case FormDegree::One:
            return GridField::one_form(matmul(g, a.dz()), matmul(g, a.dzbar()));
        default: return GridField::two_form(matmul(g, a.dzdzbar()));
    }
}

GridField rmul(const GridField& a, const MatrixField& g) {
    switch (a.degree()) {
        case FormDegree::Zero: return GridField::zero_form(matmul(a.value(), g));
        case FormDegree::One:
            return GridField::one_form(matmul(a.dz(), g), matmul(a.dzbar(), g));
        default: return GridField::two_form(matmul(a.dzdzbar(), g));
    }
}

cmat integrate_matrix(const GridField& w) {
    if (w.degree() != FormDegree::Two) throw ShapeError("integrate expects a 2-form");
    const MatrixField& m = w.dzdzbar();
    const Domain& dom = m.domain();
    const int d = m.dim();
    cmat acc = cmat::Zero(d, d);
    if (dom.is_torus()) {
        for (long p = 0; p < m.points(); ++p) acc += m.at(p);
        acc *= dom.area_form_scale() / static_cast<double>(m.points());
    } else {
        const int nx = dom.nx(), ny = dom.ny();
        for (int iy = 0; iy < ny; ++iy) {
            const double wy = (iy == 0 || iy == ny - 1) ? 0.5 : 1.0;
            for (int ix = 0; ix < nx; ++ix) {
                const double wx = (ix == 0 || ix == nx - 1) ? 0.5 : 1.0;
                acc += (wx * wy) * m.at(ix, iy);
            }
        }
        acc *= dom.area_form_scale() * dom.dx() * dom.dy();
    }
    return acc;
}

cplx integrate(const GridField& w, Reduce reduce, int r, int c) {
    cmat m = integrate_matrix(w);
    if (reduce == Reduce::Trace) return m.trace();
    return m(r, c);
}

}  // namespace lamcon
