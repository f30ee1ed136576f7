#pragma once

#include <complex>

#include "lamcon/errors.hpp"

namespace lamcon {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Fixed complex-analytic conventions, used everywhere in the library:
//
//   z = x + i y,    d_z = (d_x - i d_y)/2,    d_zbar = (d_x + i d_y)/2,
//   dz ^ dzbar = -2i dx ^ dy.
//
// Integration of a 2-form  w * dz^dzbar  therefore returns
// -2i * integral of w over the domain in the (x, y) measure.

enum class DomainKind { Torus, Patch };

/// Discretization domain: a flat torus C/(Z + modulus*Z) sampled on a
/// uniform periodic lattice, or a rectangular patch [x0,x1] x [y0,y1]
/// sampled on a uniform closed grid.
class Domain {
  public:
    static Domain torus(cplx modulus, int nx, int ny) {
        if (modulus.imag() <= 0.0)
            throw ConfigurationError("torus modulus must have Im > 0");
        Domain d;
        d.kind_ = DomainKind::Torus;
        d.modulus_ = modulus;
        d.nx_ = nx;
        d.ny_ = ny;
        d.validate();
        return d;
    }

    static Domain unit_torus(int nx, int ny) { return torus(cplx(0.0, 1.0), nx, ny); }

    static Domain patch(double x0, double x1, double y0, double y1, int nx, int ny) {
        if (!(x0 < x1) || !(y0 < y1))
            throw ConfigurationError("patch extents must be nonempty");
        Domain d;
        d.kind_ = DomainKind::Patch;
        d.x0_ = x0;
        d.x1_ = x1;
        d.y0_ = y0;
        d.y1_ = y1;
        d.nx_ = nx;
        d.ny_ = ny;
        d.validate();
        return d;
    }

    DomainKind kind() const { return kind_; }
    bool is_torus() const { return kind_ == DomainKind::Torus; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    long points() const { return static_cast<long>(nx_) * ny_; }
    cplx modulus() const { return modulus_; }
    double x0() const { return x0_; }
    double x1() const { return x1_; }
    double y0() const { return y0_; }
    double y1() const { return y1_; }

    /// Grid step in the first / second lattice or chart direction.
    /// On the torus these are steps of the lattice coordinates (s, t) in
    /// [0,1); on a patch they are steps of (x, y).
    double dx() const {
        return is_torus() ? 1.0 / nx_ : (x1_ - x0_) / (nx_ - 1);
    }
    double dy() const {
        return is_torus() ? 1.0 / ny_ : (y1_ - y0_) / (ny_ - 1);
    }

    /// Holomorphic coordinate of a grid node. On the torus z = s + modulus*t.
    cplx point(int ix, int iy) const {
        if (is_torus()) {
            double s = static_cast<double>(ix) / nx_;
            double t = static_cast<double>(iy) / ny_;
            return cplx(s, 0.0) + modulus_ * t;
        }
        return cplx(x0_ + ix * dx(), y0_ + iy * dy());
    }

    /// Tangent of the first grid direction expressed on (dz, dzbar):
    /// dz(e1), dzbar(e1). Torus: e1 = d/ds, so (1, 1). Patch: e1 = d/dx.
    std::pair<cplx, cplx> dir1() const {
        return {cplx(1.0, 0.0), cplx(1.0, 0.0)};
    }
    /// Second grid direction. Torus: e2 = d/dt, so (modulus, conj(modulus)).
    /// Patch: e2 = d/dy, so (i, -i).
    std::pair<cplx, cplx> dir2() const {
        if (is_torus()) return {modulus_, std::conj(modulus_)};
        return {cplx(0.0, 1.0), cplx(0.0, -1.0)};
    }

    /// Jacobian factor dz^dzbar / (dcoord1 ^ dcoord2); equals -2i Im(modulus)
    /// on the torus and -2i on a patch.
    cplx area_form_scale() const {
        if (is_torus()) return std::conj(modulus_) - modulus_;  // -2i Im(modulus)
        return cplx(0.0, -2.0);
    }

    bool operator==(const Domain& o) const {
        if (kind_ != o.kind_ || nx_ != o.nx_ || ny_ != o.ny_) return false;
        if (is_torus()) return modulus_ == o.modulus_;
        return x0_ == o.x0_ && x1_ == o.x1_ && y0_ == o.y0_ && y1_ == o.y1_;
    }
    bool operator!=(const Domain& o) const { return !(*this == o); }

  private:
    Domain() = default;

    void validate() const {
        if (nx_ < 8 || ny_ < 8)
            throw ConfigurationError("grid resolution below minimum (need nx, ny >= 8)");
        if (nx_ % 2 != 0 || ny_ % 2 != 0)
            throw ConfigurationError("grid resolution must be even");
    }

    DomainKind kind_ = DomainKind::Torus;
    cplx modulus_{0.0, 1.0};
    double x0_ = 0.0, x1_ = 1.0, y0_ = 0.0, y1_ = 1.0;
    int nx_ = 0, ny_ = 0;
};

}  // namespace lamcon
