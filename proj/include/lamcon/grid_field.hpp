#pragma once

#include "lamcon/matrix_field.hpp"

namespace lamcon {

enum class FormDegree { Zero, One, Two };

/// Matrix-valued differential form sampled on a Domain.
///
/// A 0-form stores one component (the value), a 1-form two components
/// (the dz and dzbar parts), a 2-form one component (the coefficient of
/// dz ^ dzbar).
class GridField {
  public:
    GridField() = default;

    static GridField zero_form(MatrixField v) {
        GridField f;
        f.degree_ = FormDegree::Zero;
        f.c0_ = std::move(v);
        return f;
    }

    static GridField one_form(MatrixField z_part, MatrixField zbar_part) {
        z_part.check_same(zbar_part);
        GridField f;
        f.degree_ = FormDegree::One;
        f.c0_ = std::move(z_part);
        f.c1_ = std::move(zbar_part);
        return f;
    }

    static GridField two_form(MatrixField w) {
        GridField f;
        f.degree_ = FormDegree::Two;
        f.c0_ = std::move(w);
        return f;
    }

    static GridField zeros(const Domain& dom, int dim, FormDegree deg) {
        switch (deg) {
            case FormDegree::Zero: return zero_form(MatrixField(dom, dim));
            case FormDegree::One: return one_form(MatrixField(dom, dim), MatrixField(dom, dim));
            default: return two_form(MatrixField(dom, dim));
        }
    }

    FormDegree degree() const { return degree_; }
    int dim() const { return c0_.dim(); }
    const Domain& domain() const { return c0_.domain(); }

    const MatrixField& value() const { require(FormDegree::Zero); return c0_; }
    MatrixField& value() { require(FormDegree::Zero); return c0_; }
    const MatrixField& dz() const { require(FormDegree::One); return c0_; }
    MatrixField& dz() { require(FormDegree::One); return c0_; }
    const MatrixField& dzbar() const { require(FormDegree::One); return c1_; }
    MatrixField& dzbar() { require(FormDegree::One); return c1_; }
    const MatrixField& dzdzbar() const { require(FormDegree::Two); return c0_; }
    MatrixField& dzdzbar() { require(FormDegree::Two); return c0_; }

    GridField& operator+=(const GridField& o) {
        check_same(o);
        c0_ += o.c0_;
        if (degree_ == FormDegree::One) c1_ += o.c1_;
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        check_same(o);
        c0_ -= o.c0_;
        if (degree_ == FormDegree::One) c1_ -= o.c1_;
        return *this;
    }
    GridField& operator*=(cplx s) {
        c0_ *= s;
        if (degree_ == FormDegree::One) c1_ *= s;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(cplx s, GridField a) { return a *= s; }

    /// Complex conjugate of the form. Conjugation swaps dz and dzbar, so a
    /// 1-form swaps components and a 2-form picks up a sign
    /// (conj(dz^dzbar) = -dz^dzbar). Matrix entries are conjugated.
    GridField conj_form() const {
        switch (degree_) {
            case FormDegree::Zero: return zero_form(c0_.conjugated());
            case FormDegree::One: return one_form(c1_.conjugated(), c0_.conjugated());
            default: {
                MatrixField w = c0_.conjugated();
                w *= cplx(-1.0, 0.0);
                return two_form(std::move(w));
            }
        }
    }

    GridField transposed() const {
        GridField f = *this;
        f.c0_ = c0_.transposed();
        if (degree_ == FormDegree::One) f.c1_ = c1_.transposed();
        return f;
    }

    /// Hermitian adjoint w.r.t. the standard metric: conjugate-transpose of
    /// the matrix together with the form conjugation (a dz becomes
    /// conj(a)^T dzbar).
    GridField adjoint() const { return conj_form().transposed(); }

    double sup_norm() const {
        double m = c0_.sup_norm();
        if (degree_ == FormDegree::One) m = std::max(m, c1_.sup_norm());
        return m;
    }

    void check_same(const GridField& o) const {
        if (degree_ != o.degree_) throw ShapeError("form degree mismatch");
        c0_.check_same(o.c0_);
    }

  private:
    void require(FormDegree d) const {
        if (degree_ != d) throw ShapeError("operation needs a different form degree");
    }

    FormDegree degree_ = FormDegree::Zero;
    MatrixField c0_;
    MatrixField c1_;
};

// -- discrete calculus -------------------------------------------------------

/// Derivative of a component along the first/second grid direction.
/// Spectral (FFT) on the torus, 4th order finite differences with one-sided
/// closures on a patch.
MatrixField grid_derivative(const MatrixField& f, int direction);

/// d of a 0-form, returned as the 1-form (d_z f) dz + (d_zbar f) dzbar.
GridField derive(const GridField& f);

/// d of a 1-form: d(a dz + b dzbar) = (d_z b - d_zbar a) dz^dzbar.
GridField exterior_derivative(const GridField& a);

/// Wedge of two matrix-valued 1-forms, (a_z b_zbar - a_zbar b_z) dz^dzbar.
GridField wedge(const GridField& a, const GridField& b);

/// Pointwise products of a 0-form matrix field with a form.
GridField lmul(const MatrixField& g, const GridField& a);
GridField rmul(const GridField& a, const MatrixField& g);

enum class Reduce { Trace, Entry };

/// Integral of a 2-form over the domain with the fixed orientation
/// dz^dzbar = -2i dx^dy. Torus: full-period quadrature (exact for
/// band-limited data); patch: trapezoidal.
cplx integrate(const GridField& w, Reduce reduce, int r = 0, int c = 0);

/// Entrywise integral of a 2-form.
cmat integrate_matrix(const GridField& w);

}  // namespace lamcon
