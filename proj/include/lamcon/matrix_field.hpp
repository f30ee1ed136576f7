#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lamcon/domain.hpp"

namespace lamcon {

using cmat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

/// One component of a field: a d x d complex matrix per grid node,
/// stored contiguously (node-major, row-major entries).
class MatrixField {
  public:
    MatrixField() = default;
    MatrixField(const Domain& dom, int dim)
        : dom_(dom), dim_(dim), data_(dom.points() * dim * dim, cplx(0.0, 0.0)) {}

    static MatrixField constant(const Domain& dom, const cmat& m) {
        MatrixField f(dom, static_cast<int>(m.rows()));
        for (long p = 0; p < dom.points(); ++p) f.set(p, m);
        return f;
    }

    const Domain& domain() const { return dom_; }
    int dim() const { return dim_; }
    long points() const { return dom_.points(); }
    bool empty() const { return data_.empty(); }

    long index(int ix, int iy) const { return static_cast<long>(iy) * dom_.nx() + ix; }

    cmat at(long p) const {
        cmat m(dim_, dim_);
        const cplx* src = data_.data() + p * dim_ * dim_;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) m(r, c) = src[r * dim_ + c];
        return m;
    }
    cmat at(int ix, int iy) const { return at(index(ix, iy)); }

    void set(long p, const cmat& m) {
        cplx* dst = data_.data() + p * dim_ * dim_;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) dst[r * dim_ + c] = m(r, c);
    }
    void set(int ix, int iy, const cmat& m) { set(index(ix, iy), m); }

    cplx& entry(long p, int r, int c) { return data_[p * dim_ * dim_ + r * dim_ + c]; }
    cplx entry(long p, int r, int c) const { return data_[p * dim_ * dim_ + r * dim_ + c]; }

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    // -- pointwise algebra ---------------------------------------------------

    MatrixField& operator+=(const MatrixField& o) {
        check_same(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    MatrixField& operator-=(const MatrixField& o) {
        check_same(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    MatrixField& operator*=(cplx s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
    friend MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
    friend MatrixField operator*(cplx s, MatrixField a) { return a *= s; }

    /// Pointwise matrix product.
    friend MatrixField matmul(const MatrixField& a, const MatrixField& b) {
        a.check_same(b);
        MatrixField out(a.dom_, a.dim_);
        const int d = a.dim_;
        for (long p = 0; p < a.points(); ++p) {
            const cplx* pa = a.data_.data() + p * d * d;
            const cplx* pb = b.data_.data() + p * d * d;
            cplx* po = out.data_.data() + p * d * d;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    cplx acc(0.0, 0.0);
                    for (int k = 0; k < d; ++k) acc += pa[r * d + k] * pb[k * d + c];
                    po[r * d + c] = acc;
                }
        }
        return out;
    }

    MatrixField transposed() const {
        MatrixField out(dom_, dim_);
        for (long p = 0; p < points(); ++p)
            for (int r = 0; r < dim_; ++r)
                for (int c = 0; c < dim_; ++c) out.entry(p, r, c) = entry(p, c, r);
        return out;
    }

    MatrixField conjugated() const {
        MatrixField out(dom_, dim_);
        for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
        return out;
    }

    /// Pointwise trace, returned as a dim-1 field.
    MatrixField trace_field() const {
        MatrixField out(dom_, 1);
        for (long p = 0; p < points(); ++p) {
            cplx t(0.0, 0.0);
            for (int r = 0; r < dim_; ++r) t += entry(p, r, r);
            out.entry(p, 0, 0) = t;
        }
        return out;
    }

    /// Max over nodes of the Frobenius norm.
    double sup_norm() const {
        double m = 0.0;
        const int dd = dim_ * dim_;
        for (long p = 0; p < points(); ++p) {
            double s = 0.0;
            for (int e = 0; e < dd; ++e) s += std::norm(data_[p * dd + e]);
            m = std::max(m, s);
        }
        return std::sqrt(m);
    }

    void apply(const std::function<void(cmat&)>& f) {
        cmat m(dim_, dim_);
        for (long p = 0; p < points(); ++p) {
            m = at(p);
            f(m);
            set(p, m);
        }
    }

    void check_same(const MatrixField& o) const {
        if (dom_ != o.dom_ || dim_ != o.dim_)
            throw ShapeError("matrix field domain/dimension mismatch");
    }

  private:
    Domain dom_ = Domain::unit_torus(8, 8);
    int dim_ = 0;
    std::vector<cplx> data_;
};

}  // namespace lamcon
