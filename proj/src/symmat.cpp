#include "conefact/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace conefact {

SymMat::SymMat(int r) : r_(r) {
    if (r < 1)
        throw std::invalid_argument("SymMat: side must be >= 1");
    e_.assign(static_cast<std::size_t>(packed_size()), 0.0);
}

SymMat::SymMat(int r, std::vector<double> packed) : r_(r), e_(std::move(packed)) {
    if (r < 1)
        throw std::invalid_argument("SymMat: side must be >= 1");
    if (e_.size() != static_cast<std::size_t>(packed_size()))
        throw std::invalid_argument("SymMat: packed size mismatch");
}

SymMat SymMat::identity(int r) {
    SymMat m(r);
    for (int i = 0; i < r; ++i)
        m.set(i, i, 1.0);
    return m;
}

SymMat SymMat::from_dense(int r, const std::vector<double>& rowmajor) {
    if (rowmajor.size() != static_cast<std::size_t>(r) * r)
        throw std::invalid_argument("SymMat::from_dense: size mismatch");
    SymMat m(r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            double a = rowmajor[i * r + j];
            double b = rowmajor[j * r + i];
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
                throw std::invalid_argument("SymMat::from_dense: input not symmetric");
            m.set(i, j, 0.5 * (a + b));
        }
    return m;
}

int SymMat::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= r_ || j >= r_)
        throw std::out_of_range("SymMat: index out of range");
    if (i == j)
        return i;
    if (i > j)
        std::swap(i, j);
    return r_ + i * (r_ - 1) - i * (i - 1) / 2 + (j - i - 1);
}

std::vector<double> SymMat::dense_rowmajor() const {
    std::vector<double> out(static_cast<std::size_t>(r_) * r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j)
            out[i * r_ + j] = (*this)(i, j);
    return out;
}

SymMat SymMat::operator+(const SymMat& o) const {
    if (o.r_ != r_)
        throw std::invalid_argument("SymMat: dimension mismatch");
    SymMat out(r_);
    for (std::size_t k = 0; k < e_.size(); ++k)
        out.e_[k] = e_[k] + o.e_[k];
    return out;
}

SymMat SymMat::operator-(const SymMat& o) const {
    if (o.r_ != r_)
        throw std::invalid_argument("SymMat: dimension mismatch");
    SymMat out(r_);
    for (std::size_t k = 0; k < e_.size(); ++k)
        out.e_[k] = e_[k] - o.e_[k];
    return out;
}

SymMat SymMat::operator*(double s) const {
    SymMat out(r_);
    for (std::size_t k = 0; k < e_.size(); ++k)
        out.e_[k] = e_[k] * s;
    return out;
}

double inner(const SymMat& a, const SymMat& b) {
    if (a.side() != b.side())
        throw std::invalid_argument("inner: dimension mismatch");
    int r = a.side();
    double s = 0.0;
    for (int i = 0; i < r; ++i)
        s += a(i, i) * b(i, i);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            s += 2.0 * a(i, j) * b(i, j);
    return s;
}

std::vector<double> svec(const SymMat& a) {
    const double rt2 = std::sqrt(2.0);
    int r = a.side();
    std::vector<double> v(static_cast<std::size_t>(a.packed_size()));
    int k = 0;
    for (int i = 0; i < r; ++i)
        v[k++] = a(i, i);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            v[k++] = rt2 * a(i, j);
    return v;
}

int side_from_packed_size(std::size_t d) {
    // d = r(r+1)/2
    int r = static_cast<int>((std::sqrt(8.0 * static_cast<double>(d) + 1.0) - 1.0) / 2.0 + 0.5);
    if (static_cast<std::size_t>(r) * (r + 1) / 2 != d)
        throw std::invalid_argument("smat: length is not triangular");
    return r;
}

SymMat smat(const std::vector<double>& v) {
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    int r = side_from_packed_size(v.size());
    SymMat m(r);
    int k = 0;
    for (int i = 0; i < r; ++i)
        m.set(i, i, v[k++]);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            m.set(i, j, inv_rt2 * v[k++]);
    return m;
}

namespace {

double offdiag_sq(const std::vector<std::vector<double>>& a, int r) {
    double s = 0.0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            s += a[i][j] * a[i][j];
    return s;
}

} // namespace

SpectralDecomposition eig(const SymMat& m, const SymMatConfig& cfg) {
    const int r = m.side();
    std::vector<std::vector<double>> a(r, std::vector<double>(r));
    std::vector<std::vector<double>> q(r, std::vector<double>(r, 0.0));
    for (int i = 0; i < r; ++i) {
        q[i][i] = 1.0;
        for (int j = 0; j < r; ++j)
            a[i][j] = m(i, j);
    }

    double fnorm_sq = 0.0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            fnorm_sq += a[i][j] * a[i][j];
    const double stop = std::max(fnorm_sq, 1e-300) * 1e-30;

    int sweep = 0;
    while (offdiag_sq(a, r) > stop) {
        if (++sweep > cfg.max_sweeps)
            throw std::runtime_error("eig: Jacobi iteration cap exceeded");
        for (int p = 0; p < r; ++p) {
            for (int qi = p + 1; qi < r; ++qi) {
                double apq = a[p][qi];
                if (apq == 0.0)
                    continue;
                double theta = (a[qi][qi] - a[p][p]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (int k = 0; k < r; ++k) {
                    double akp = a[k][p], akq = a[k][qi];
                    a[k][p] = c * akp - s * akq;
                    a[k][qi] = s * akp + c * akq;
                }
                for (int k = 0; k < r; ++k) {
                    double apk = a[p][k], aqk = a[qi][k];
                    a[p][k] = c * apk - s * aqk;
                    a[qi][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < r; ++k) {
                    double qkp = q[k][p], qkq = q[k][qi];
                    q[k][p] = c * qkp - s * qkq;
                    q[k][qi] = s * qkp + c * qkq;
                }
            }
        }
    }

    std::vector<int> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });

    SpectralDecomposition d;
    d.eigenvalues.resize(r);
    d.vectors.assign(r, std::vector<double>(r));
    for (int k = 0; k < r; ++k) {
        d.eigenvalues[k] = a[order[k]][order[k]];
        for (int i = 0; i < r; ++i)
            d.vectors[k][i] = q[i][order[k]];
    }

    SymMat rec = reconstruct(d);
    SymMat diff = rec - m;
    d.residual = std::sqrt(inner(diff, diff));
    if (d.residual > cfg.tol_eig * std::max(1.0, std::sqrt(fnorm_sq)))
        throw std::runtime_error("eig: reconstruction residual above tolerance");
    return d;
}

SymMat reconstruct(const SpectralDecomposition& d) {
    int r = static_cast<int>(d.eigenvalues.size());
    SymMat out(r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            double s = 0.0;
            for (int k = 0; k < r; ++k)
                s += d.eigenvalues[k] * d.vectors[k][i] * d.vectors[k][j];
            out.set(i, j, s);
        }
    return out;
}

MatNorms norms(const SymMat& a, const SymMatConfig& cfg) {
    MatNorms n{};
    int r = a.side();
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j)
            n.inf = std::max(n.inf, std::abs(a(i, j)));
    n.frob = std::sqrt(inner(a, a));
    auto d = eig(a, cfg);
    n.spectral = 0.0;
    for (double lam : d.eigenvalues)
        n.spectral = std::max(n.spectral, std::abs(lam));
    return n;
}

} // namespace conefact
