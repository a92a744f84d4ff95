#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace conefact {

/// Dense r x r real symmetric matrix with single storage per unordered
/// index pair. Entries are kept in svec order: the r diagonal entries
/// first, then the upper off-diagonal entries row by row (unscaled).
class SymMat {
  public:
    explicit SymMat(int r);
    SymMat(int r, std::vector<double> packed);

    static SymMat identity(int r);
    static SymMat zero(int r) { return SymMat(r); }
    static SymMat from_dense(int r, const std::vector<double>& rowmajor);

    int side() const { return r_; }
    int packed_size() const { return r_ * (r_ + 1) / 2; }

    double operator()(int i, int j) const { return e_[index(i, j)]; }
    void set(int i, int j, double v) { e_[index(i, j)] = v; }

    const std::vector<double>& packed() const { return e_; }
    std::vector<double> dense_rowmajor() const;

    SymMat operator+(const SymMat& o) const;
    SymMat operator-(const SymMat& o) const;
    SymMat operator*(double s) const;

  private:
    int index(int i, int j) const;

    int r_;
    std::vector<double> e_;
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;          // descending
    std::vector<std::vector<double>> vectors; // vectors[k] is the k-th eigenvector
    double residual = 0.0;                    // ||U diag(lambda) U^T - C||_F achieved
};

struct MatNorms {
    double inf;
    double frob;
    double spectral;
};

struct SymMatConfig {
    double tol_eig = 1e-10;
    double tol_orth = 1e-10;
    int max_sweeps = 64;
};

/// Frobenius pairing sum_ij a_ij b_ij over the full matrix.
double inner(const SymMat& a, const SymMat& b);

MatNorms norms(const SymMat& a, const SymMatConfig& cfg = {});

/// Cyclic Jacobi eigendecomposition; eigenvalues sorted descending.
SpectralDecomposition eig(const SymMat& a, const SymMatConfig& cfg = {});

/// Isometric vectorization into R^D, D = r(r+1)/2: diagonal entries
/// first, then off-diagonals scaled by sqrt(2) so that
/// dot(svec a, svec b) = inner(a, b).
std::vector<double> svec(const SymMat& a);
SymMat smat(const std::vector<double>& v);

/// D = r(r+1)/2 for the unique r, or throws if v.size() is not triangular.
int side_from_packed_size(std::size_t d);

SymMat reconstruct(const SpectralDecomposition& d);

} // namespace conefact
