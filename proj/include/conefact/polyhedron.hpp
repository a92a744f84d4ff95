#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace conefact {

/// One halfspace {x : <a, x> >= b}.
struct Halfspace {
    std::vector<double> a;
    double b = 0.0;
};

struct PolyConfig {
    double tol_mem = 1e-8;
    double tol_tight = 1e-8;
    double tol_rank = 1e-8;
};

/// H-representation polyhedron: intersection of finitely many halfspaces
/// <a_i, x> >= b_i. Normals are unit length after construction. Empty
/// polyhedra are legal values; dim 0 is allowed with empty normals only.
class HPolyhedron {
  public:
    HPolyhedron() : dim_(0) {}
    explicit HPolyhedron(int dim);
    HPolyhedron(int dim, std::vector<Halfspace> halfspaces);

    static HPolyhedron empty(int dim);
    /// Axis-aligned box given per-coordinate [lo, hi] bounds.
    static HPolyhedron box(const std::vector<double>& lo, const std::vector<double>& hi);

    int dim() const { return dim_; }
    const std::vector<Halfspace>& halfspaces() const { return hs_; }
    std::size_t size() const { return hs_.size(); }

    void add(Halfspace h);

    bool contains(const std::vector<double>& x, double tol_mem = 1e-8) const;
    /// Largest violation max_i (b_i - <a_i, x>), clipped at 0.
    double violation(const std::vector<double>& x) const;

  private:
    int dim_;
    std::vector<Halfspace> hs_;
};

struct Face {
    HPolyhedron parent;
    std::vector<int> tight_set;
    int dim = 0;
};

bool membership(const HPolyhedron& p, const std::vector<double>& x,
                const PolyConfig& cfg = {});

/// Projection of P onto the coordinates other than var_index
/// (Fourier-Motzkin, one variable).
HPolyhedron fourier_motzkin(const HPolyhedron& p, int var_index);

/// H-representation of T(P) for a linear map T given by rows (each of
/// length P.dim()). Decomposes T into projection-then-injection and
/// eliminates kernel coordinates one at a time, pruning after each step.
HPolyhedron linear_image(const HPolyhedron& p, const std::vector<std::vector<double>>& T);

/// Subset of halfspaces defining the same set; every removed inequality is
/// LP-certified implied by the remaining ones.
HPolyhedron remove_redundancy(const HPolyhedron& p);

Face minimal_face(const HPolyhedron& p, const std::vector<double>& x,
                  const PolyConfig& cfg = {});

bool is_empty(const HPolyhedron& p);

struct BoundingBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Per-coordinate bounds, from axis-aligned halfspaces when available and
/// LP otherwise. nullopt when P is unbounded in some coordinate.
std::optional<BoundingBox> bounding_box(const HPolyhedron& p);

} // namespace conefact
