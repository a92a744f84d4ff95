#pragma once

#include "conefact/polyhedron.hpp"
#include "conefact/symmat.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace conefact {

struct PsdGeomConfig {
    double tol_psd = 1e-9;
    int n_samples = 10000;       // Monte Carlo validation samples
    int refine_cap = 10;         // candidate-density doublings before giving up
    int initial_candidates = 64;
    int threads = 1;
};

struct CoveringValidation {
    int samples = 0;
    double max_observed_gap = 0.0;
};

/// Finite set of unit-Frobenius PSD matrices covering the spherical cap
/// {x PSD : ||x||_F = 1} to radius epsilon, with its Monte Carlo report.
struct Covering {
    int r = 0;
    double epsilon = 0.0;
    std::vector<SymMat> points;
    CoveringValidation validation;
};

/// Homogeneous polyhedral cone {x : <svec(p), x> >= 0 for p in covering},
/// an epsilon-approximation of the PSD cone in svec coordinates.
struct ConeApprox {
    HPolyhedron polyhedron;
    double epsilon = 0.0;
    Covering source;
};

struct DistanceWitness {
    double delta = 0.0;
    std::optional<SymMat> witness; // unit-Frobenius PSD with inner(w, x) = -delta
};

class CoveringError : public std::runtime_error {
  public:
    CoveringError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_radius(achieved) {}
    double achieved_radius;
};

/// Frobenius-nearest PSD matrix: clip negative eigenvalues.
SymMat project_psd(const SymMat& c, const SymMatConfig& cfg = {});

/// Frobenius distance to the PSD cone together with the separating
/// dual-cone witness when the input is not PSD.
DistanceWitness psd_distance_witness(const SymMat& x, const SymMatConfig& cfg = {});

/// Deterministic covering of the PSD cap: low-discrepancy sphere points
/// projected onto the cone and thinned, refined until Monte Carlo
/// validation passes. Throws CoveringError past the refinement cap.
Covering build_covering(int r, double epsilon, std::uint64_t seed,
                        const PsdGeomConfig& cfg = {});

ConeApprox build_cone_approx(const Covering& cov);

/// Random symmetric matrix with iid standard normal entries.
SymMat random_gaussian_sym(int r, std::mt19937_64& rng);

/// Uniform-ish point of the cap: normalized PSD projection of a Gaussian
/// symmetric matrix.
SymMat sample_cap_point(int r, std::mt19937_64& rng);

/// Member of the approximation cone drawn by rejection from [-1,1]^D.
std::vector<double> sample_cone_member(const ConeApprox& approx, std::mt19937_64& rng);

} // namespace conefact
