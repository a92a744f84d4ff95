#pragma once

#include "conefact/factorizer.hpp"
#include "conefact/psd_geometry.hpp"
#include "conefact/symmat.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace conefact {

struct PipelineConfig {
    int r = 1;
    double epsilon = 0.25;  // requested relative error, in (0,1)
    double f_r = 1.0;       // norm-equivalence constant ||X||_inf <= f_r ||X||_sp
    std::uint64_t seed = 0;
    FactorBudget budget;
    PsdGeomConfig geom;
    double tol_psd = 1e-9;
    bool use_covering_cache = true;
};

struct PsdFactorization {
    int r = 0;
    std::vector<SymMat> u_rows;
    std::vector<SymMat> v_cols;
    double achieved_error = 0.0; // ||M - UV||_inf / ||M||_inf
    double epsilon_requested = 0.0;
    double epsilon_internal = 0.0;
    // pre-projection factors in svec coordinates, kept for the projection
    // error checks
    std::vector<std::vector<double>> u_raw;
    std::vector<std::vector<double>> v_raw;
};

struct VerifyReport {
    double error_inf = 0.0;
    double relative_error = 0.0;
    double psd_violation = 0.0; // max over factors of max(0, -lambda_min)
    bool project_u_ok = true;   // ||U' - U||_inf <= eps_internal ||U'||_inf
    bool project_v_ok = true;
    bool raw_factors_present = false;
};

struct Fixture {
    std::vector<std::vector<double>> m;
    std::vector<SymMat> planted_u;
    std::vector<SymMat> planted_v;
    double spectral_ratio = 0.0; // max factor spectral norm / sqrt(r ||M||_inf)
    bool spectral_bound_met = false;
};

/// A PSD factorization was found but missed the requested error bound;
/// reported rather than silently returned.
class GuaranteeViolation : public std::runtime_error {
  public:
    GuaranteeViolation(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

/// Cone epsilon-approximation intersected with the cube
/// ||x||_inf <= f_r sqrt(r delta), in svec coordinates.
HPolyhedron build_feasible_region(int r, double epsilon_internal, double delta,
                                  double f_r = 1.0, std::uint64_t seed = 0,
                                  const PsdGeomConfig& geom = {}, bool use_cache = true);

/// The end-to-end approximate PSD factorization. Internally solves the
/// scale-normalized problem M / ||M||_inf; nullopt means the search budget
/// ran out.
std::optional<PsdFactorization> factor_psd(const std::vector<std::vector<double>>& m,
                                           const PipelineConfig& config);

VerifyReport verify_error(const std::vector<std::vector<double>>& m,
                          const PsdFactorization& f);

/// Random planted instance: Gram-matrix factors balanced by diagonal
/// congruence until both sides' max spectral norms agree within 10%.
Fixture gen_fixture(int r, int n, int m, std::uint64_t seed);

} // namespace conefact
