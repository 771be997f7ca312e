#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qw1/lattice.hpp"

namespace qw1 {

// ── Deterministic random generators ──────────────────────────────────────────

// mt19937_64 with explicit bit-to-double conversion and Box-Muller normals, so
// identical seeds produce identical samples on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    uint64_t next_u64() { return eng_(); }
    double uniform();          // [0, 1)
    double normal();           // standard normal
    Complex normal_complex();  // standard complex normal
    RVector dirichlet(int n);  // flat Dirichlet

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class Ensemble { haar_pure, hs_mixed, diag_dirichlet, gue_hamiltonian };

struct RandomSpec {
    uint64_t seed = 0;
    Ensemble ensemble = Ensemble::hs_mixed;
    Region region;
};

// gue_hamiltonian: Gaussian Hermitian rescaled to operator norm 1.
HermitianOperator sample_operator(const RandomSpec& spec);
// haar_pure / hs_mixed / diag_dirichlet.
DensityMatrix sample_state(const RandomSpec& spec);

// Explicit product of full-rank single-site factors (constructed, never
// inferred from a joint state).
struct ProductState {
    Region region;
    std::vector<HermitianOperator> factors; // canonical site order

    static ProductState from_factors(const Region& region,
                                     std::vector<HermitianOperator> factors);
    DensityMatrix joint() const;
    HermitianOperator log_joint() const; // sum of embedded single-site logs
};

ProductState sample_product_state(uint64_t seed, const Region& region);

// ── Check results ────────────────────────────────────────────────────────────

struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // rhs - lhs
    double tolerance_used = 0.0;
    uint64_t inputs_digest = 0;
    bool pass = false;
    std::map<std::string, double> details;
};

// default tolerance: max(1e-9, 3 * tol_gap * scale)
double default_tolerance(double tol_gap, double scale);

// FNV-1a over raw double bytes; used for inputs_digest.
uint64_t fnv1a(const void* data, size_t bytes);
uint64_t digest_matrix(const CMatrix& m, uint64_t seed_hash = 1469598103934665603ULL);

// ── Inequality checkers ──────────────────────────────────────────────────────
// Each returns slack = rhs - lhs and pass = (slack >= -tolerance). Certificate
// bounds enter each side in the direction that makes numerical error produce
// false failures only.

CheckResult check_entropy_continuity(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const TransportCertificate& cert, double tolerance);

CheckResult check_entropy_continuity_old(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const TransportCertificate& cert, double tolerance);

CheckResult check_gaussian_concentration(const HermitianOperator& h, const ProductState& omega,
                                         const SolverConfig& cfg, double tolerance);

CheckResult check_poincare(const HermitianOperator& h, const ProductState& omega,
                           const SolverConfig& cfg, double tolerance);

CheckResult check_marton(const DensityMatrix& rho, const DensityMatrix& sigma_product,
                         const TransportCertificate& cert, double tolerance);

// rho on k copies of sigma's region (joined as disjoint translated copies).
CheckResult check_marton_k(const DensityMatrix& rho_k, const DensityMatrix& sigma, int k,
                           const TransportCertificate& cert, double tolerance);

CheckResult check_w1_sandwich(const TransportCertificate& cert, const HermitianOperator& delta,
                              double tolerance);

CheckResult check_local_bound(const TransportCertificate& cert, const HermitianOperator& delta,
                              const Region& sub_region, double tolerance);

CheckResult check_superadditivity(const TransportCertificate& joint,
                                  const TransportCertificate& part_a,
                                  const TransportCertificate& part_b, bool product_inputs,
                                  double tolerance);

CheckResult check_triangle(const TransportCertificate& rho_tau,
                           const TransportCertificate& rho_sigma,
                           const TransportCertificate& sigma_tau, double tolerance);

CheckResult check_pressure_bound(const Interaction& phi, const Region& box,
                                 const SolverConfig& cfg, double tolerance);

CheckResult check_specific_entropy_continuity(const std::vector<DensityMatrix>& rho_family,
                                              const std::vector<DensityMatrix>& sigma_family,
                                              const std::vector<TransportCertificate>& certs,
                                              double tolerance);

} // namespace qw1
