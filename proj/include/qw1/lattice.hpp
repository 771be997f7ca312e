#pragma once

#include <vector>

#include "qw1/classical.hpp"
#include "qw1/transport.hpp"

namespace qw1 {

// One generator of a translation-invariant interaction: an observable anchored
// at a set containing the origin. All translates are generated implicitly.
struct InteractionTerm {
    Region support;       // contains the origin after canonicalization
    HermitianOperator op; // acts on support
};

/*
 * Translation-invariant finite-range interaction on Z^d, represented by its
 * generator terms. Terms whose supports are translates of each other are
 * merged at construction, so each translate class appears once.
 */
class Interaction {
public:
    Interaction(int d, int q, std::vector<InteractionTerm> terms);

    int spatial_dim() const { return d_; }
    int q() const { return q_; }
    const std::vector<InteractionTerm>& terms() const { return terms_; }
    int range() const { return range_; } // max diameter (sup-norm) of a support
    bool commuting() const { return commuting_; }

    // h * Z at each site plus J * Z(x)Z(x+1) bonds
    static Interaction ising_1d(double coupling_j, double field_h);

private:
    int d_, q_;
    std::vector<InteractionTerm> terms_;
    int range_ = 0;
    bool commuting_ = true;
};

// Sum over all translates of generator terms fully contained in the box; open
// boundary conditions.
HermitianOperator local_hamiltonian(const Interaction& phi, const Region& box);

// Diagonal of the local Hamiltonian when every generator is diagonal in the
// canonical basis; avoids materializing the dense matrix.
bool interaction_is_diagonal(const Interaction& phi);
RVector local_hamiltonian_diagonal(const Interaction& phi, const Region& box);

// sum over anchor sets containing 0 of e^{r(|S|-1)} ||Phi(S)||_inf: each
// generator with support S contributes |S| * e^{r(|S|-1)} * ||op||_inf.
double phi_r_norm(const Interaction& phi, double r);

// Dependence of the local Hamiltonian on the origin for each box size; for
// finite-range interactions the sequence stabilizes once the box covers the
// interaction neighborhood of 0. Box sizes are site counts (boxes centered
// so they contain 0).
std::vector<double> phi_lipschitz_sequence(const Interaction& phi,
                                           const std::vector<int>& box_sites,
                                           const SolverConfig& cfg = {});

// Stabilized finite-range value of ||Phi||_L (box covering the neighborhood).
double phi_lipschitz(const Interaction& phi, const SolverConfig& cfg = {});

DensityMatrix gibbs_local(const Interaction& phi, const Region& box);

// ln Tr e^{-H_box} / |box| for each box size (site counts, d = 1 boxes).
std::vector<double> pressure_sequence(const Interaction& phi, const std::vector<int>& box_sites);

// Tr[rho H_box] / |box|: finite-volume truncation of rho(E_Phi).
double specific_energy_pairing(const DensityMatrix& rho_marginal, const Interaction& phi);

// omega(E_Phi) for the uniform state, exact closed form.
double uniform_specific_energy(const Interaction& phi);

// |union of supports of translated terms containing 0|: the neighborhood size
// N in the high-temperature transportation-cost inequality.
int interaction_neighborhood(const Interaction& phi);

/*
 * Constants of the high-temperature TCI for geometrically local commuting
 * interactions: M = inf_{t>=0} of the envelope function, kappa, and
 * c = 4 N^2 / (1 - e^{-kappa})^2 when kappa > 0.
 */
struct TciConstants {
    double M = 0.0;
    double kappa = 0.0;
    double c = 0.0;
    double t_star = 0.0;
    bool valid = false;
};

double tci_envelope(double t, double phi_r, int q);
TciConstants tci_constants(double phi_r, int N, int q, double t_max = 50.0,
                           long long grid_steps = 1000000);

// d = 1 only: marginal on Lambda_b of the periodized block state
// (1/|Lambda_a|) sum_x tau_x tensor_k tau_{2ak} rho_{Lambda_a}.
DensityMatrix periodic_approx_marginal(const DensityMatrix& rho_block, int b);

// ||rho_a - sigma_a||_W1 / |Lambda_a| for consistent marginal families on
// Lambda_a, a = 1..a_max; nondecreasing by superadditivity.
std::vector<double> w1_specific_sequence(const std::vector<DensityMatrix>& rho_family,
                                         const std::vector<DensityMatrix>& sigma_family,
                                         const SolverConfig& cfg = {});

} // namespace qw1
