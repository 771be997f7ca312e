#pragma once

#include <tuple>
#include <vector>

#include "qw1/operators.hpp"

namespace qw1 {

// Probability vector over [q]^Lambda, indexed by the operator basis convention
// (first listed site most significant digit).
struct ClassicalDistribution {
    Region region;
    RVector probs;

    static ClassicalDistribution from(Region region, RVector probs);
    static ClassicalDistribution point_mass(Region region, long long index);
    static ClassicalDistribution uniform(Region region);
};

// Stationary process on Z (d = 1): iid or first-order Markov.
struct StationaryProcess {
    enum class Kind { iid, markov };
    Kind kind = Kind::iid;
    int q = 2;
    RVector single;           // iid single-site distribution
    Eigen::MatrixXd transition; // markov: row-stochastic
    RVector initial;            // markov: stationary vector, pi P = pi

    static StationaryProcess iid(RVector p);
    static StationaryProcess markov(Eigen::MatrixXd P, RVector pi);
};

/*
 * Exact optimal transport with Hamming cost, solved by network simplex on the
 * support atoms. Optimality is certified by the dual potentials (u, v): all
 * reduced costs nonnegative, value = <u, mu> + <v, nu>.
 */
struct HammingPlan {
    double value = 0.0;
    // (mu-atom basis index, nu-atom basis index, mass) for basic arcs
    std::vector<std::tuple<long long, long long, double>> coupling;
    std::vector<double> u, v;        // dual potentials on support atoms
    std::vector<long long> mu_atoms, nu_atoms; // basis indices of the atoms
};

HammingPlan hamming_w1(const ClassicalDistribution& mu, const ClassicalDistribution& nu);

// rho = sum_x mu(x) |x><x| in the canonical basis.
DensityMatrix diagonal_embed(const ClassicalDistribution& mu);

// Exact marginal on the window {-a, ..., a-1} via chain-rule products.
ClassicalDistribution marginal(const StationaryProcess& proc, int a);

// W1(mu_{Lambda_a}, nu_{Lambda_a}) / |Lambda_a| for a = 1..a_max; nondecreasing.
std::vector<double> dbar_sequence(const StationaryProcess& mu_proc,
                                  const StationaryProcess& nu_proc, int a_max);

} // namespace qw1
