#include "qw1/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>

#include "qw1/errors.hpp"
#include "qw1/operator_core.hpp"

namespace qw1 {

ClassicalDistribution ClassicalDistribution::from(Region region, RVector probs) {
    if (probs.size() != region.dim()) {
        throw RegionMismatch("ClassicalDistribution: length does not match q^|sites|");
    }
    if (probs.minCoeff() < -1e-14) {
        throw InvariantViolation("ClassicalDistribution: negative entry");
    }
    if (std::abs(probs.sum() - 1.0) > 1e-12) {
        throw InvariantViolation("ClassicalDistribution: sum " + std::to_string(probs.sum()));
    }
    ClassicalDistribution out;
    out.region = std::move(region);
    out.probs = probs.cwiseMax(0.0);
    return out;
}

ClassicalDistribution ClassicalDistribution::point_mass(Region region, long long index) {
    RVector p = RVector::Zero(region.dim());
    p[index] = 1.0;
    return from(std::move(region), std::move(p));
}

ClassicalDistribution ClassicalDistribution::uniform(Region region) {
    RVector p = RVector::Constant(region.dim(), 1.0 / static_cast<double>(region.dim()));
    return from(std::move(region), std::move(p));
}

StationaryProcess StationaryProcess::iid(RVector p) {
    if (p.minCoeff() < -1e-14 || std::abs(p.sum() - 1.0) > 1e-12) {
        throw InvariantViolation("StationaryProcess::iid: not a probability vector");
    }
    StationaryProcess out;
    out.kind = Kind::iid;
    out.q = static_cast<int>(p.size());
    out.single = p.cwiseMax(0.0);
    return out;
}

StationaryProcess StationaryProcess::markov(Eigen::MatrixXd P, RVector pi) {
    const int q = static_cast<int>(P.rows());
    if (P.cols() != q || pi.size() != q) {
        throw InvariantViolation("StationaryProcess::markov: shape mismatch");
    }
    for (int i = 0; i < q; ++i) {
        if (P.row(i).minCoeff() < -1e-14 || std::abs(P.row(i).sum() - 1.0) > 1e-12) {
            throw InvariantViolation("StationaryProcess::markov: row " + std::to_string(i) +
                                     " is not stochastic");
        }
    }
    if (pi.minCoeff() < -1e-14 || std::abs(pi.sum() - 1.0) > 1e-12) {
        throw InvariantViolation("StationaryProcess::markov: pi is not a distribution");
    }
    if ((pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvariantViolation("StationaryProcess::markov: pi is not stationary");
    }
    StationaryProcess out;
    out.kind = Kind::markov;
    out.q = q;
    out.transition = std::move(P);
    out.initial = std::move(pi);
    return out;
}

// ── Network simplex for the Hamming transportation problem ───────────────────

namespace {

constexpr long long kSupportCap = 4096;

struct BasicArc {
    int src, snk; // indices into atom lists
    double flow;
};

/*
 * Dense transportation network simplex. Costs are small integers (Hamming
 * distances), so dual potentials and reduced costs stay exactly integral and
 * the optimality test needs no epsilon. Entering arc: most negative reduced
 * cost, lexicographic (i, j) tie-break; after a long degenerate streak the
 * rule switches to Bland's to guarantee termination.
 */
class TransportSimplex {
public:
    TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                     std::vector<int8_t> cost)
        : m_(static_cast<int>(supply.size())),
          n_(static_cast<int>(demand.size())),
          a_(std::move(supply)),
          b_(std::move(demand)),
          c_(std::move(cost)) {}

    void solve() {
        northwest_corner();
        const int nodes = m_ + n_;
        long long degenerate_streak = 0;
        bool bland = false;
        while (true) {
            compute_duals();
            int ei = -1, ej = -1;
            double best = 0.0;
            for (int i = 0; i < m_ && !(bland && ei >= 0); ++i) {
                for (int j = 0; j < n_; ++j) {
                    const double rc = cost(i, j) - u_[static_cast<size_t>(i)] -
                                      v_[static_cast<size_t>(j)];
                    if (rc < best) {
                        best = rc;
                        ei = i;
                        ej = j;
                        if (bland) break;
                    }
                }
            }
            if (ei < 0) break; // optimal
            const double theta = pivot(ei, ej);
            if (theta <= 0.0) {
                if (++degenerate_streak > 4LL * nodes + 64) bland = true;
            } else {
                degenerate_streak = 0;
            }
        }
        compute_duals();
    }

    double objective() const {
        double s = 0.0;
        for (const BasicArc& arc : basis_) s += arc.flow * cost(arc.src, arc.snk);
        return s;
    }

    const std::vector<BasicArc>& basis() const { return basis_; }
    const std::vector<double>& duals_u() const { return u_; }
    const std::vector<double>& duals_v() const { return v_; }

    double min_reduced_cost() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) {
                worst = std::min(worst, cost(i, j) - u_[static_cast<size_t>(i)] -
                                            v_[static_cast<size_t>(j)]);
            }
        }
        return worst;
    }

private:
    double cost(int i, int j) const {
        return static_cast<double>(c_[static_cast<size_t>(i) * static_cast<size_t>(n_) +
                                      static_cast<size_t>(j)]);
    }

    void northwest_corner() {
        std::vector<double> ra = a_, rb = b_;
        int i = 0, j = 0;
        // the staircase yields exactly m + n - 1 basic arcs, zero-flow ones on ties
        while (true) {
            const double f = std::min(ra[static_cast<size_t>(i)], rb[static_cast<size_t>(j)]);
            basis_.push_back({i, j, f});
            ra[static_cast<size_t>(i)] -= f;
            rb[static_cast<size_t>(j)] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            bool advance_i;
            if (i == m_ - 1) {
                advance_i = false;
            } else if (j == n_ - 1) {
                advance_i = true;
            } else {
                advance_i = ra[static_cast<size_t>(i)] <= rb[static_cast<size_t>(j)];
            }
            if (advance_i) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    void compute_duals() {
        const int nodes = m_ + n_;
        adj_.assign(static_cast<size_t>(nodes), {});
        for (size_t k = 0; k < basis_.size(); ++k) {
            const int s = basis_[k].src, t = m_ + basis_[k].snk;
            adj_[static_cast<size_t>(s)].push_back(static_cast<int>(k));
            adj_[static_cast<size_t>(t)].push_back(static_cast<int>(k));
        }
        u_.assign(static_cast<size_t>(m_), 0.0);
        v_.assign(static_cast<size_t>(n_), 0.0);
        std::vector<char> seen(static_cast<size_t>(nodes), 0);
        std::deque<int> queue{0};
        seen[0] = 1;
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            for (int k : adj_[static_cast<size_t>(node)]) {
                const BasicArc& arc = basis_[static_cast<size_t>(k)];
                const int other = (node == arc.src) ? m_ + arc.snk : arc.src;
                if (seen[static_cast<size_t>(other)]) continue;
                seen[static_cast<size_t>(other)] = 1;
                if (other >= m_) {
                    v_[static_cast<size_t>(other - m_)] =
                        cost(arc.src, arc.snk) - u_[static_cast<size_t>(arc.src)];
                } else {
                    u_[static_cast<size_t>(other)] =
                        cost(arc.src, arc.snk) - v_[static_cast<size_t>(arc.snk)];
                }
                queue.push_back(other);
            }
        }
    }

    // adds arc (ei, ej), removes the blocking arc on the tree cycle
    double pivot(int ei, int ej) {
        const int nodes = m_ + n_;
        std::vector<int> parent_arc(static_cast<size_t>(nodes), -1);
        std::vector<int> parent(static_cast<size_t>(nodes), -1);
        std::vector<char> seen(static_cast<size_t>(nodes), 0);
        std::deque<int> queue{ei};
        seen[static_cast<size_t>(ei)] = 1;
        const int target = m_ + ej;
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            if (node == target) break;
            for (int k : adj_[static_cast<size_t>(node)]) {
                const BasicArc& arc = basis_[static_cast<size_t>(k)];
                const int other = (node == arc.src) ? m_ + arc.snk : arc.src;
                if (seen[static_cast<size_t>(other)]) continue;
                seen[static_cast<size_t>(other)] = 1;
                parent[static_cast<size_t>(other)] = node;
                parent_arc[static_cast<size_t>(other)] = k;
                queue.push_back(other);
            }
        }
        // walk target -> ei; arcs at even positions from the sink side lose flow
        std::vector<int> path_arcs;
        for (int node = target; node != ei; node = parent[static_cast<size_t>(node)]) {
            path_arcs.push_back(parent_arc[static_cast<size_t>(node)]);
        }
        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (size_t p = 0; p < path_arcs.size(); ++p) {
            if (p % 2 == 0) { // decreasing arcs
                const double f = basis_[static_cast<size_t>(path_arcs[p])].flow;
                if (f < theta) {
                    theta = f;
                    leaving = path_arcs[p];
                }
            }
        }
        for (size_t p = 0; p < path_arcs.size(); ++p) {
            basis_[static_cast<size_t>(path_arcs[p])].flow += (p % 2 == 0) ? -theta : theta;
        }
        BasicArc& slot = basis_[static_cast<size_t>(leaving)];
        // update adjacency incrementally: drop old endpoints, add new
        auto drop = [&](int node, int arc_index) {
            auto& lst = adj_[static_cast<size_t>(node)];
            lst.erase(std::find(lst.begin(), lst.end(), arc_index));
        };
        drop(slot.src, leaving);
        drop(m_ + slot.snk, leaving);
        slot = {ei, ej, theta};
        adj_[static_cast<size_t>(ei)].push_back(leaving);
        adj_[static_cast<size_t>(m_ + ej)].push_back(leaving);
        return theta;
    }

    int m_, n_;
    std::vector<double> a_, b_;
    std::vector<int8_t> c_;
    std::vector<BasicArc> basis_;
    std::vector<std::vector<int>> adj_;
    std::vector<double> u_, v_;
};

std::vector<int> basis_digits(long long index, int n_sites, int q) {
    std::vector<int> d(static_cast<size_t>(n_sites));
    for (int p = n_sites - 1; p >= 0; --p) {
        d[static_cast<size_t>(p)] = static_cast<int>(index % q);
        index /= q;
    }
    return d;
}

} // namespace

HammingPlan hamming_w1(const ClassicalDistribution& mu, const ClassicalDistribution& nu) {
    if (mu.region != nu.region) throw RegionMismatch("hamming_w1: regions differ");
    const int n_sites = mu.region.size();
    const int q = mu.region.q();

    std::vector<long long> mu_atoms, nu_atoms;
    std::vector<double> supply, demand;
    for (long long i = 0; i < mu.probs.size(); ++i) {
        if (mu.probs[i] > 0.0) {
            mu_atoms.push_back(i);
            supply.push_back(mu.probs[i]);
        }
        if (nu.probs[i] > 0.0) {
            nu_atoms.push_back(i);
            demand.push_back(nu.probs[i]);
        }
    }
    if (static_cast<long long>(mu_atoms.size()) > kSupportCap ||
        static_cast<long long>(nu_atoms.size()) > kSupportCap) {
        throw SizeCap("hamming_w1: support exceeds " + std::to_string(kSupportCap) + " atoms");
    }
    // exact mass balance for the flow problem; adjust the largest atom
    const double imbalance = mu.probs.sum() - nu.probs.sum();
    *std::max_element(demand.begin(), demand.end()) += imbalance;

    const size_t m = mu_atoms.size(), n = nu_atoms.size();
    std::vector<std::vector<int>> mu_digits(m), nu_digits(n);
    for (size_t i = 0; i < m; ++i) mu_digits[i] = basis_digits(mu_atoms[i], n_sites, q);
    for (size_t j = 0; j < n; ++j) nu_digits[j] = basis_digits(nu_atoms[j], n_sites, q);
    std::vector<int8_t> cost(m * n);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            int h = 0;
            for (int p = 0; p < n_sites; ++p) {
                h += mu_digits[i][static_cast<size_t>(p)] != nu_digits[j][static_cast<size_t>(p)];
            }
            cost[i * n + j] = static_cast<int8_t>(h);
        }
    }

    TransportSimplex simplex(std::move(supply), std::move(demand), std::move(cost));
    simplex.solve();
    if (simplex.min_reduced_cost() < 0.0) {
        throw InvariantViolation("hamming_w1: simplex terminated non-optimal");
    }

    HammingPlan plan;
    plan.value = simplex.objective();
    plan.u = simplex.duals_u();
    plan.v = simplex.duals_v();
    plan.mu_atoms = mu_atoms;
    plan.nu_atoms = nu_atoms;
    for (const BasicArc& arc : simplex.basis()) {
        if (arc.flow > 0.0) {
            plan.coupling.emplace_back(mu_atoms[static_cast<size_t>(arc.src)],
                                       nu_atoms[static_cast<size_t>(arc.snk)], arc.flow);
        }
    }
    return plan;
}

DensityMatrix diagonal_embed(const ClassicalDistribution& mu) {
    return DensityMatrix::from(HermitianOperator::diagonal(mu.region, mu.probs));
}

ClassicalDistribution marginal(const StationaryProcess& proc, int a) {
    if (a < 1) throw InvariantViolation("marginal: window radius must be >= 1");
    const int n_sites = 2 * a;
    if (n_sites > 12) throw SizeCap("marginal: window length " + std::to_string(n_sites));
    Region window = Region::range1d(proc.q, -a, a - 1);
    RVector p(window.dim());
    for (long long idx = 0; idx < window.dim(); ++idx) {
        const std::vector<int> s = basis_digits(idx, n_sites, proc.q);
        double w;
        if (proc.kind == StationaryProcess::Kind::iid) {
            w = 1.0;
            for (int i = 0; i < n_sites; ++i) w *= proc.single[s[static_cast<size_t>(i)]];
        } else {
            w = proc.initial[s[0]];
            for (int i = 0; i + 1 < n_sites; ++i) {
                w *= proc.transition(s[static_cast<size_t>(i)], s[static_cast<size_t>(i + 1)]);
            }
        }
        p[idx] = w;
    }
    return ClassicalDistribution::from(std::move(window), std::move(p));
}

std::vector<double> dbar_sequence(const StationaryProcess& mu_proc,
                                  const StationaryProcess& nu_proc, int a_max) {
    if (a_max > 6) throw SizeCap("dbar_sequence: a_max > 6");
    if (mu_proc.q != nu_proc.q) throw RegionMismatch("dbar_sequence: alphabet sizes differ");
    std::vector<double> seq;
    for (int a = 1; a <= a_max; ++a) {
        const auto mu = marginal(mu_proc, a);
        const auto nu = marginal(nu_proc, a);
        seq.push_back(hamming_w1(mu, nu).value / static_cast<double>(2 * a));
    }
    return seq;
}

} // namespace qw1
