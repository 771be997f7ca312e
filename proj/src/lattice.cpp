#include "qw1/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {

Site origin(int d) { return Site(static_cast<size_t>(d), 0); }

// canonical anchor: lexicographically smallest site moved to the origin
InteractionTerm canonicalize(int d, InteractionTerm term) {
    if (term.support.size() == 0) {
        throw InvariantViolation("Interaction: empty term support");
    }
    for (const Site& s : term.support.sites()) {
        if (static_cast<int>(s.size()) != d) {
            throw InvariantViolation("Interaction: site dimensionality != d");
        }
    }
    Site shift = term.support.site(0);
    for (int& c : shift) c = -c;
    Region moved = term.support.shifted(shift);
    term.op = HermitianOperator::from_matrix(moved, term.op.matrix());
    term.support = std::move(moved);
    return term;
}

int sup_diameter(const Region& r) {
    int diam = 0;
    for (const Site& a : r.sites()) {
        for (const Site& b : r.sites()) {
            for (size_t k = 0; k < a.size(); ++k) {
                diam = std::max(diam, std::abs(a[k] - b[k]));
            }
        }
    }
    return diam;
}

// all integer vectors in [-r, r]^d
std::vector<Site> cube_shifts(int d, int r) {
    std::vector<Site> out;
    Site cur(static_cast<size_t>(d), -r);
    while (true) {
        out.push_back(cur);
        int k = d - 1;
        while (k >= 0) {
            if (++cur[static_cast<size_t>(k)] <= r) break;
            cur[static_cast<size_t>(k)] = -r;
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

bool pair_commutes(const InteractionTerm& a, const InteractionTerm& b, const Site& shift) {
    Region moved = b.support.shifted(shift);
    if (a.support.disjoint(moved)) return true;
    std::vector<Site> all = a.support.sites();
    for (const Site& s : moved.sites()) {
        if (!a.support.contains(s)) all.push_back(s);
    }
    Region joint(a.support.q(), all);
    const CMatrix am = embed(a.op, joint).matrix();
    const CMatrix bm = embed(HermitianOperator::from_matrix(moved, b.op.matrix()), joint).matrix();
    const double comm = (am * bm - bm * am).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, a.op.max_abs() * b.op.max_abs());
    return comm <= 1e-12 * scale;
}

// translate offsets x such that support + x is contained in the box
std::vector<Site> translates_in_box(const Region& support, const Region& box) {
    std::vector<Site> out;
    const Site& anchor = support.site(0);
    for (const Site& b : box.sites()) {
        Site x(b.size());
        for (size_t k = 0; k < b.size(); ++k) x[k] = b[k] - anchor[k];
        bool inside = true;
        for (const Site& s : support.sites()) {
            Site moved(s.size());
            for (size_t k = 0; k < s.size(); ++k) moved[k] = s[k] + x[k];
            if (!box.contains(moved)) {
                inside = false;
                break;
            }
        }
        if (inside) out.push_back(std::move(x));
    }
    return out;
}

Region box_nd(int q, int d, int n_per_axis) {
    if (d == 1) return Region::box1d(q, n_per_axis);
    const int lo = -(n_per_axis / 2);
    std::vector<Site> sites;
    Site cur(static_cast<size_t>(d), lo);
    while (true) {
        sites.push_back(cur);
        int k = d - 1;
        while (k >= 0) {
            if (++cur[static_cast<size_t>(k)] < lo + n_per_axis) break;
            cur[static_cast<size_t>(k)] = lo;
            --k;
        }
        if (k < 0) break;
    }
    return Region(q, std::move(sites));
}

void require_1d_box(const Region& r, const char* what) {
    if (r.size() == 0 || r.site(0).size() != 1) {
        throw RegionMismatch(std::string(what) + ": expected a 1D box");
    }
    for (int i = 0; i + 1 < r.size(); ++i) {
        if (r.site(i + 1)[0] != r.site(i)[0] + 1) {
            throw RegionMismatch(std::string(what) + ": sites are not contiguous");
        }
    }
}

} // namespace

Interaction::Interaction(int d, int q, std::vector<InteractionTerm> terms) : d_(d), q_(q) {
    if (d < 1) throw InvariantViolation("Interaction: d must be >= 1");
    std::map<std::vector<Site>, InteractionTerm> merged;
    for (InteractionTerm& raw : terms) {
        if (raw.support.q() != q) {
            throw InvariantViolation("Interaction: term local dimension != q");
        }
        InteractionTerm term = canonicalize(d, std::move(raw));
        auto it = merged.find(term.support.sites());
        if (it == merged.end()) {
            merged.emplace(term.support.sites(), std::move(term));
        } else {
            it->second.op = it->second.op + term.op;
        }
    }
    for (auto& [key, term] : merged) {
        if (term.op.max_abs() == 0.0) continue;
        range_ = std::max(range_, sup_diameter(term.support));
        terms_.push_back(std::move(term));
    }
    // commuting iff all pairs of translates within the interaction window commute
    const auto shifts = cube_shifts(d_, range_);
    for (size_t i = 0; i < terms_.size() && commuting_; ++i) {
        for (size_t j = i; j < terms_.size() && commuting_; ++j) {
            for (const Site& x : shifts) {
                if (!pair_commutes(terms_[i], terms_[j], x)) {
                    commuting_ = false;
                    break;
                }
            }
        }
    }
}

Interaction Interaction::ising_1d(double coupling_j, double field_h) {
    std::vector<InteractionTerm> terms;
    RVector z(2);
    z << 1.0, -1.0;
    if (field_h != 0.0) {
        Region site(2, {Site{0}});
        terms.push_back({site, HermitianOperator::diagonal(site, field_h * z)});
    }
    if (coupling_j != 0.0) {
        Region bond(2, {Site{0}, Site{1}});
        RVector zz(4);
        zz << 1.0, -1.0, -1.0, 1.0;
        terms.push_back({bond, HermitianOperator::diagonal(bond, coupling_j * zz)});
    }
    return Interaction(1, 2, std::move(terms));
}

HermitianOperator local_hamiltonian(const Interaction& phi, const Region& box) {
    HermitianOperator h = HermitianOperator::zero(box);
    for (const InteractionTerm& term : phi.terms()) {
        for (const Site& x : translates_in_box(term.support, box)) {
            const Region moved = term.support.shifted(x);
            h = h + embed(HermitianOperator::from_matrix(moved, term.op.matrix()), box);
        }
    }
    return h;
}

bool interaction_is_diagonal(const Interaction& phi) {
    for (const InteractionTerm& term : phi.terms()) {
        const CMatrix& m = term.op.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (i != j && std::abs(m(i, j)) > 1e-14 * std::max(1.0, term.op.max_abs())) {
                    return false;
                }
            }
        }
    }
    return true;
}

RVector local_hamiltonian_diagonal(const Interaction& phi, const Region& box) {
    if (!interaction_is_diagonal(phi)) {
        throw InvariantViolation("local_hamiltonian_diagonal: interaction is not diagonal");
    }
    RVector diag = RVector::Zero(box.dim());
    for (const InteractionTerm& term : phi.terms()) {
        for (const Site& x : translates_in_box(term.support, box)) {
            const Region moved = term.support.shifted(x);
            const Region rest = box.minus(moved);
            const auto offS = subindex_offsets(box, moved);
            const auto offR = subindex_offsets(box, rest);
            const CMatrix& m = term.op.matrix();
            for (long long u = 0; u < moved.dim(); ++u) {
                const double val = m(u, u).real();
                for (long long t = 0; t < rest.dim(); ++t) {
                    diag[offS[static_cast<size_t>(u)] + offR[static_cast<size_t>(t)]] += val;
                }
            }
        }
    }
    return diag;
}

double phi_r_norm(const Interaction& phi, double r) {
    if (r < 0.0) throw InvariantViolation("phi_r_norm: r must be >= 0");
    double total = 0.0;
    for (const InteractionTerm& term : phi.terms()) {
        const double sz = static_cast<double>(term.support.size());
        total += sz * std::exp(r * (sz - 1.0)) * op_norm(term.op);
    }
    return total;
}

std::vector<double> phi_lipschitz_sequence(const Interaction& phi,
                                           const std::vector<int>& box_sites,
                                           const SolverConfig& cfg) {
    std::vector<double> out;
    const Site zero = origin(phi.spatial_dim());
    for (int n : box_sites) {
        const Region box = box_nd(phi.q(), phi.spatial_dim(), n);
        const HermitianOperator h = local_hamiltonian(phi, box);
        out.push_back(partial_dependence(h, zero, cfg).value);
    }
    return out;
}

double phi_lipschitz(const Interaction& phi, const SolverConfig& cfg) {
    const int n = 2 * phi.range() + 1;
    return phi_lipschitz_sequence(phi, {n}, cfg).front();
}

DensityMatrix gibbs_local(const Interaction& phi, const Region& box) {
    const HermitianOperator h = local_hamiltonian(phi, box);
    const Spectrum s = eig_herm(h);
    // stable Boltzmann weights: shift by the minimum of the spectrum
    const double shift = s.eigenvalues.minCoeff();
    RVector w = (-(s.eigenvalues.array() - shift)).exp();
    w /= w.sum();
    CMatrix rho = s.eigenvectors * w.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    return DensityMatrix::from(HermitianOperator::from_matrix(box, std::move(rho)));
}

std::vector<double> pressure_sequence(const Interaction& phi, const std::vector<int>& box_sites) {
    std::vector<double> out;
    const bool diag = interaction_is_diagonal(phi);
    for (int n : box_sites) {
        const Region box = box_nd(phi.q(), phi.spatial_dim(), n);
        RVector energies;
        if (diag) {
            energies = local_hamiltonian_diagonal(phi, box);
        } else {
            const HermitianOperator h = local_hamiltonian(phi, box);
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
            energies = es.eigenvalues();
        }
        const double m = -energies.minCoeff();
        const double lse = std::log((-(energies.array()) - m).exp().sum()) + m;
        out.push_back(lse / static_cast<double>(box.size()));
    }
    return out;
}

double specific_energy_pairing(const DensityMatrix& rho_marginal, const Interaction& phi) {
    const Region& box = rho_marginal.region();
    if (box.q() != phi.q()) throw RegionMismatch("specific_energy_pairing: q mismatch");
    const HermitianOperator h = local_hamiltonian(phi, box);
    return expectation(rho_marginal, h) / static_cast<double>(box.size());
}

double uniform_specific_energy(const Interaction& phi) {
    // omega(E_Phi) = sum over generators of Tr[op] / q^{|S|}
    double total = 0.0;
    for (const InteractionTerm& term : phi.terms()) {
        total += term.op.trace() / static_cast<double>(term.support.dim());
    }
    return total;
}

int interaction_neighborhood(const Interaction& phi) {
    std::vector<Site> diff;
    for (const InteractionTerm& term : phi.terms()) {
        for (const Site& a : term.support.sites()) {
            for (const Site& b : term.support.sites()) {
                Site s(a.size());
                for (size_t k = 0; k < a.size(); ++k) s[k] = a[k] - b[k];
                diff.push_back(std::move(s));
            }
        }
    }
    std::sort(diff.begin(), diff.end());
    diff.erase(std::unique(diff.begin(), diff.end()), diff.end());
    return static_cast<int>(diff.size());
}

double tci_envelope(double t, double phi_r, int q) {
    const double root = std::sqrt(1.0 + t * t);
    const double qd = static_cast<double>(q);
    const double term1 = (std::exp(phi_r) + 1.0) * root * phi_r *
                         std::pow(qd, 0.5 * (3.0 + root)) *
                         std::exp(phi_r * (2.0 + 0.5 * root));
    const double term2 = 2.0 * phi_r * std::exp(2.0 * phi_r);
    const double term3 = 4.0 * std::exp(-M_PI * t);
    return term1 + term2 + term3;
}

TciConstants tci_constants(double phi_r, int N, int q, double t_max, long long grid_steps) {
    if (phi_r < 0.0) throw InvariantViolation("tci_constants: phi_r must be >= 0");
    if (N < 1) throw InvariantViolation("tci_constants: N must be >= 1");
    TciConstants out;
    if (phi_r == 0.0) {
        out.M = 0.0;
        out.t_star = std::numeric_limits<double>::infinity();
    } else {
        const double step = t_max / static_cast<double>(grid_steps - 1);
        double best_t = 0.0;
        double best_f = tci_envelope(0.0, phi_r, q);
        for (long long i = 1; i < grid_steps; ++i) {
            const double t = static_cast<double>(i) * step;
            const double f = tci_envelope(t, phi_r, q);
            if (f < best_f) {
                best_f = f;
                best_t = t;
            }
        }
        // golden-section refinement around the grid argmin
        double lo = std::max(0.0, best_t - step), hi = std::min(t_max, best_t + step);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = tci_envelope(x1, phi_r, q), f2 = tci_envelope(x2, phi_r, q);
        while (hi - lo > 1e-10) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = tci_envelope(x1, phi_r, q);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = tci_envelope(x2, phi_r, q);
            }
        }
        out.t_star = 0.5 * (lo + hi);
        out.M = tci_envelope(out.t_star, phi_r, q);
        if (best_f < out.M) {
            out.M = best_f;
            out.t_star = best_t;
        }
        // closed-form suggestion, competitive in the small-phi_r regime
        if (phi_r < 1.0) {
            const double ts = std::log(1.0 / phi_r) / (M_PI + 0.5 * std::log(static_cast<double>(q)));
            const double fs = tci_envelope(ts, phi_r, q);
            if (fs < out.M) {
                out.M = fs;
                out.t_star = ts;
            }
        }
    }
    out.kappa = 1.0 - static_cast<double>(2 * N - 1) * static_cast<double>(N - 1) * out.M;
    out.valid = out.kappa > 0.0;
    if (out.valid) {
        const double denom = 1.0 - std::exp(-out.kappa);
        out.c = 4.0 * static_cast<double>(N) * static_cast<double>(N) / (denom * denom);
    }
    return out;
}

DensityMatrix periodic_approx_marginal(const DensityMatrix& rho_block, int b) {
    const Region& block = rho_block.region();
    require_1d_box(block, "periodic_approx_marginal");
    if (block.size() % 2 != 0 || block.site(0)[0] != -block.size() / 2) {
        throw RegionMismatch("periodic_approx_marginal: block must be Lambda_a = {-a..a-1}");
    }
    if (b < 1) throw InvariantViolation("periodic_approx_marginal: b must be >= 1");
    const int a = block.size() / 2;
    const int q = block.q();
    const Region target = Region::range1d(q, -b, b - 1);

    CMatrix acc = CMatrix::Zero(target.dim(), target.dim());
    const double weight = 1.0 / static_cast<double>(2 * a);
    for (int x = -a; x < a; ++x) {
        // blocks of the 2a-periodic product state covering the target window
        HermitianOperator component = HermitianOperator::from_matrix(
            Region(q, {}), CMatrix::Identity(1, 1));
        const int kspan = (a + b) / (2 * a) + 2;
        for (int k = -kspan; k <= kspan; ++k) {
            const int shift = 2 * a * k + x;
            const int lo = std::max(shift - a, -b);
            const int hi = std::min(shift + a - 1, b - 1);
            if (lo > hi) continue;
            const Region piece = Region::range1d(q, lo, hi);
            const Region moved_block = block.shifted(Site{shift});
            const HermitianOperator shifted =
                HermitianOperator::from_matrix(moved_block, rho_block.matrix());
            component = tensor(component, partial_trace(shifted, piece));
        }
        if (component.region() != target) {
            throw InvariantViolation("periodic_approx_marginal: block tiling failed");
        }
        acc += weight * component.matrix();
    }
    return DensityMatrix::from(HermitianOperator::from_matrix(target, std::move(acc)));
}

std::vector<double> w1_specific_sequence(const std::vector<DensityMatrix>& rho_family,
                                         const std::vector<DensityMatrix>& sigma_family,
                                         const SolverConfig& cfg) {
    if (rho_family.size() != sigma_family.size() || rho_family.empty()) {
        throw InconsistentMarginals("w1_specific_sequence: family sizes differ or empty");
    }
    const int a_max = static_cast<int>(rho_family.size());
    for (int a = 1; a <= a_max; ++a) {
        const Region expected = Region::range1d(rho_family[0].region().q(), -a, a - 1);
        if (rho_family[static_cast<size_t>(a - 1)].region() != expected ||
            sigma_family[static_cast<size_t>(a - 1)].region() != expected) {
            throw RegionMismatch("w1_specific_sequence: family member " + std::to_string(a) +
                                 " is not on Lambda_" + std::to_string(a));
        }
    }
    for (int a = 1; a < a_max; ++a) {
        const Region& sub = rho_family[static_cast<size_t>(a - 1)].region();
        const auto check = [&](const std::vector<DensityMatrix>& fam, const char* name) {
            const HermitianOperator reduced =
                partial_trace(fam[static_cast<size_t>(a)].op(), sub);
            const double err = trace_norm(reduced - fam[static_cast<size_t>(a - 1)].op());
            if (err > 1e-9) {
                throw InconsistentMarginals(std::string("w1_specific_sequence: ") + name +
                                            " marginals " + std::to_string(a + 1) + " -> " +
                                            std::to_string(a) + " differ by " +
                                            std::to_string(err));
            }
        };
        check(rho_family, "rho");
        check(sigma_family, "sigma");
    }
    std::vector<double> out;
    for (int a = 1; a <= a_max; ++a) {
        const auto cert = w1_distance(rho_family[static_cast<size_t>(a - 1)],
                                      sigma_family[static_cast<size_t>(a - 1)], cfg);
        out.push_back(cert.primal / static_cast<double>(2 * a));
    }
    return out;
}

} // namespace qw1
