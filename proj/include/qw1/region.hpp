#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qw1 {

// A lattice coordinate in Z^d, d = site.size().
using Site = std::vector<int>;

// Global Hilbert-dimension cap (default 2^14). Region construction beyond the
// cap throws SizeCap. Overridable by config / QW1_DIM_CAP.
long long dim_cap();
void set_dim_cap(long long cap);

/*
 * A finite set of lattice sites with a common local dimension q.
 *
 * Sites are stored in canonical (lexicographic) order, so two Regions with the
 * same site set compare equal. The basis convention everywhere in the library
 * is "first listed site most significant digit" in base q.
 */
class Region {
public:
    Region() = default;
    Region(int q, std::vector<Site> sites);

    int q() const { return q_; }
    int size() const { return static_cast<int>(sites_.size()); }
    long long dim() const { return dim_; }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& site(int i) const { return sites_[static_cast<size_t>(i)]; }

    bool contains(const Site& x) const;
    bool contains(const Region& sub) const;
    bool disjoint(const Region& other) const;
    // Position of x in canonical order, -1 if absent.
    int index_of(const Site& x) const;

    Region minus(const Site& x) const;
    Region minus(const Region& sub) const;
    Region shifted(const Site& dx) const;
    static Region join(const Region& a, const Region& b); // requires disjoint

    bool operator==(const Region& other) const;
    bool operator!=(const Region& other) const { return !(*this == other); }

    // 1D helpers. box1d(q, n) is the n-site interval containing 0 centered as
    // {-floor(n/2), ..., n-floor(n/2)-1}; for even n = 2a this is the box
    // {-a, ..., a-1}.
    static Region box1d(int q, int n_sites);
    static Region range1d(int q, int lo, int hi); // sites lo..hi inclusive

    std::string to_string() const;

private:
    int q_ = 2;
    std::vector<Site> sites_;
    long long dim_ = 1;
};

// For each index u of `sub`, the partial row index it contributes inside
// `full` (sum of digit * stride over sub's site positions in full).
// Composable: full index = offsets(full,A)[iA] + offsets(full,B)[iB] for a
// partition {A,B} of full's sites.
std::vector<long long> subindex_offsets(const Region& full, const Region& sub);

} // namespace qw1
