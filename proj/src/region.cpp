#include "qw1/region.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {
std::atomic<long long> g_dim_cap{1LL << 14};
}

long long dim_cap() { return g_dim_cap.load(); }
void set_dim_cap(long long cap) {
    if (cap < 2) throw InvariantViolation("dim_cap must be at least 2");
    g_dim_cap.store(cap);
}

Region::Region(int q, std::vector<Site> sites) : q_(q), sites_(std::move(sites)) {
    if (q_ < 2) throw InvariantViolation("Region: local dimension q must be >= 2");
    if (!sites_.empty()) {
        const size_t d = sites_.front().size();
        for (const Site& s : sites_) {
            if (s.size() != d) throw InvariantViolation("Region: mixed site dimensionality");
        }
    }
    std::sort(sites_.begin(), sites_.end());
    if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
        throw InvariantViolation("Region: duplicate site");
    }
    dim_ = 1;
    const long long cap = dim_cap();
    for (size_t i = 0; i < sites_.size(); ++i) {
        if (dim_ > cap / q_) {
            throw SizeCap("Region: dimension q^" + std::to_string(sites_.size()) +
                          " exceeds cap " + std::to_string(cap));
        }
        dim_ *= q_;
    }
}

bool Region::contains(const Site& x) const {
    return std::binary_search(sites_.begin(), sites_.end(), x);
}

bool Region::contains(const Region& sub) const {
    if (sub.q_ != q_) return false;
    return std::includes(sites_.begin(), sites_.end(), sub.sites_.begin(), sub.sites_.end());
}

bool Region::disjoint(const Region& other) const {
    std::vector<Site> common;
    std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(),
                          other.sites_.end(), std::back_inserter(common));
    return common.empty();
}

int Region::index_of(const Site& x) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), x);
    if (it == sites_.end() || *it != x) return -1;
    return static_cast<int>(it - sites_.begin());
}

Region Region::minus(const Site& x) const {
    if (!contains(x)) throw RegionMismatch("Region::minus: site not in region");
    std::vector<Site> rest;
    rest.reserve(sites_.size() - 1);
    for (const Site& s : sites_) {
        if (s != x) rest.push_back(s);
    }
    return Region(q_, std::move(rest));
}

Region Region::minus(const Region& sub) const {
    if (!contains(sub)) throw RegionMismatch("Region::minus: not a subregion");
    std::vector<Site> rest;
    std::set_difference(sites_.begin(), sites_.end(), sub.sites_.begin(), sub.sites_.end(),
                        std::back_inserter(rest));
    return Region(q_, std::move(rest));
}

Region Region::shifted(const Site& dx) const {
    std::vector<Site> moved = sites_;
    for (Site& s : moved) {
        if (s.size() != dx.size()) throw RegionMismatch("Region::shifted: dimension mismatch");
        for (size_t i = 0; i < s.size(); ++i) s[i] += dx[i];
    }
    return Region(q_, std::move(moved));
}

Region Region::join(const Region& a, const Region& b) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    if (a.q_ != b.q_) throw RegionMismatch("Region::join: local dimensions differ");
    if (!a.disjoint(b)) throw RegionOverlap("Region::join: regions overlap");
    std::vector<Site> all = a.sites_;
    all.insert(all.end(), b.sites_.begin(), b.sites_.end());
    return Region(a.q_, std::move(all));
}

bool Region::operator==(const Region& other) const {
    return q_ == other.q_ && sites_ == other.sites_;
}

Region Region::box1d(int q, int n_sites) {
    if (n_sites < 1) throw InvariantViolation("box1d: need at least one site");
    const int lo = -(n_sites / 2);
    return range1d(q, lo, lo + n_sites - 1);
}

Region Region::range1d(int q, int lo, int hi) {
    std::vector<Site> sites;
    for (int x = lo; x <= hi; ++x) sites.push_back(Site{x});
    return Region(q, std::move(sites));
}

std::string Region::to_string() const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < sites_.size(); ++i) {
        if (i) os << ", ";
        os << "(";
        for (size_t k = 0; k < sites_[i].size(); ++k) {
            if (k) os << ",";
            os << sites_[i][k];
        }
        os << ")";
    }
    os << "} q=" << q_;
    return os.str();
}

std::vector<long long> subindex_offsets(const Region& full, const Region& sub) {
    if (!full.contains(sub)) throw RegionMismatch("subindex_offsets: not a subregion");
    const int q = full.q();
    const int n = full.size();
    // stride of position p in full (first site most significant)
    std::vector<long long> stride(static_cast<size_t>(n), 1);
    for (int p = n - 2; p >= 0; --p) {
        stride[static_cast<size_t>(p)] = stride[static_cast<size_t>(p + 1)] * q;
    }
    std::vector<int> pos(static_cast<size_t>(sub.size()));
    for (int i = 0; i < sub.size(); ++i) {
        pos[static_cast<size_t>(i)] = full.index_of(sub.site(i));
    }
    std::vector<long long> off(static_cast<size_t>(sub.dim()));
    for (long long u = 0; u < sub.dim(); ++u) {
        long long rem = u;
        long long o = 0;
        for (int i = sub.size() - 1; i >= 0; --i) {
            const long long digit = rem % q;
            rem /= q;
            o += digit * stride[static_cast<size_t>(pos[static_cast<size_t>(i)])];
        }
        off[static_cast<size_t>(u)] = o;
    }
    return off;
}

} // namespace qw1
