#include "tangentscope/arc_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace tangentscope {

ArcSet::ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) { normalize(); }

ArcSet ArcSet::interval(double a, double b) {
    if (b <= a) return ArcSet{};
    if (b - a >= two_pi) return full_circle();
    double ra = Angle::reduce(a);
    double len = b - a;
    std::vector<Arc> v;
    if (ra + len <= two_pi) {
        v.push_back({ra, ra + len});
    } else {
        v.push_back({ra, two_pi});
        v.push_back({0.0, ra + len - two_pi});
    }
    return ArcSet{std::move(v)};
}

ArcSet ArcSet::full_circle() {
    return ArcSet{{Arc{0.0, two_pi}}};
}

void ArcSet::normalize() {
    for (auto& a : arcs_) {
        if (a.end < a.start) throw std::invalid_argument("arc with end < start");
    }
    std::erase_if(arcs_, [](const Arc& a) { return a.end <= a.start; });
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& x, const Arc& y) { return x.start < y.start; });
    std::vector<Arc> merged;
    for (const Arc& a : arcs_) {
        if (a.start < 0.0 || a.end > two_pi)
            throw std::invalid_argument("arc outside [0, 2pi]");
        if (!merged.empty() && a.start <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, a.end);
        } else {
            merged.push_back(a);
        }
    }
    arcs_ = std::move(merged);
}

double ArcSet::measure() const {
    double m = 0.0;
    for (const Arc& a : arcs_) m += a.length();
    return m;
}

bool ArcSet::contains(double x) const {
    double t = Angle::reduce(x);
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), t,
                               [](double v, const Arc& a) { return v < a.start; });
    if (it == arcs_.begin()) return false;
    --it;
    return t >= it->start && t < it->end;
}

ArcSet ArcSet::complement() const {
    std::vector<Arc> out;
    double cursor = 0.0;
    for (const Arc& a : arcs_) {
        if (a.start > cursor) out.push_back({cursor, a.start});
        cursor = a.end;
    }
    if (cursor < two_pi) out.push_back({cursor, two_pi});
    return ArcSet{std::move(out)};
}

namespace {

// Sweep over the merged breakpoints of two normalized arc lists, emitting the
// segments where `keep` holds. Membership flags are constant between
// breakpoints.
template <typename Keep>
ArcSet sweep(const ArcSet& A, const ArcSet& B, Keep keep) {
    std::vector<double> cuts;
    cuts.reserve(2 * (A.size() + B.size()) + 2);
    cuts.push_back(0.0);
    for (const Arc& a : A.arcs()) { cuts.push_back(a.start); cuts.push_back(a.end); }
    for (const Arc& b : B.arcs()) { cuts.push_back(b.start); cuts.push_back(b.end); }
    cuts.push_back(two_pi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Arc> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (hi <= lo) continue;
        double mid = lo + (hi - lo) / 2.0;
        if (keep(A.contains(mid), B.contains(mid))) {
            if (!out.empty() && out.back().end == lo)
                out.back().end = hi;
            else
                out.push_back({lo, hi});
        }
    }
    return ArcSet{std::move(out)};
}

} // namespace

ArcSet ArcSet::unite(const ArcSet& other) const {
    return sweep(*this, other, [](bool a, bool b) { return a || b; });
}

ArcSet ArcSet::intersect(const ArcSet& other) const {
    return sweep(*this, other, [](bool a, bool b) { return a && b; });
}

ArcSet ArcSet::subtract(const ArcSet& other) const {
    return sweep(*this, other, [](bool a, bool b) { return a && !b; });
}

ArcSet ArcSet::symmetric_difference(const ArcSet& other) const {
    return sweep(*this, other, [](bool a, bool b) { return a != b; });
}

ArcSet ArcSet::rotate(double theta) const {
    std::vector<Arc> out;
    out.reserve(arcs_.size() + 1);
    for (const Arc& a : arcs_) {
        double s = Angle::reduce(a.start + theta);
        double len = a.length();
        if (s + len <= two_pi) {
            out.push_back({s, s + len});
        } else {
            out.push_back({s, two_pi});
            out.push_back({0.0, s + len - two_pi});
        }
    }
    return ArcSet{std::move(out)};
}

} // namespace tangentscope
