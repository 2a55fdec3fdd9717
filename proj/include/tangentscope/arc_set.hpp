#pragma once

#include <vector>

#include "tangentscope/angle.hpp"

namespace tangentscope {

/// Half-open arc [start, end) with 0 <= start < end <= 2pi.
/// Arcs that would wrap past 2pi are stored split, so `end` never exceeds 2pi.
struct Arc {
    double start = 0.0;
    double end = 0.0;
    double length() const { return end - start; }
};

/// Finite disjoint union of half-open arcs on the circle, sorted by left
/// endpoint. All algebra keeps the representation normalized.
class ArcSet {
public:
    ArcSet() = default;
    explicit ArcSet(std::vector<Arc> arcs);

    /// Single arc [a, b) given in arbitrary radians; wraps are split.
    static ArcSet interval(double a, double b);
    static ArcSet full_circle();

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    std::size_t size() const { return arcs_.size(); }

    double measure() const;
    bool contains(double x) const;

    ArcSet complement() const;
    ArcSet unite(const ArcSet& other) const;
    ArcSet intersect(const ArcSet& other) const;
    ArcSet subtract(const ArcSet& other) const;
    ArcSet symmetric_difference(const ArcSet& other) const;

    /// Rotation by theta (mod 2pi), renormalized.
    ArcSet rotate(double theta) const;

private:
    std::vector<Arc> arcs_; // disjoint, sorted, non-wrapping

    void normalize();
};

inline double arc_measure(const ArcSet& a) { return a.measure(); }

inline ArcSet arc_symmetric_difference(const ArcSet& a, const ArcSet& b) {
    return a.symmetric_difference(b);
}

} // namespace tangentscope
