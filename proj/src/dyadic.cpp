#include "tangentscope/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tangentscope::dyadic {

Rat pow2(int e) {
    if (e >= 0) return Rat(BigInt(1) << e);
    return Rat(1, BigInt(1) << (-e));
}

namespace {

BigInt floor_div(const Rat& v) {
    BigInt n = numerator(v), d = denominator(v);
    BigInt q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

enum class Rel { disjoint, inside, contains, equal, partial };

// relation of [a0,a1) to [b0,b1)
Rel relate(const Rat& a0, const Rat& a1, const Rat& b0, const Rat& b1) {
    if (a1 <= b0 || b1 <= a0) return Rel::disjoint;
    bool in = b0 <= a0 && a1 <= b1;
    bool out = a0 <= b0 && b1 <= a1;
    if (in && out) return Rel::equal;
    if (in) return Rel::inside;
    if (out) return Rel::contains;
    return Rel::partial;
}

Rat overlap(const Rat& a0, const Rat& a1, const Rat& b0, const Rat& b1) {
    Rat lo = std::max(a0, b0), hi = std::min(a1, b1);
    return hi > lo ? hi - lo : Rat(0);
}

Rat box_overlap(const Box& a, const Box& b) {
    return overlap(a.x0, a.x1, b.x0, b.x1) * overlap(a.y0, a.y1, b.y0, b.y1);
}

} // namespace

// ---------------------------------------------------------------------------
// DyadicStep2D

DyadicStep2D::DyadicStep2D(int resolution) : s_(resolution) {
    if (resolution < 0 || resolution > 62)
        throw std::invalid_argument("DyadicStep2D resolution out of range");
}

void DyadicStep2D::set_cell(long long i, long long j, Rat v) {
    long long lim = 1LL << s_;
    if (i < 0 || j < 0 || i >= lim || j >= lim)
        throw std::invalid_argument("cell outside the unit square");
    if (v == 0)
        cells_.erase({i, j});
    else
        cells_[{i, j}] = std::move(v);
}

Rat DyadicStep2D::cell(long long i, long long j) const {
    auto it = cells_.find({i, j});
    return it == cells_.end() ? Rat(0) : it->second;
}

Rat DyadicStep2D::integral(const DyadicRect& r) const {
    Box rb = Box::of(r);
    Rat cell_side = pow2(-s_);
    Rat acc(0);
    for (const auto& [ij, v] : cells_) {
        Box cb{Rat(ij.first) * cell_side, Rat(ij.first + 1) * cell_side,
               Rat(ij.second) * cell_side, Rat(ij.second + 1) * cell_side};
        Rat ov = box_overlap(cb, rb);
        if (ov != 0) acc += v * ov;
    }
    return acc;
}

Rat DyadicStep2D::value_at(const DyadicPoint& p) const {
    BigInt i = floor_div(p.x() * pow2(s_));
    BigInt j = floor_div(p.y() * pow2(s_));
    if (i < 0 || j < 0 || i >= (BigInt(1) << s_) || j >= (BigInt(1) << s_)) return Rat(0);
    return cell(i.convert_to<long long>(), j.convert_to<long long>());
}

Rat DyadicStep2D::sup_abs() const {
    Rat m(0);
    for (const auto& [ij, v] : cells_) m = std::max(m, static_cast<Rat>(abs(v)));
    return m;
}

Rat DyadicStep2D::l1_norm() const {
    Rat acc(0);
    for (const auto& [ij, v] : cells_) acc += abs(v);
    return acc * pow2(-2 * s_);
}

Rat DyadicStep2D::support_measure() const {
    return Rat(static_cast<long long>(cells_.size())) * pow2(-2 * s_);
}

int DyadicStep2D::support_wd_exp() const {
    // coarsen while every 2x2 block is uniformly present/absent
    std::vector<std::pair<long long, long long>> cur;
    cur.reserve(cells_.size());
    for (const auto& [ij, v] : cells_) cur.push_back(ij);
    int e = s_;
    while (e > 0 && !cur.empty()) {
        std::sort(cur.begin(), cur.end());
        std::vector<std::pair<long long, long long>> up;
        bool ok = true;
        for (std::size_t i = 0; i < cur.size() && ok;) {
            long long bi = cur[i].first >> 1, bj = cur[i].second >> 1;
            int count = 0;
            while (i < cur.size() && (cur[i].first >> 1) == bi && (cur[i].second >> 1) == bj) {
                ++count;
                ++i;
            }
            if (count != 4)
                ok = false;
            else
                up.emplace_back(bi, bj);
        }
        if (!ok) break;
        cur = std::move(up);
        --e;
    }
    return e;
}

bool DyadicStep2D::marginals_zero() const {
    std::map<long long, Rat> rows, cols;
    for (const auto& [ij, v] : cells_) {
        cols[ij.first] += v;
        rows[ij.second] += v;
    }
    for (const auto& [k, v] : rows)
        if (v != 0) return false;
    for (const auto& [k, v] : cols)
        if (v != 0) return false;
    return true;
}

Rat rect_average(const DyadicStep2D& f, const DyadicRect& r) {
    if (r.m1 > f.resolution() || r.m2 > f.resolution())
        throw std::invalid_argument("rectangle finer than the grid resolution");
    if (r.x0() < 0 || r.y0() < 0 || r.x1() > 1 || r.y1() > 1)
        throw std::invalid_argument("rectangle outside the unit square");
    return f.integral(r) / r.measure();
}

// ---------------------------------------------------------------------------
// E(n), F(n), u, v templates

namespace {

// cell (a', b') of a quadrant grid (2^{n-1} x 2^{n-1} cells of side 2^-n)
// belongs to the E_{ij} staircase iff a' < 2^{n-k-1} and b' < 2^k for some k
bool staircase_cell(int n, long long a, long long b) {
    for (int k = 0; k < n; ++k)
        if (a < (1LL << (n - k - 1)) && b < (1LL << k)) return true;
    return false;
}

struct Pattern {
    int n;
    long long side;                 // 2^n cells per axis
    std::vector<int8_t> kind;       // 0 complement, 1 E \ F, 2 F
    std::vector<std::pair<long long, long long>> complement;

    int8_t at(long long a, long long b) const { return kind[a * side + b]; }
};

const Pattern& pattern_for(int n) {
    static std::map<int, Pattern> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Pattern p;
    p.n = n;
    p.side = 1LL << n;
    long long half = p.side / 2;
    p.kind.assign(p.side * p.side, 0);
    for (long long a = 0; a < p.side; ++a) {
        for (long long b = 0; b < p.side; ++b) {
            long long ap = a % half, bp = b % half;
            if (staircase_cell(n, ap, bp)) {
                bool is_f = ap == 0 && bp == 0;
                p.kind[a * p.side + b] = is_f ? 2 : 1;
            } else {
                p.complement.emplace_back(a, b);
            }
        }
    }
    return cache.emplace(n, std::move(p)).first->second;
}

int quadrant_sign(bool right, bool top) { return right == top ? +1 : -1; }

} // namespace

EFSets build_E_F(int n) {
    if (n < 1 || n > 14) throw std::invalid_argument("build_E_F: n out of range");
    EFSets out{n, DyadicStep2D(n), DyadicStep2D(n), {}};
    const Pattern& p = pattern_for(n);
    for (long long a = 0; a < p.side; ++a)
        for (long long b = 0; b < p.side; ++b) {
            if (p.at(a, b) != 0) out.E.set_cell(a, b, Rat(1));
            if (p.at(a, b) == 2) out.F.set_cell(a, b, Rat(1));
        }
    long long half = p.side / 2;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < n; ++k) {
                DyadicRect r;
                r.m1 = k + 1;
                r.m2 = n - k;
                r.i = static_cast<long long>(i) * (1LL << k) + 1;
                r.j = static_cast<long long>(j) * (1LL << (n - k - 1)) + 1;
                out.representation.push_back(r);
            }
    (void)half;
    return out;
}

DyadicStep2D u_function(int n) {
    DyadicStep2D f(n);
    const Pattern& p = pattern_for(n);
    long long half = p.side / 2;
    Rat beta = Rat(n + 1) * pow2(n - 2);
    for (long long a = 0; a < p.side; ++a)
        for (long long b = 0; b < p.side; ++b)
            if (p.at(a, b) == 2)
                f.set_cell(a, b, Rat(quadrant_sign(a >= half, b >= half)) * beta);
    return f;
}

DyadicStep2D v_function() {
    DyadicStep2D f(1);
    f.set_cell(0, 0, Rat(1));
    f.set_cell(1, 1, Rat(1));
    f.set_cell(1, 0, Rat(-1));
    f.set_cell(0, 1, Rat(-1));
    return f;
}

// ---------------------------------------------------------------------------
// Lemma L0

std::vector<DyadicSquare> L0Family::all() const {
    std::vector<DyadicSquare> out;
    for (const auto& lv : levels) out.insert(out.end(), lv.begin(), lv.end());
    return out;
}

L0Family lemma_L0_family(const DyadicStep2D& E, int m, const DyadicSquare& Q,
                         std::size_t cap) {
    if (m < 1) throw std::invalid_argument("lemma_L0_family: m >= 1 required");
    int wd_exp = E.support_wd_exp();
    long long side = 1LL << wd_exp;
    // complement cells of E at its wd resolution
    std::vector<std::pair<long long, long long>> complement;
    Rat cell_side = pow2(-wd_exp);
    for (long long a = 0; a < side; ++a)
        for (long long b = 0; b < side; ++b) {
            DyadicPoint p;
            p.s = wd_exp + 1;
            p.xn = BigInt(2 * a + 1);
            p.yn = BigInt(2 * b + 1);
            if (E.value_at(p) == 0) complement.emplace_back(a, b);
        }
    if (complement.empty())
        throw std::invalid_argument("lemma_L0_family: E must be a proper subset");
    (void)cell_side;

    L0Family fam;
    fam.e_wd_exp = wd_exp;
    fam.levels.assign(m + 1, {});
    fam.levels[0] = {Q};
    std::size_t total = 1;
    for (int k = 1; k <= m; ++k) {
        for (const DyadicSquare& w : fam.levels[k - 1]) {
            for (auto [a, b] : complement) {
                DyadicSquare child;
                child.m = w.m + wd_exp;
                child.i = (w.i << wd_exp) + a;
                child.j = (w.j << wd_exp) + b;
                fam.levels[k].push_back(child);
                if (++total > cap)
                    throw std::runtime_error("lemma_L0_family: square count cap exceeded");
            }
        }
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Lemma L-4

long long alpha_of(int L) {
    int n = 2 * L;
    if (n > 56) throw std::overflow_error("alpha_of: n too large for integer arithmetic");
    return static_cast<long long>(n) * ((1LL << n) + 1);
}

Rat beta_of(int L) {
    int n = 2 * L;
    return Rat(n + 1) * pow2(n - 2);
}

int m_of(int L) {
    int n = 2 * L;
    double v = std::pow(2.0, n) * (std::log(n + 1.0) + (n - 2) * std::log(2.0)) / (n + 1.0);
    return static_cast<int>(std::floor(v)) + 1;
}

L4Function::L4Function(int L, const DyadicSquare& Q) : L4Function(L, Q, m_of(L)) {}

L4Function::L4Function(int L, const DyadicSquare& Q, int m_override)
    : L_(L), n_(2 * L), m_(m_override), q_(Q) {
    if (L < 2) throw std::invalid_argument("L4Function requires integer L >= 2");
    if (m_ < 1) throw std::invalid_argument("L4Function requires m >= 1");
    pattern_for(n_); // build tables up front
}

namespace {

struct Frame {
    Rat x0, y0, side;
    int level; // 1-based; levels 1..m are u-nodes, level m+1 is a v-node
};

// signed integral of u over an arbitrary box inside the frame
Rat u_integral(const Pattern& p, const Rat& beta, const Frame& f, const Box& b) {
    Rat cs = f.side / Rat(p.side);
    Rat half = f.side / 2;
    Rat acc(0);
    const std::pair<Rat, Rat> corners[4] = {
        {Rat(0), Rat(0)}, {half, Rat(0)}, {Rat(0), half}, {half, half}};
    const int signs[4] = {+1, -1, -1, +1};
    for (int c = 0; c < 4; ++c) {
        Box fb{f.x0 + corners[c].first, f.x0 + corners[c].first + cs,
               f.y0 + corners[c].second, f.y0 + corners[c].second + cs};
        Rat ov = box_overlap(fb, b);
        if (ov != 0) acc += Rat(signs[c]) * ov;
    }
    return beta * acc;
}

// signed integral of v over a box inside the frame
Rat v_integral(const Frame& f, const Box& b) {
    Rat half = f.side / 2;
    Rat acc(0);
    const std::pair<Rat, Rat> corners[4] = {
        {Rat(0), Rat(0)}, {half, Rat(0)}, {Rat(0), half}, {half, half}};
    const int signs[4] = {+1, -1, -1, +1};
    for (int c = 0; c < 4; ++c) {
        Box qb{f.x0 + corners[c].first, f.x0 + corners[c].first + half,
               f.y0 + corners[c].second, f.y0 + corners[c].second + half};
        Rat ov = box_overlap(qb, b);
        if (ov != 0) acc += Rat(signs[c]) * ov;
    }
    return acc;
}

} // namespace

Rat L4Function::integral_box(const Box& b) const {
    const Pattern& pat = pattern_for(n_);
    Rat beta = beta_of(L_);
    Box qb{q_.x0(), q_.x0() + q_.side(), q_.y0(), q_.y0() + q_.side()};
    Rel rx = relate(b.x0, b.x1, qb.x0, qb.x1);
    Rel ry = relate(b.y0, b.y1, qb.y0, qb.y1);
    if (rx == Rel::disjoint || ry == Rel::disjoint) return Rat(0);
    if (rx == Rel::partial || ry == Rel::partial)
        throw std::invalid_argument("L4Function: non-dyadic query box");
    bool x_in = rx == Rel::inside;
    bool y_in = ry == Rel::inside;
    // covers Q fully, or is a full-width / full-height slab: zero by the
    // total integral / zero-marginal structure
    if (!x_in && !y_in) return Rat(0);
    if (!x_in || !y_in) return Rat(0);

    Frame f{qb.x0, qb.y0, q_.side(), 1};
    Box cur = b;
    Rat acc(0);
    while (true) {
        if (f.level == m_ + 1) return acc + beta * v_integral(f, cur);
        acc += u_integral(pat, beta, f, cur);
        // descend only when the box sits strictly inside one complement cell
        Rat cs = f.side / Rat(pat.side);
        BigInt a = floor_div((cur.x0 - f.x0) / cs);
        BigInt bb = floor_div((cur.y0 - f.y0) / cs);
        Box cell{f.x0 + Rat(a) * cs, f.x0 + Rat(a + 1) * cs, f.y0 + Rat(bb) * cs,
                 f.y0 + Rat(bb + 1) * cs};
        Rel cx = relate(cur.x0, cur.x1, cell.x0, cell.x1);
        Rel cy = relate(cur.y0, cur.y1, cell.y0, cell.y1);
        if (cx != Rel::inside || cy != Rel::inside) return acc;
        if (pat.at(a.convert_to<long long>(), bb.convert_to<long long>()) != 0) return acc;
        f = Frame{cell.x0, cell.y0, cs, f.level + 1};
    }
}

Rat L4Function::integral(const DyadicRect& r) const { return integral_box(Box::of(r)); }

Rat L4Function::value_at(const DyadicPoint& p) const {
    const Pattern& pat = pattern_for(n_);
    Rat beta = beta_of(L_);
    Rat px = p.x(), py = p.y();
    if (px < q_.x0() || px >= q_.x0() + q_.side() || py < q_.y0() ||
        py >= q_.y0() + q_.side())
        return Rat(0);
    Frame f{q_.x0(), q_.y0(), q_.side(), 1};
    while (true) {
        Rat half = f.side / 2;
        if (f.level == m_ + 1) {
            bool right = px >= f.x0 + half, top = py >= f.y0 + half;
            return beta * Rat(quadrant_sign(right, top));
        }
        Rat cs = f.side / Rat(pat.side);
        long long a = floor_div((px - f.x0) / cs).convert_to<long long>();
        long long b = floor_div((py - f.y0) / cs).convert_to<long long>();
        int8_t kind = pat.at(a, b);
        if (kind == 2) {
            bool right = px >= f.x0 + half, top = py >= f.y0 + half;
            return beta * Rat(quadrant_sign(right, top));
        }
        if (kind == 1) return Rat(0);
        f = Frame{f.x0 + Rat(a) * cs, f.y0 + Rat(b) * cs, cs, f.level + 1};
    }
}

L4Function::Witness L4Function::witness(const DyadicPoint& p) const {
    const Pattern& pat = pattern_for(n_);
    Rat beta = beta_of(L_);
    Rat px = p.x(), py = p.y();
    if (px < q_.x0() || px >= q_.x0() + q_.side() || py < q_.y0() ||
        py >= q_.y0() + q_.side())
        throw std::invalid_argument("witness: point outside Q");
    Frame f{q_.x0(), q_.y0(), q_.side(), 1};
    while (true) {
        Rat half = f.side / 2;
        if (f.level == m_ + 1) {
            bool right = px >= f.x0 + half, top = py >= f.y0 + half;
            Box rect{f.x0 + (right ? half : Rat(0)), f.x0 + (right ? f.side : half),
                     f.y0 + (top ? half : Rat(0)), f.y0 + (top ? f.side : half)};
            return {rect, beta * Rat(quadrant_sign(right, top))};
        }
        Rat cs = f.side / Rat(pat.side);
        long long a = floor_div((px - f.x0) / cs).convert_to<long long>();
        long long b = floor_div((py - f.y0) / cs).convert_to<long long>();
        int8_t kind = pat.at(a, b);
        if (kind != 0) {
            // representation rectangle of the staircase through this cell
            long long halfc = pat.side / 2;
            bool right = a >= halfc, top = b >= halfc;
            long long ap = a % halfc, bp = b % halfc;
            int kk = -1;
            for (int k = 0; k < n_; ++k)
                if (ap < (1LL << (n_ - k - 1)) && bp < (1LL << k)) {
                    kk = k;
                    break;
                }
            if (kk < 0) throw std::logic_error("witness: staircase lookup failed");
            Rat qx = f.x0 + (right ? half : Rat(0));
            Rat qy = f.y0 + (top ? half : Rat(0));
            Box rect{qx, qx + f.side * pow2(-(kk + 1)), qy, qy + f.side * pow2(-(n_ - kk))};
            return {rect, Rat(quadrant_sign(right, top)) * Rat(n_ + 1) / 2};
        }
        f = Frame{f.x0 + Rat(a) * cs, f.y0 + Rat(b) * cs, cs, f.level + 1};
    }
}

Rat L4Function::support_measure() const {
    Rat qm = q_.side() * q_.side();
    Rat e_measure = Rat(n_ + 1) * pow2(-n_);
    Rat q = Rat(1) - e_measure;
    Rat leftover = qm;
    for (int k = 0; k < m_; ++k) leftover *= q;
    return (qm - leftover) / beta_of(L_) + leftover;
}

Rat L4Function::l1_norm() const {
    Rat qm = q_.side() * q_.side();
    Rat e_measure = Rat(n_ + 1) * pow2(-n_);
    Rat q = Rat(1) - e_measure;
    Rat leftover = qm;
    for (int k = 0; k < m_; ++k) leftover *= q;
    return (qm - leftover) + beta_of(L_) * leftover;
}

long long L4Function::support_wd_exponent() const {
    return static_cast<long long>(n_) * m_;
}

DyadicStep2D L4Function::materialize(std::size_t cap) const {
    int s = q_.m + n_ * m_ + 1;
    if (s > 62) throw std::runtime_error("materialize: resolution exceeds 62 bits");
    DyadicStep2D out(s);
    const Pattern& pat = pattern_for(n_);
    Rat beta = beta_of(L_);
    std::size_t count = 0;
    struct Node {
        long long ci, cj; // corner cell at resolution s
        int side_exp;     // node side = 2^-side_exp
        int level;
    };
    std::vector<Node> stack{{q_.i << (s - q_.m), q_.j << (s - q_.m), q_.m, 1}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        long long cells_per_side = 1LL << (s - nd.side_exp);
        if (nd.level == m_ + 1) {
            long long half = cells_per_side / 2;
            for (long long a = 0; a < cells_per_side; ++a)
                for (long long b = 0; b < cells_per_side; ++b) {
                    if (++count > cap) throw std::runtime_error("materialize: cap exceeded");
                    out.set_cell(nd.ci + a, nd.cj + b,
                                 beta * Rat(quadrant_sign(a >= half, b >= half)));
                }
            continue;
        }
        long long sub = cells_per_side >> n_; // cells per pattern cell
        long long halfp = pat.side / 2;
        for (long long a = 0; a < pat.side; ++a)
            for (long long b = 0; b < pat.side; ++b) {
                int8_t kind = pat.at(a, b);
                if (kind == 2) {
                    Rat val = beta * Rat(quadrant_sign(a >= halfp, b >= halfp));
                    for (long long da = 0; da < sub; ++da)
                        for (long long db = 0; db < sub; ++db) {
                            if (++count > cap)
                                throw std::runtime_error("materialize: cap exceeded");
                            out.set_cell(nd.ci + a * sub + da, nd.cj + b * sub + db, val);
                        }
                } else if (kind == 0) {
                    stack.push_back(
                        {nd.ci + a * sub, nd.cj + b * sub, nd.side_exp + n_, nd.level + 1});
                }
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rare sequences and TX2

int RareSequence::gamma() const {
    int g = 0;
    for (std::size_t i = 0; i + 1 < nu.size(); ++i) g = std::max(g, nu[i + 1] - nu[i]);
    return g;
}

bool RareSequence::contains(int m) const {
    return std::binary_search(nu.begin(), nu.end(), m);
}

std::optional<int> RareSequence::round_up(int m) const {
    auto it = std::lower_bound(nu.begin(), nu.end(), m);
    if (it == nu.end()) return std::nullopt;
    return *it;
}

Tx2Cover tx2_cover(const DyadicRect& r, const RareSequence& delta) {
    if (delta.nu.empty()) throw std::invalid_argument("tx2_cover: empty prefix");
    if (r.m1 < delta.nu.front() || r.m2 < delta.nu.front())
        throw std::invalid_argument("tx2_cover: prefix does not cover these exponents");
    auto n1 = delta.round_up(r.m1), n2 = delta.round_up(r.m2);
    if (!n1 || !n2) throw std::invalid_argument("tx2_cover: prefix too short");
    if (*n1 > 62 || *n2 > 62)
        throw std::invalid_argument("tx2_cover: refined exponent exceeds 62 bits");
    Tx2Cover out;
    out.gamma = delta.gamma();
    out.refined.m1 = *n1;
    out.refined.m2 = *n2;
    out.refined.i = ((r.i - 1) << (*n1 - r.m1)) + 1;
    out.refined.j = ((r.j - 1) << (*n2 - r.m2)) + 1;
    out.ratio = out.refined.measure() / r.measure();
    if (out.ratio * pow2(2 * out.gamma) < 1)
        throw std::logic_error("tx2_cover: ratio bound violated");
    return out;
}

// ---------------------------------------------------------------------------
// Saks function

SaksFunction::SaksFunction(RareSequence delta, int K) : delta_(std::move(delta)) {
    if (K < 1) throw std::invalid_argument("saks_function: K >= 1 required");
    std::sort(delta_.nu.begin(), delta_.nu.end());
    int prev_l_plus_alpha = -1;
    int cur_L = 2;
    for (int k = 1; k <= K; ++k) {
        if (k > 1) {
            // d28: L_{k+1} > 2^k (beta(L_k) + k)
            Rat need = pow2(k - 1) * (beta_of(cur_L) + Rat(k - 1));
            BigInt floor_need = floor_div(need);
            if (floor_need > 1000000)
                throw construction_refused(
                    "saks-depth", floor_need.convert_to<double>(), 0.0,
                    "saks_function: L_k growth (d28) exceeds desk scale at stage " +
                        std::to_string(k));
            cur_L = floor_need.convert_to<int>() + 1;
        }
        BigInt alpha = BigInt(2 * cur_L) * ((BigInt(1) << (2 * cur_L)) + 1);
        bool placed = false;
        std::string binding;
        for (std::size_t p = 0; p + 1 < delta_.nu.size(); ++p) {
            int l = std::max(delta_.nu[p] + 1, prev_l_plus_alpha + 1);
            if (l >= delta_.nu[p + 1]) continue;
            if (BigInt(l) + alpha < BigInt(delta_.nu[p + 1])) {
                stages_.push_back({static_cast<int>(p), l, cur_L});
                blocks_.emplace_back(cur_L, DyadicSquare{0, 0, l});
                prev_l_plus_alpha = l + alpha.convert_to<int>();
                placed = true;
                break;
            }
            binding = "gap (" + std::to_string(delta_.nu[p]) + "," +
                      std::to_string(delta_.nu[p + 1]) + ") too small for l + alpha(L) = " +
                      std::to_string(l) + " + " + alpha.str();
        }
        if (!placed)
            throw construction_refused(
                "saks-gap", 0.0, alpha.convert_to<double>(),
                "saks_function: no usable gap for stage " + std::to_string(k) +
                    (binding.empty() ? std::string(" (prefix exhausted)") : "; " + binding));
    }
}

SaksFunction saks_function(const RareSequence& delta, int K) { return SaksFunction(delta, K); }

Rat SaksFunction::stage_integral(int stage, const DyadicRect& r) const {
    const SaksStage& st = stages_[stage];
    const L4Function& proto = blocks_[stage];
    Box b = Box::of(r);
    // locate the stage block containing the box corner; anything that covers
    // or slabs blocks integrates to zero
    Rat side = pow2(-st.l);
    if (b.x0 < 0 || b.y0 < 0 || b.x0 >= 1 || b.y0 >= 1) {
        // outside the unit square: contributions only from overlap with it
        Rel rx = relate(b.x0, b.x1, Rat(0), Rat(1));
        Rel ry = relate(b.y0, b.y1, Rat(0), Rat(1));
        if (rx == Rel::disjoint || ry == Rel::disjoint) return Rat(0);
        return Rat(0); // covers or slabs the unit square => zero
    }
    BigInt bi = floor_div(b.x0 / side);
    BigInt bj = floor_div(b.y0 / side);
    Box block{Rat(bi) * side, Rat(bi + 1) * side, Rat(bj) * side, Rat(bj + 1) * side};
    Rel rx = relate(b.x0, b.x1, block.x0, block.x1);
    Rel ry = relate(b.y0, b.y1, block.y0, block.y1);
    if (rx != Rel::inside || ry != Rel::inside) return Rat(0);
    Box local{b.x0 - block.x0, b.x1 - block.x0, b.y0 - block.y0, b.y1 - block.y0};
    return proto.integral_box(local);
}

Rat SaksFunction::integral(const DyadicRect& r) const {
    Rat acc(0);
    for (std::size_t k = 0; k < stages_.size(); ++k)
        acc += pow2(-(static_cast<int>(k) + 1)) * stage_integral(static_cast<int>(k), r);
    return acc;
}

Rat SaksFunction::value_at(const DyadicPoint& p) const {
    Rat acc(0);
    for (std::size_t k = 0; k < stages_.size(); ++k) {
        const SaksStage& st = stages_[k];
        if (p.s < st.l) throw std::invalid_argument("saks value_at: point coarser than blocks");
        Rat side = pow2(-st.l);
        Rat px = p.x(), py = p.y();
        if (px < 0 || px >= 1 || py < 0 || py >= 1) continue;
        BigInt bi = floor_div(px / side);
        BigInt bj = floor_div(py / side);
        DyadicPoint local;
        local.s = p.s;
        local.xn = p.xn - (bi << (p.s - st.l));
        local.yn = p.yn - (bj << (p.s - st.l));
        acc += pow2(-(static_cast<int>(k) + 1)) * blocks_[k].value_at(local);
    }
    return acc;
}

L4Function::Witness SaksFunction::witness(int stage, const DyadicPoint& p) const {
    const SaksStage& st = stages_[stage];
    if (p.s < st.l) throw std::invalid_argument("saks witness: point coarser than blocks");
    Rat side = pow2(-st.l);
    Rat px = p.x(), py = p.y();
    if (px < 0 || px >= 1 || py < 0 || py >= 1)
        throw std::invalid_argument("saks witness: point outside the unit square");
    BigInt bi = floor_div(px / side);
    BigInt bj = floor_div(py / side);
    DyadicPoint local;
    local.s = p.s;
    local.xn = p.xn - (bi << (p.s - st.l));
    local.yn = p.yn - (bj << (p.s - st.l));
    L4Function::Witness w = blocks_[stage].witness(local);
    Rat ox = Rat(bi) * side, oy = Rat(bj) * side;
    w.rect.x0 += ox;
    w.rect.x1 += ox;
    w.rect.y0 += oy;
    w.rect.y1 += oy;
    return w;
}

Rat SaksFunction::l1_norm() const {
    Rat acc(0);
    for (std::size_t k = 0; k < stages_.size(); ++k) {
        Rat per_block = blocks_[k].l1_norm();
        Rat blocks_total = per_block * pow2(2 * stages_[k].l);
        acc += pow2(-(static_cast<int>(k) + 1)) * blocks_total;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Quasi-coverability

namespace {

std::vector<std::pair<int, int>> candidate_scales(const RectBasisSpec& b1, int res) {
    std::vector<std::pair<int, int>> out;
    switch (b1.kind) {
        case RectBasisSpec::Kind::all_dyadic:
            for (int a = 0; a <= res; ++a)
                for (int b = 0; b <= res; ++b) out.emplace_back(a, b);
            break;
        case RectBasisSpec::Kind::rare:
            for (int a : b1.delta.nu)
                for (int b : b1.delta.nu)
                    if (a <= res && b <= res) out.emplace_back(a, b);
            break;
        case RectBasisSpec::Kind::squares:
            for (int a = 0; a <= res; ++a) out.emplace_back(a, a);
            break;
    }
    std::sort(out.begin(), out.end(), [](auto& l, auto& r) {
        return l.first + l.second != r.first + r.second ? l.first + l.second < r.first + r.second
                                                        : l < r;
    });
    return out;
}

} // namespace

QuasiCover quasi_cover_check(const DyadicRect& r, const RectBasisSpec& b1, const Rat& c,
                             int search_resolution) {
    if (c < 1) throw std::invalid_argument("quasi_cover_check: c >= 1 required");
    QuasiCover out;
    Box rb = Box::of(r);
    Rat diam_sq_r = r.diam_sq();
    auto exact_ceil = [](const Rat& q) {
        BigInt f = floor_div(q);
        return Rat(f) == q ? f : f + 1;
    };
    for (auto [a, b] : candidate_scales(b1, search_resolution)) {
        Rat pa = pow2(-a), pb = pow2(-b);
        BigInt ix0 = floor_div(rb.x0 / pa);
        BigInt iy0 = floor_div(rb.y0 / pb);
        BigInt ix1 = exact_ceil(rb.x1 / pa);
        BigInt iy1 = exact_ceil(rb.y1 / pb);
        BigInt cols = ix1 - ix0, rows = iy1 - iy0;
        if (cols <= 0 || rows <= 0) continue;
        if (cols * rows > 4096) continue; // part-count cap
        Box tilde{Rat(ix0) * pa, Rat(ix1) * pa, Rat(iy0) * pb, Rat(iy1) * pb};
        Rat part_measure = pa * pb;
        Rat tilde_measure = tilde.measure();
        // qc0: |~R| <= c |R|, sum |R_k| <= c |~R| (tiling: sum == |~R|)
        if (tilde_measure > c * rb.measure()) continue;
        // qc2 with R' = ~R: diam(R')^2 <= c^2 diam(R)^2; |R'| <= c |R_k|
        Rat diam_sq_t = tilde.width() * tilde.width() + tilde.height() * tilde.height();
        if (diam_sq_t > c * c * diam_sq_r) continue;
        if (tilde_measure > c * part_measure) continue;
        out.found = true;
        out.r_tilde = tilde;
        out.r_prime = tilde;
        for (BigInt ii = ix0; ii < ix1; ++ii)
            for (BigInt jj = iy0; jj < iy1; ++jj) {
                DyadicRect part;
                part.m1 = a;
                part.m2 = b;
                part.i = ii.convert_to<long long>() + 1;
                part.j = jj.convert_to<long long>() + 1;
                out.parts.push_back(part);
            }
        return out;
    }
    out.failure_reason = "no certificate found within search bounds (scales up to 2^-" +
                         std::to_string(search_resolution) + ", part cap 4096)";
    return out;
}

bool validate_quasi_cover(const DyadicRect& r, const QuasiCover& cover, const Rat& c,
                          std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!cover.found) return fail("no certificate");
    Box rb = Box::of(r);
    const Box& t = cover.r_tilde;
    const Box& rp = cover.r_prime;
    if (!(rp.x0 <= t.x0 && t.x1 <= rp.x1 && rp.y0 <= t.y0 && t.y1 <= rp.y1))
        return fail("~R not inside R'");
    if (!(t.x0 <= rb.x0 && rb.x1 <= t.x1 && t.y0 <= rb.y0 && rb.y1 <= t.y1))
        return fail("R not inside ~R");
    Rat diam_sq_rp = rp.width() * rp.width() + rp.height() * rp.height();
    if (diam_sq_rp > c * c * r.diam_sq()) return fail("diam(R') > c diam(R)");
    Rat sum(0);
    for (std::size_t i = 0; i < cover.parts.size(); ++i) {
        Box p = Box::of(cover.parts[i]);
        if (!(t.x0 <= p.x0 && p.x1 <= t.x1 && t.y0 <= p.y0 && p.y1 <= t.y1))
            return fail("part outside ~R");
        if (rp.measure() > c * cover.parts[i].measure()) return fail("|R'| > c |R_k|");
        sum += cover.parts[i].measure();
        for (std::size_t j = i + 1; j < cover.parts.size(); ++j) {
            Box q = Box::of(cover.parts[j]);
            if (box_overlap(p, q) != 0) return fail("parts overlap");
        }
    }
    if (sum != t.measure()) return fail("parts do not tile ~R");
    if (sum > c * t.measure()) return fail("sum |R_k| > c |~R|");
    if (t.measure() > c * rb.measure()) return fail("|~R| > c |R|");
    return true;
}

// ---------------------------------------------------------------------------
// delta_M estimate

Rat delta_estimate(const Integrable& f, const DyadicPoint& x, const BasisEnumSpec& spec,
                   int len_min_exp) {
    int cap = std::min(spec.max_exponent, 60);
    Rat fx = f.value_at(x);
    Rat best(0);
    auto consider = [&](int m1, int m2) {
        if (m1 > x.s || m2 > x.s) return; // finer than the point's resolution
        DyadicRect r;
        r.m1 = m1;
        r.m2 = m2;
        BigInt i = x.xn >> (x.s - m1);
        BigInt j = x.yn >> (x.s - m2);
        if (i < 0 || j < 0) return;
        r.i = i.convert_to<long long>() + 1;
        r.j = j.convert_to<long long>() + 1;
        Rat avg = f.integral(r) / r.measure();
        Rat dev = abs(avg - fx);
        if (dev > best) best = dev;
    };
    switch (spec.basis.kind) {
        case RectBasisSpec::Kind::all_dyadic:
            for (int m1 = len_min_exp; m1 <= cap; ++m1)
                for (int m2 = len_min_exp; m2 <= cap; ++m2) consider(m1, m2);
            break;
        case RectBasisSpec::Kind::rare:
            for (int m1 : spec.basis.delta.nu)
                for (int m2 : spec.basis.delta.nu)
                    if (m1 >= len_min_exp && m1 <= cap && m2 >= len_min_exp && m2 <= cap)
                        consider(m1, m2);
            break;
        case RectBasisSpec::Kind::squares:
            for (int m = len_min_exp; m <= cap; ++m) consider(m, m);
            break;
    }
    return best;
}

} // namespace tangentscope::dyadic
