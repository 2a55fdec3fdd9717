#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tangentscope/diagnostics.hpp"

namespace tangentscope::dyadic {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

Rat pow2(int e); // 2^e as an exact rational, e may be negative

/// [ (i-1) 2^-m1, i 2^-m1 ) x [ (j-1) 2^-m2, j 2^-m2 ), indices 1-based.
struct DyadicRect {
    long long i = 1, j = 1;
    int m1 = 0, m2 = 0;

    Rat x0() const { return Rat(i - 1) * pow2(-m1); }
    Rat x1() const { return Rat(i) * pow2(-m1); }
    Rat y0() const { return Rat(j - 1) * pow2(-m2); }
    Rat y1() const { return Rat(j) * pow2(-m2); }
    Rat measure() const { return pow2(-m1 - m2); }
    int len_exp() const { return std::min(m1, m2); } // len = 2^-len_exp
    int wd_exp() const { return std::max(m1, m2); }  // wd  = 2^-wd_exp
    bool is_square() const { return m1 == m2; }
    Rat diam_sq() const { return pow2(-2 * m1) + pow2(-2 * m2); }
};

/// Axis-aligned box with exact rational corners (dyadic in all uses here).
struct Box {
    Rat x0, x1, y0, y1;
    static Box of(const DyadicRect& r) { return {r.x0(), r.x1(), r.y0(), r.y1()}; }
    Rat width() const { return x1 - x0; }
    Rat height() const { return y1 - y0; }
    Rat measure() const { return width() * height(); }
    bool empty() const { return x1 <= x0 || y1 <= y0; }
};

/// Exact dyadic point (xn/2^s, yn/2^s).
struct DyadicPoint {
    BigInt xn, yn;
    int s = 0;
    Rat x() const { return Rat(xn) * pow2(-s); }
    Rat y() const { return Rat(yn) * pow2(-s); }
};

/// Anything with exact rational integrals over dyadic rectangles.
struct Integrable {
    virtual Rat integral(const DyadicRect& r) const = 0;
    virtual Rat value_at(const DyadicPoint& p) const = 0;
    virtual ~Integrable() = default;
};

// ---------------------------------------------------------------------------
// Explicit piecewise-constant functions on the 2^-s grid over [0,1)^2

class DyadicStep2D : public Integrable {
public:
    explicit DyadicStep2D(int resolution);

    int resolution() const { return s_; }
    /// Cell [i 2^-s, (i+1) 2^-s) x [j 2^-s, (j+1) 2^-s), 0-based.
    void set_cell(long long i, long long j, Rat v);
    Rat cell(long long i, long long j) const;
    const std::map<std::pair<long long, long long>, Rat>& cells() const { return cells_; }

    Rat integral(const DyadicRect& r) const override;
    Rat value_at(const DyadicPoint& p) const override;
    Rat sup_abs() const;
    Rat l1_norm() const;
    Rat support_measure() const;
    int support_wd_exp() const; // wd of the support as a simple set
    bool marginals_zero() const;

private:
    int s_ = 0;
    std::map<std::pair<long long, long long>, Rat> cells_;
};

/// Exact average (1/|R|) int_R f; rejects R outside resolution or the unit
/// square.
Rat rect_average(const DyadicStep2D& f, const DyadicRect& r);

// ---------------------------------------------------------------------------
// The E(n)/F(n) sets and u, v template functions

struct EFSets {
    int n = 1;
    DyadicStep2D E;                           // indicator, resolution n+1
    DyadicStep2D F;                           // indicator
    std::vector<DyadicRect> representation;   // the 4n staircase rectangles
};

EFSets build_E_F(int n);
DyadicStep2D u_function(int n); // (n+1) 2^{n-2} (1_F00 + 1_F11 - 1_F10 - 1_F01)
DyadicStep2D v_function();      // quadrant signs on the unit square

// ---------------------------------------------------------------------------
// Lemma L0: disjoint scaled copies of a simple set filling a square

struct DyadicSquare {
    long long i = 0, j = 0; // corner at (i 2^-m, j 2^-m), 0-based
    int m = 0;
    Rat x0() const { return Rat(i) * pow2(-m); }
    Rat y0() const { return Rat(j) * pow2(-m); }
    Rat side() const { return pow2(-m); }
};

struct L0Family {
    std::vector<std::vector<DyadicSquare>> levels; // Omega_k, k = 1..m+1
    int e_wd_exp = 0;                              // wd(E) = 2^-e_wd_exp
    std::vector<DyadicSquare> all() const;
};

/// Builds the family for a simple set E (indicator at its resolution, a
/// proper subset of the unit square). Caps the total square count.
L0Family lemma_L0_family(const DyadicStep2D& E_indicator, int m, const DyadicSquare& Q,
                         std::size_t cap = 4'000'000);

// ---------------------------------------------------------------------------
// Lemma L-4: the counterexample block, structural representation

long long alpha_of(int L); // n(2^n + 1), n = 2L
Rat beta_of(int L);        // (n+1) 2^{n-2}
int m_of(int L);           // floor(2^n (ln(n+1) + (n-2) ln 2)/(n+1)) + 1

class L4Function : public Integrable {
public:
    /// Full lemma parameters (m = m_of(L)); the function is represented
    /// structurally, queries descend the self-similar tree.
    L4Function(int L, const DyadicSquare& Q);
    /// Reduced nesting depth (testing / explicit materialization).
    L4Function(int L, const DyadicSquare& Q, int m_override);

    int L() const { return L_; }
    int n() const { return n_; }
    int m() const { return m_; }
    long long alpha() const { return alpha_of(L_); }
    Rat beta() const { return beta_of(L_); }
    const DyadicSquare& Q() const { return q_; }

    Rat integral(const DyadicRect& r) const override;
    Rat integral_box(const Box& b) const; // b must be dyadic-interval aligned
    Rat value_at(const DyadicPoint& p) const override;

    struct Witness {
        Box rect;
        Rat average;
    };
    /// Representation rectangle through the point with |average| >= L.
    Witness witness(const DyadicPoint& p) const;

    Rat support_measure() const; // exact closed form
    Rat l1_norm() const;
    /// wd(supp f) = wd(Q) * 2^-support_wd_exponent (a lower bound statement).
    long long support_wd_exponent() const;

    /// Explicit materialization; throws when the cell count would exceed cap.
    DyadicStep2D materialize(std::size_t cap = 4'000'000) const;

private:
    int L_ = 2, n_ = 4, m_ = 1;
    DyadicSquare q_;
};

// ---------------------------------------------------------------------------
// Rare bases, TX2 covering, Saks function

struct RareSequence {
    std::vector<int> nu; // strictly increasing positive integers
    int gamma() const;   // max consecutive gap over the prefix
    bool contains(int m) const;
    std::optional<int> round_up(int m) const; // smallest nu >= m
};

struct Tx2Cover {
    DyadicRect refined;  // R'' in the Delta-basis
    Rat ratio;           // |R''| / |R'|
    int gamma = 0;
};

/// Requires nu_1 <= m1, m2 and round-ups inside the prefix.
Tx2Cover tx2_cover(const DyadicRect& r, const RareSequence& delta);

struct SaksStage {
    int p_index = 0; // gap (nu_p, nu_{p+1}) used
    int l = 0;
    int L = 0;
};

class SaksFunction : public Integrable {
public:
    SaksFunction(RareSequence delta, int K);

    const std::vector<SaksStage>& stages() const { return stages_; }
    const L4Function& block(int stage) const { return blocks_[stage]; }

    Rat integral(const DyadicRect& r) const override;
    Rat value_at(const DyadicPoint& p) const override;
    /// Stage witness through the point (block-local L-4 witness).
    L4Function::Witness witness(int stage, const DyadicPoint& p) const;
    Rat l1_norm() const; // exact; <= 2 by construction
    Rat stage_integral(int stage, const DyadicRect& r) const; // int_R F_k

private:
    RareSequence delta_;
    std::vector<SaksStage> stages_;
    std::vector<L4Function> blocks_; // prototype block per stage at (0,0)
};

/// Feasibility search for (p_k, l_k, L_k); throws construction_refused with
/// the binding constraint when the prefix has no usable gap.
SaksFunction saks_function(const RareSequence& delta, int K);

// ---------------------------------------------------------------------------
// Quasi-coverability certificates

struct RectBasisSpec {
    enum class Kind { all_dyadic, rare, squares };
    Kind kind = Kind::all_dyadic;
    RareSequence delta; // for rare
};

struct QuasiCover {
    bool found = false;
    Box r_prime;
    Box r_tilde;
    std::vector<DyadicRect> parts;
    std::string failure_reason;
};

/// Bounded search for a quasi-cover certificate of R by basis B1 with
/// constant c; ambient basis is the family of all rectangles. A miss is
/// "not found within search bounds", never impossibility.
QuasiCover quasi_cover_check(const DyadicRect& r, const RectBasisSpec& b1, const Rat& c,
                             int search_resolution);

/// Independent validator: re-checks all definition inequalities from raw
/// coordinates, knowing nothing about the search.
bool validate_quasi_cover(const DyadicRect& r, const QuasiCover& cover, const Rat& c,
                          std::string* why = nullptr);

// ---------------------------------------------------------------------------
// delta_M(x, f) finite surrogate

struct BasisEnumSpec {
    RectBasisSpec basis;
    int max_exponent = 40; // finest scale to enumerate
};

/// Max over basis rectangles R containing x with len(R) <= 2^-len_min_exp
/// of |average - f(x)|, enumerated exactly per exponent pair.
Rat delta_estimate(const Integrable& f, const DyadicPoint& x, const BasisEnumSpec& spec,
                   int len_min_exp);

} // namespace tangentscope::dyadic
