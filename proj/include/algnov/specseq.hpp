#pragma once

// Spectral sequence of a cochain complex of free Z/p^K-modules filtered by
// basis weights: F^i C^s is spanned by p^{max(0, i - w(e))} e.  For the
// cobar complex w(v^α[...]) = |α|, which is the I-adic filtration; p counts
// as weight one.
//
// Large complexes are first shrunk by filtered Gaussian elimination: a pair
// (b, c) with d_{bc} a unit and w(b) = w(c) is cancelled.  The result is
// filtered homotopy equivalent, so every page from E_1 on is unchanged.
//
// Pages are computed as subquotients of E_1: E_r = Z_r / B_r where Z_r is the
// image of {x ∈ F^i : dx ∈ F^{i+r}} and B_r the image of
// {dy : y ∈ F^{i-r+1}, dy ∈ F^i}.  All of this is exact for i + r < K.

#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "algnov/cobar.hpp"
#include "algnov/linalg.hpp"

namespace algnov {

struct FilteredComplex {
    Zpk ring{2, 1};
    std::vector<std::vector<unsigned>> weights;  ///< weights[s], s = 0..top
    std::vector<ModPkMatrix> d;                  ///< d[s]: degree s → s+1, s < top

    unsigned top() const { return static_cast<unsigned>(weights.size()) - 1; }
    std::size_t rank(unsigned s) const { return weights[s].size(); }
};

/// A large filtered complex produced one differential at a time.
struct ComplexSource {
    Zpk ring{2, 1};
    unsigned top = 0;
    std::function<std::vector<unsigned>(unsigned s)> weights;
    std::function<SparseMatrix(unsigned s)> differential;  ///< s < top
};

ComplexSource cobar_source(const CobarComplex& cobar, unsigned t, unsigned top);
FilteredComplex densify(const ComplexSource& src);

struct Reduction {
    FilteredComplex reduced;
    std::vector<std::vector<std::uint32_t>> survivors;  ///< original index of each reduced basis element
    /// Chain map into the original complex.  Unless full maps were asked
    /// for, entries in degree top - 1 are empty.
    std::vector<std::vector<SparseVec>> include;
    /// Chain map back, one entry per original element.  Unless full maps were
    /// asked for, only survivors are filled in degree top.
    std::vector<std::vector<SparseVec>> project;
    std::vector<std::size_t> original_rank;
};

/// Cancels every unit pair of equal weight.  Throws ConsistencyError if d∘d ≠ 0
/// shows up as a nonzero entry against a cancelled column.  Products only use
/// the chain maps below the top two degrees; full_maps also builds those.
Reduction reduce(const ComplexSource& src, bool full_maps = false);

inline constexpr unsigned kInfinitePage = UINT_MAX;

struct PageBasis {
    std::vector<std::vector<Residue>> classes;  ///< E_1 coordinates of each basis element
    std::vector<std::vector<Residue>> lifts;    ///< x ∈ F^i with dx ∈ F^{i+r}, over Z/p^K
    std::size_t dim() const { return classes.size(); }
};

class SpectralSequence {
  public:
    explicit SpectralSequence(FilteredComplex c);
    SpectralSequence(const SpectralSequence&) = delete;
    SpectralSequence& operator=(const SpectralSequence&) = delete;

    const FilteredComplex& complex() const { return c_; }
    const Zpk& field() const { return field_; }
    /// Largest weight with nonzero gr in any degree.
    unsigned max_weight() const { return max_weight_; }

    /// E_r^{s,i}; kInfinitePage gives the limit for the truncated complex.
    /// Throws PrecisionExhausted when a finite r has i + r >= K.
    const PageBasis& page(unsigned s, unsigned i, unsigned r);
    std::size_t dimension(unsigned s, unsigned i, unsigned r) { return page(s, i, r).dim(); }
    /// d_r out of E_r^{s,i}: row k is the image of basis element k in the
    /// basis of E_r^{s+1,i+r}.
    ModPkMatrix differential(unsigned s, unsigned i, unsigned r);

    /// gr^i coordinates of x ∈ F^i C^s.  Throws ConsistencyError otherwise.
    std::vector<Residue> graded(unsigned s, unsigned i, std::span<const Residue> x) const;
    /// E_1 coordinates of a d_0-cocycle given in gr^i coordinates.
    std::vector<Residue> e1_class(unsigned s, unsigned i, const std::vector<Residue>& gr);
    /// Coordinates in the E_r basis of an E_1 class lying in Z_r.
    std::vector<Residue> page_coordinates(unsigned s, unsigned i, unsigned r, const std::vector<Residue>& e1);

  private:
    struct E1Data;
    struct PageData;

    const E1Data& e1(unsigned s, unsigned i);
    const PageData& page_data(unsigned s, unsigned i, unsigned r);
    /// Elements x ∈ F^from C^s with dx ∈ F^level (level UINT_MAX: dx = 0), as
    /// module generators.
    std::vector<std::vector<Residue>> filtered_kernel(unsigned s, unsigned from, unsigned level);

    FilteredComplex c_;
    Zpk field_;
    unsigned max_weight_ = 0;
    std::recursive_mutex mu_;
    std::map<std::pair<unsigned, unsigned>, std::shared_ptr<E1Data>> e1_;
    std::map<std::tuple<unsigned, unsigned, unsigned>, std::shared_ptr<PageData>> pages_;
};

/// Rank over F_p of a dense matrix.
std::size_t fp_rank(const ModPkMatrix& m);

/// dim gr^i H^s of the truncated complex for i = 0..max_weight, computed from
/// submodule lengths on the unreduced complex.  Independent of the page engine.
std::vector<std::size_t> graded_homology(const ComplexSource& src, unsigned s);

// ---------------------------------------------------------------------------
// The algebraic Novikov spectral sequence over a stem window.

struct NovikovWindow {
    unsigned p = 2;
    unsigned stem_max = 20;
    unsigned s_max = 10;
    unsigned i_max = 0;
    unsigned r_max = 8;
    unsigned K = 0;
    unsigned t_max = 0;

    /// Fills unset fields with the defaults: i_max = s_max + stem_max/2,
    /// r_max = 8, K = i_max + r_max + 4, t_max = stem_max + s_max rounded
    /// up to a multiple of 2(p-1).  Throws InvalidArgument.
    static NovikovWindow make(unsigned p, unsigned stem_max, unsigned s_max, std::optional<unsigned> i_max = {},
                              std::optional<unsigned> r_max = {}, std::optional<unsigned> K = {});
    bool contains(unsigned s, unsigned i, unsigned t) const
    {
        return s <= s_max && i <= i_max && t <= t_max && t >= s && t - s <= stem_max;
    }
    /// Internal degrees carrying classes: multiples of 2(p-1) up to t_max.
    std::vector<unsigned> degrees() const;
};

/// Sum of cobar ranks over the complexes the window needs.
std::uint64_t estimated_basis_count(const CobarComplex& cobar, const NovikovWindow& w);

struct CollapseEntry {
    unsigned s, i, t;
    std::vector<std::size_t> dims;  ///< E_1 .. E_{r_max+1}
    std::size_t e_infinity;
    unsigned stable_page;  ///< first page after the last differential touching this spot
    bool stable;           ///< E_{r_max+1} already equals the limit
};

struct DifferentialEntry {
    unsigned r, s, i, t;
    std::size_t rank;
    ModPkMatrix matrix;
};

class NovikovRun {
  public:
    /// Reduces every needed complex, in parallel over internal degree.  Results
    /// do not depend on the thread count.  Throws WindowTooLarge when the
    /// estimated cobar size exceeds basis_cap (0 disables the guard).
    NovikovRun(NovikovWindow w, unsigned threads = 1, std::uint64_t basis_cap = 0);

    const NovikovWindow& window() const { return w_; }
    const CobarComplex& cobar() const { return *cobar_; }
    std::shared_ptr<const HopfStructureMaps> maps() const { return maps_; }
    SpectralSequence& sequence(unsigned t);
    const Reduction& reduction(unsigned t) const;

    /// Every page and differential inside the window, checked for
    /// dim E_{r+1} = dim E_r - rank(out) - rank(in).  At s = s_max the
    /// target degree is a truncation, so only rank(out) >= 0 is checked
    /// there.  Throws ConsistencyError.
    std::vector<CollapseEntry> collapse_report();
    /// Nonzero d_r (1 <= r <= r_max) with source and target inside the window.
    std::vector<DifferentialEntry> differentials();

    /// E_1 class of the product of a class at (s,i,t) with [t_1^{p^j}],
    /// landing in (s+1, i, t + |t_1^{p^j}|).  Empty if the target is outside
    /// the computed degrees.
    std::optional<std::vector<Residue>> times_h(unsigned j, unsigned s, unsigned i, unsigned t,
                                                const std::vector<Residue>& e1);
    /// E_1 class of p·x, landing in (s, i+1, t).
    std::vector<Residue> times_p(unsigned s, unsigned i, unsigned t, const std::vector<Residue>& e1);
    /// A module lift in reduced coordinates of an E_1 class.
    std::vector<Residue> lift(unsigned s, unsigned i, unsigned t, const std::vector<Residue>& e1);

  private:
    struct Slice {
        Reduction red;
        std::unique_ptr<SpectralSequence> ss;
    };
    Slice& slice(unsigned t);
    const Slice& slice(unsigned t) const;

    NovikovWindow w_;
    std::shared_ptr<const HopfStructureMaps> maps_;
    std::unique_ptr<CobarComplex> cobar_;
    std::map<unsigned, Slice> slices_;
};

// ---------------------------------------------------------------------------
// Koszul complexes over the truncated coefficient ring.

struct KoszulReport {
    bool d1_hits_generators = false;  ///< d_1 τ_n = q_n for every n in range
    bool e2_in_weight_zero = false;   ///< E_2 is F_p in (0,0,0) and zero elsewhere
    bool tor_maps_vanish = false;     ///< Tor(I^{n+1}, F_p) → Tor(I^n, F_p) is zero
    std::vector<std::string> failures;
    bool all_pass() const { return d1_hits_generators && e2_in_weight_zero && tor_maps_vanish; }
};

/// Checks the Koszul complex E(τ_0..τ_N) ⊗ BP_* with dτ_n = v_n (v_0 = p)
/// through internal degree t_max, and the Tor maps for n <= n_max.
KoszulReport koszul_check(unsigned p, unsigned t_max, unsigned n_max, unsigned K = 8);

}  // namespace algnov
