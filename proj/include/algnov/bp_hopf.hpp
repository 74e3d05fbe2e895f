#pragma once

// Truncated structure maps of the Hopf algebroid (BP_*, BP_*BP) built from
// the Hazewinkel log-coefficient recursion.
//
// Polynomials carry up to four groups of variables: v_1..v_N and three
// tensor factors of t_1..t_N.  Elements of BP_*BP ⊗ ... ⊗ BP_*BP are always
// written with every v on the far left (left-unit convention); BP_*BP is free
// over BP_* on the t-monomials, so this is a basis.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include <gmpxx.h>

#include "algnov/linalg.hpp"

namespace algnov {

inline constexpr unsigned kMaxGenerators = 8;

/// Exponent vector; entry n-1 is the exponent of generator n.
using Exps = std::array<std::uint8_t, kMaxGenerators>;

/// Degree 2(p^n - 1) of v_n and t_n.
std::uint64_t generator_degree(unsigned p, unsigned n);
std::uint64_t degree(unsigned p, const Exps& e);
/// Total exponent count (the I-adic weight of a v-monomial).
unsigned length(const Exps& e);
bool is_one(const Exps& e);
Exps add(const Exps& a, const Exps& b);

struct TruncationWindow {
    unsigned p = 2;
    unsigned t_max = 0;  ///< internal degree cap, even
    unsigned K = 1;      ///< exported coefficients live in Z/p^K
    unsigned N = 0;      ///< largest n with 2(p^n - 1) <= t_max

    /// Rounds t_max up to even and derives N.  Throws InvalidArgument.
    static TruncationWindow make(unsigned p, unsigned t_max, unsigned K);
};

enum Group : unsigned { kV = 0, kT = 1, kT2 = 2, kT3 = 3 };

struct Mono {
    std::array<Exps, 4> g{};
    auto operator<=>(const Mono&) const = default;
};

using RatPoly = std::map<Mono, mpq_class>;

std::uint64_t degree(unsigned p, const Mono& m);
RatPoly rat_constant(const mpq_class& c);
RatPoly rat_generator(Group g, unsigned n);
void rat_add_to(RatPoly& acc, const RatPoly& x, const mpq_class& scale = 1);
RatPoly rat_mul(const RatPoly& a, const RatPoly& b, unsigned p, unsigned t_max);
RatPoly rat_pow(const RatPoly& a, std::uint64_t e, unsigned p, unsigned t_max);

/// η_R(v^α) term: coeff · v^v t^t.
struct RightUnitTerm {
    Residue coeff;
    Exps v, t;
};
/// Δ(t^β) term: coeff · v^v t^left ⊗ t^right.
struct CoproductTerm {
    Residue coeff;
    Exps v, left, right;
};
/// Associated-graded coaction term: coeff · q_index ⊗ t̄^t.
struct GrCoactionTerm {
    Residue coeff;
    unsigned q_index;
    Exps t;
};
/// Mod-I coproduct term: coeff · t̄^left ⊗ t̄^right.
struct BarCoproductTerm {
    Residue coeff;
    Exps left, right;
};

class HopfStructureMaps {
  public:
    explicit HopfStructureMaps(TruncationWindow w);

    const TruncationWindow& window() const { return w_; }
    const Zpk& ring() const { return ring_; }

    /// Every exponent vector in generators 1..N of exactly this degree,
    /// ordered lexicographically.
    const std::vector<Exps>& monomials(unsigned deg) const;

    /// m_n as a rational polynomial in v (m_0 = 1).
    const RatPoly& log_coefficient(unsigned n) const;
    /// η_R(v_n), exact and p-integral.
    const RatPoly& right_unit_exact(unsigned n) const;
    /// Δ(t_n) in groups (v, t, t2), exact and p-integral.
    const RatPoly& coproduct_exact(unsigned n) const;

    /// η_R(v^α) mod p^K, truncated at t_max.  Throws InvalidArgument if α is
    /// outside the window.
    const std::vector<RightUnitTerm>& right_unit(const Exps& alpha) const;
    /// Δ(t^β) mod p^K in left-coefficient form, including the degenerate
    /// terms with an empty tensor factor.
    const std::vector<CoproductTerm>& coproduct(const Exps& beta) const;
    /// Δ(t̄^β) in P = BP_*BP/I, coefficients mod p.
    const std::vector<BarCoproductTerm>& bar_coproduct(const Exps& beta) const;

    /// η_R(v_n) mod I², n = 0 meaning p.
    std::vector<GrCoactionTerm> gr_coaction(unsigned n) const;

    /// Applies η_R to a polynomial in group kV, placing t-variables in group
    /// `into`.  Other groups of x are carried along.
    RatPoly apply_right_unit(const RatPoly& x, Group into) const;
    /// Applies Δ to group `from` of x, writing the right factor to group
    /// `from + 1` and shifting later groups up by one.  v-variables coming
    /// out of Δ that land between factors are pushed left through η_R.
    RatPoly apply_coproduct(const RatPoly& x, Group from) const;

  private:
    TruncationWindow w_;
    Zpk ring_;
    std::vector<std::vector<Exps>> by_degree_;
    std::vector<RatPoly> log_, eta_, delta_;
    std::map<Exps, std::vector<RightUnitTerm>> eta_table_;
    std::map<Exps, std::vector<CoproductTerm>> delta_table_;
    std::map<Exps, std::vector<BarCoproductTerm>> bar_table_;
};

struct AxiomReport {
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    bool all_pass() const;
};

/// Counit, coassociativity, ring-map compatibility of η_R with the log
/// recursion, Δ∘η_R, invariance of I, and η_R(v_n) ≡ v_n mod I_{n-1}, all
/// checked exactly over Q in every degree of the window.
AxiomReport check_axioms(const HopfStructureMaps& maps);

}  // namespace algnov
