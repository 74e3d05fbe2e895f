#pragma once

// Ext over a graded connected commutative Hopf algebra Γ = F_p[x_1, x_2, ...]
// given by the coproducts of its generators.
//
// Computations happen over the dual algebra Γ*, with basis e_α dual to the
// monomials x^α and product ⟨e_α e_β, x^γ⟩ = coefficient of x^α ⊗ x^β in
// Δ(x^γ).  A right Γ-comodule M is a left Γ*-module through
// e_α · m = Σ m_(0) ⟨e_α, m_(1)⟩, lowering degree by |α|, and
//     Ext^{s,t}_Γ(F_p, M) = H^s Hom_{Γ*}(F_•, M)
// where F_• is the minimal free resolution of F_p and a map F_s → M sends a
// generator g into M_{t-|g|}.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "algnov/bp_hopf.hpp"
#include "algnov/linalg.hpp"

namespace algnov {

/// coeff · x^left ⊗ x^right
struct TensorTerm {
    Residue coeff;
    Exps left, right;
};

struct HopfPresentation {
    unsigned p = 2;
    std::vector<unsigned> degrees;                 ///< degree of x_{n+1}
    std::vector<std::vector<TensorTerm>> coproduct;  ///< Δ(x_{n+1})
    unsigned t_max = 0;

    /// The mod 2 dual Steenrod algebra: ξ_n in degree 2^n - 1,
    /// Δξ_n = Σ ξ_{n-k}^{2^k} ⊗ ξ_k.
    static HopfPresentation dual_steenrod(unsigned t_max);
    /// P = BP_*BP/I: t̄_n in degree 2(p^n - 1), Δt̄_n = Σ t̄_k ⊗ t̄_{n-k}^{p^k}.
    static HopfPresentation bp_mod_i(unsigned p, unsigned t_max);
};

/// Polynomial right comodule algebra F_p[y_1, ...] with a weight per
/// generator; the coefficient comodule is one weight piece.
struct ComodulePresentation {
    struct Term {
        Residue coeff;
        Exps y;  ///< comodule monomial
        Exps x;  ///< Hopf algebra monomial
    };
    std::vector<unsigned> degrees;
    std::vector<unsigned> weights;
    std::vector<std::vector<Term>> coaction;  ///< ψ(y_{n+1})
    unsigned weight = 0;

    /// F_p in degree 0.
    static ComodulePresentation trivial();
    /// Q = F_p[q_0, q_1, ...] with ψ(q_n) = Σ q_k ⊗ t̄_{n-k}^{p^k}, weight-i piece.
    static ComodulePresentation graded_coefficients(unsigned p, unsigned t_max, unsigned i);
};

/// The dual algebra Γ* through degree t_max.
class DualAlgebra {
  public:
    explicit DualAlgebra(HopfPresentation pres);

    const HopfPresentation& presentation() const { return pres_; }
    unsigned prime() const { return pres_.p; }
    unsigned t_max() const { return pres_.t_max; }
    Zpk field() const { return Zpk(pres_.p, 1); }

    /// Monomials x^α of degree d, ordered lexicographically.
    const std::vector<Exps>& basis(unsigned d) const { return basis_.at(d); }
    std::size_t index_of(const Exps& alpha) const;
    unsigned degree(const Exps& alpha) const;
    /// e_a e_b over the basis of degree |a| + |b|.  Indices are within each degree.
    const std::vector<std::pair<std::uint32_t, Residue>>& product(unsigned da, std::uint32_t a, unsigned db,
                                                                  std::uint32_t b) const;
    /// Δ(x^γ) as a list of terms.
    const std::vector<TensorTerm>& coproduct(unsigned d, std::uint32_t g) const { return delta_.at(d).at(g); }

    /// Exact check of coassociativity on every monomial of the window.
    bool coassociative() const;

  private:
    HopfPresentation pres_;
    std::vector<std::vector<Exps>> basis_;
    std::map<Exps, std::uint32_t> index_;
    std::vector<std::vector<std::vector<TensorTerm>>> delta_;
    // product table keyed by (da, a, db, b)
    std::map<std::tuple<unsigned, std::uint32_t, unsigned, std::uint32_t>,
             std::vector<std::pair<std::uint32_t, Residue>>>
        mult_;
};

/// An element of F_s: coefficients on e_α g, grouped by generator.
struct FreeElement {
    struct Part {
        std::uint32_t gen;
        std::vector<Residue> coeff;  ///< over basis(t - |gen|)
    };
    std::vector<Part> parts;
};

struct ResolutionGenerator {
    unsigned t;
    FreeElement boundary;  ///< in F_{s-1}; for s = 0 the augmentation
};

class MinimalResolution {
  public:
    /// Resolves F_p through homological degree s_max and internal degree t_max,
    /// lowest degree first.  Throws ConsistencyError if the rank bookkeeping
    /// of exactness fails.
    MinimalResolution(std::shared_ptr<const DualAlgebra> alg, unsigned s_max);

    const DualAlgebra& algebra() const { return *alg_; }
    unsigned s_max() const { return s_max_; }
    unsigned t_max() const { return alg_->t_max(); }
    const std::vector<ResolutionGenerator>& generators(unsigned s) const { return gens_.at(s); }
    /// Indices of generators of F_s in internal degree t, in admission order.
    std::vector<std::uint32_t> generators(unsigned s, unsigned t) const;
    /// dim Ext^{s,t}(F_p, F_p) = number of generators.
    std::size_t dimension(unsigned s, unsigned t) const { return generators(s, t).size(); }

    /// The dual of the primitive x_1^{p^j}, which represents h_j in Ext^1.
    Exps h_monomial(unsigned j) const;
    /// h_j · x for x given over the generators of F_s in degree t; the result
    /// is over the generators of F_{s+1} in degree t + |h_j|.  Throws
    /// InvalidArgument when the target is outside the window.
    std::vector<Residue> product_by_h(unsigned s, unsigned t, const std::vector<Residue>& x, unsigned j) const;

  private:
    std::shared_ptr<const DualAlgebra> alg_;
    unsigned s_max_;
    std::vector<std::vector<ResolutionGenerator>> gens_;
};

/// dim Ext^{s,t}_Γ(F_p, M) for the weight piece M of a comodule, from
/// Hom_{Γ*}(F_•, M).  Indexed [s][t] for s <= s_max - 1.
std::vector<std::vector<std::size_t>> ext_with_coefficients(const MinimalResolution& res,
                                                            const ComodulePresentation& m);

struct ExtChartEntry {
    unsigned stem, s, dim;
};
/// Nonzero Ext^{s,t}(F_p, F_p) dimensions by (stem = t - s, s).
std::vector<ExtChartEntry> ext_chart(const MinimalResolution& res);

/// TSV tables: generators (s, t, generator-index) and h-products
/// (j, s, t, src-index, dst-index); indices count within (s, t).
std::string generators_tsv(const MinimalResolution& res);
std::string products_tsv(const MinimalResolution& res, const std::vector<unsigned>& js);

}  // namespace algnov
