#pragma once

// Reduced cobar complexes.
//
// Integral: basis v^α[t^β_1|...|t^β_s] with every β_k ≠ 0, coefficients in
// Z/p^K.  The differential is Σ_{k=0}^{s+1} (-1)^k δ^k where δ^0 puts η_R of
// the coefficient into a new first slot, δ^k applies Δ to slot k, and δ^{s+1}
// is degenerate.  Terms with an empty slot are dropped; they cancel in the
// full alternating sum.
//
// Associated graded: basis q_0^{i-|α|} q^α[t̄^β_1|...|t̄^β_s] over F_p, one
// complex per weight i.  Here α counts only q_1..q_N.
//
// Both bases are ordered lexicographically on (deg α, α, deg β_1, β_1, ...).

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "algnov/bp_hopf.hpp"
#include "algnov/linalg.hpp"

namespace algnov {

struct CobarElement {
    Exps coeff{};             ///< v-monomial (or q_1..q_N part in the graded complex)
    std::vector<Exps> word;   ///< nonzero t-monomials

    bool operator==(const CobarElement&) const = default;
};

std::string to_string(const CobarElement& e, unsigned N, bool graded = false, unsigned weight = 0);

class CobarComplex {
  public:
    explicit CobarComplex(std::shared_ptr<const HopfStructureMaps> maps);

    const HopfStructureMaps& maps() const { return *maps_; }
    const Zpk& ring() const { return maps_->ring(); }

    /// Number of basis elements in bidegree (s,t), by counting only.
    std::uint64_t dimension(unsigned s, unsigned t) const;
    /// Cached basis of bidegree (s,t).  Throws InvalidArgument outside the window.
    const std::vector<CobarElement>& basis(unsigned s, unsigned t) const;
    std::uint32_t index_of(unsigned s, unsigned t, const CobarElement& e) const;
    /// I-adic weight |α| of each basis element.
    std::vector<unsigned> valuations(unsigned s, unsigned t) const;
    /// Matrix of d: (s,t) → (s+1,t); row r is d(basis(s,t)[r]).
    SparseMatrix differential(unsigned s, unsigned t) const;

  private:
    struct Cached {
        std::vector<CobarElement> basis;
        std::unordered_map<std::string, std::uint32_t> index;
    };
    const Cached& cached(unsigned s, unsigned t) const;

    std::shared_ptr<const HopfStructureMaps> maps_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const Cached>> cache_;
};

class GrCobarComplex {
  public:
    explicit GrCobarComplex(std::shared_ptr<const HopfStructureMaps> maps);

    const HopfStructureMaps& maps() const { return *maps_; }
    const Zpk& field() const { return field_; }

    const std::vector<CobarElement>& basis(unsigned s, unsigned i, unsigned t) const;
    std::uint32_t index_of(unsigned s, unsigned i, unsigned t, const CobarElement& e) const;
    /// Matrix over F_p of d: (s,i,t) → (s+1,i,t).
    SparseMatrix differential(unsigned s, unsigned i, unsigned t) const;
    /// dim H^{s,i,t} of the graded complex.
    std::size_t cohomology_dimension(unsigned s, unsigned i, unsigned t) const;

  private:
    struct Cached {
        std::vector<CobarElement> basis;
        std::unordered_map<std::string, std::uint32_t> index;
    };
    const Cached& cached(unsigned s, unsigned i, unsigned t) const;

    std::shared_ptr<const HopfStructureMaps> maps_;
    Zpk field_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<unsigned, unsigned, unsigned>, std::shared_ptr<const Cached>> cache_;
};

}  // namespace algnov
