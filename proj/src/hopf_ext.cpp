#include "algnov/hopf_ext.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace algnov {

namespace {

using TermMap = std::map<std::pair<Exps, Exps>, Residue>;

Exps generator_power(unsigned n, unsigned e)
{
    Exps x{};
    if (n == 0)
        return x;  // x_0 = 1
    if (e > 255)
        throw InvalidArgument("exponent does not fit the monomial encoding");
    x[n - 1] = static_cast<std::uint8_t>(e);
    return x;
}

unsigned ipow(unsigned b, unsigned e)
{
    unsigned r = 1;
    while (e--)
        r *= b;
    return r;
}

void check_presentation(const std::vector<unsigned>& degrees, unsigned t_max)
{
    if (degrees.size() > kMaxGenerators)
        throw InvalidArgument("too many polynomial generators for the window");
    if (t_max > 255)
        throw InvalidArgument("internal degree bound above 255 is not supported");
}

unsigned weighted_degree(const std::vector<unsigned>& degrees, const Exps& e)
{
    unsigned d = 0;
    for (std::size_t n = 0; n < degrees.size(); ++n)
        d += degrees[n] * e[n];
    return d;
}

/// Monomials in generators of the given degrees, grouped by degree up to
/// t_max, each group sorted.  A weight bound applies when weights is set.
std::vector<std::vector<Exps>> monomials_by_degree(const std::vector<unsigned>& degrees, unsigned t_max,
                                                   const std::vector<unsigned>* weights = nullptr,
                                                   unsigned weight = 0)
{
    std::vector<std::vector<Exps>> out(t_max + 1);
    Exps cur{};
    std::function<void(std::size_t, unsigned, unsigned)> rec = [&](std::size_t n, unsigned deg, unsigned wt) {
        if (n == degrees.size()) {
            if (!weights || wt == weight)
                out[deg].push_back(cur);
            return;
        }
        if (degrees[n] == 0 && (!weights || (*weights)[n] == 0))
            throw InvalidArgument("degree zero generator without weight");
        for (unsigned e = 0;; ++e) {
            unsigned d = deg + e * degrees[n];
            unsigned w = wt + (weights ? e * (*weights)[n] : 0);
            if (d > t_max || (weights && w > weight))
                break;
            if (e > 255)
                throw InvalidArgument("exponent does not fit the monomial encoding");
            cur[n] = static_cast<std::uint8_t>(e);
            rec(n + 1, d, w);
        }
        cur[n] = 0;
    };
    rec(0, 0, 0);
    for (auto& v : out)
        std::sort(v.begin(), v.end());
    return out;
}

TermMap multiply_terms(const Zpk& f, const TermMap& a, const TermMap& b)
{
    TermMap out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            Residue& slot = out[{add(ka.first, kb.first), add(ka.second, kb.second)}];
            slot = f.add(slot, f.mul(ca, cb));
        }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

/// The multiplicative extension of a map given on generators, evaluated on
/// every monomial in `monos`.
std::map<Exps, TermMap> extend_multiplicatively(const Zpk& f, const std::vector<TermMap>& on_generators,
                                                const std::vector<std::vector<Exps>>& monos)
{
    std::map<Exps, TermMap> out;
    std::function<const TermMap&(const Exps&)> eval = [&](const Exps& g) -> const TermMap& {
        auto it = out.find(g);
        if (it != out.end())
            return it->second;
        TermMap val;
        auto first = std::find_if(g.begin(), g.end(), [](std::uint8_t e) { return e != 0; });
        if (first == g.end()) {
            val[{Exps{}, Exps{}}] = 1;
        } else {
            std::size_t n = static_cast<std::size_t>(first - g.begin());
            Exps rest = g;
            --rest[n];
            val = multiply_terms(f, on_generators.at(n), eval(rest));
        }
        return out.emplace(g, std::move(val)).first->second;
    };
    for (const auto& group : monos)
        for (const auto& g : group)
            eval(g);
    return out;
}

std::size_t echelon_rank(const Zpk& f, const std::vector<std::vector<Residue>>& rows)
{
    FpEchelon e(f);
    for (const auto& r : rows)
        e.insert(r, false);
    return e.rank();
}

}  // namespace

// ---------------------------------------------------------------------------
// Presentations

HopfPresentation HopfPresentation::dual_steenrod(unsigned t_max)
{
    HopfPresentation h;
    h.p = 2;
    h.t_max = t_max;
    for (unsigned n = 1; (1u << n) - 1 <= t_max; ++n) {
        h.degrees.push_back((1u << n) - 1);
        std::vector<TensorTerm> terms;
        for (unsigned k = 0; k <= n; ++k)
            terms.push_back({1, generator_power(n - k, 1u << k), generator_power(k, 1)});
        h.coproduct.push_back(std::move(terms));
    }
    check_presentation(h.degrees, t_max);
    return h;
}

HopfPresentation HopfPresentation::bp_mod_i(unsigned p, unsigned t_max)
{
    HopfPresentation h;
    h.p = p;
    h.t_max = t_max;
    for (unsigned n = 1; 2 * (ipow(p, n) - 1) <= t_max; ++n) {
        h.degrees.push_back(2 * (ipow(p, n) - 1));
        std::vector<TensorTerm> terms;
        for (unsigned k = 0; k <= n; ++k)
            terms.push_back({1, generator_power(k, 1), generator_power(n - k, ipow(p, k))});
        h.coproduct.push_back(std::move(terms));
    }
    check_presentation(h.degrees, t_max);
    return h;
}

ComodulePresentation ComodulePresentation::trivial()
{
    return {};
}

ComodulePresentation ComodulePresentation::graded_coefficients(unsigned p, unsigned t_max, unsigned i)
{
    ComodulePresentation m;
    m.weight = i;
    // y_{n+1} = q_n in degree 2(p^n - 1)
    for (unsigned n = 0; 2 * (ipow(p, n) - 1) <= t_max; ++n) {
        m.degrees.push_back(2 * (ipow(p, n) - 1));
        m.weights.push_back(1);
        std::vector<Term> terms;
        for (unsigned k = 0; k <= n; ++k)
            terms.push_back({1, generator_power(k + 1, 1), generator_power(n - k, ipow(p, k))});
        m.coaction.push_back(std::move(terms));
    }
    check_presentation(m.degrees, t_max);
    return m;
}

// ---------------------------------------------------------------------------
// DualAlgebra

DualAlgebra::DualAlgebra(HopfPresentation pres) : pres_(std::move(pres))
{
    check_presentation(pres_.degrees, pres_.t_max);
    if (pres_.coproduct.size() != pres_.degrees.size())
        throw InvalidArgument("DualAlgebra: one coproduct per generator is required");
    const Zpk f = field();
    basis_ = monomials_by_degree(pres_.degrees, pres_.t_max);
    for (const auto& group : basis_)
        for (std::size_t k = 0; k < group.size(); ++k)
            index_[group[k]] = static_cast<std::uint32_t>(k);

    std::vector<TermMap> gens;
    for (const auto& terms : pres_.coproduct) {
        TermMap m;
        for (const auto& t : terms) {
            Residue& slot = m[{t.left, t.right}];
            slot = f.add(slot, f.reduce(static_cast<std::int64_t>(t.coeff)));
        }
        gens.push_back(std::move(m));
    }
    auto all = extend_multiplicatively(f, gens, basis_);

    delta_.resize(basis_.size());
    for (unsigned d = 0; d < basis_.size(); ++d) {
        for (std::uint32_t g = 0; g < basis_[d].size(); ++g) {
            std::vector<TensorTerm> terms;
            for (const auto& [k, c] : all.at(basis_[d][g])) {
                if (degree(k.first) + degree(k.second) != d)
                    throw ConsistencyError("coproduct does not preserve degree");
                terms.push_back({c, k.first, k.second});
                auto key = std::make_tuple(degree(k.first), static_cast<std::uint32_t>(index_of(k.first)),
                                           degree(k.second), static_cast<std::uint32_t>(index_of(k.second)));
                mult_[key].push_back({g, c});
            }
            delta_[d].push_back(std::move(terms));
        }
    }
}

std::size_t DualAlgebra::index_of(const Exps& alpha) const
{
    auto it = index_.find(alpha);
    if (it == index_.end())
        throw InvalidArgument("monomial outside the window");
    return it->second;
}

unsigned DualAlgebra::degree(const Exps& alpha) const
{
    return weighted_degree(pres_.degrees, alpha);
}

const std::vector<std::pair<std::uint32_t, Residue>>& DualAlgebra::product(unsigned da, std::uint32_t a, unsigned db,
                                                                          std::uint32_t b) const
{
    static const std::vector<std::pair<std::uint32_t, Residue>> empty;
    auto it = mult_.find({da, a, db, b});
    return it == mult_.end() ? empty : it->second;
}

bool DualAlgebra::coassociative() const
{
    const Zpk f = field();
    using Triple = std::array<Exps, 3>;
    for (unsigned d = 0; d < basis_.size(); ++d)
        for (std::uint32_t g = 0; g < basis_[d].size(); ++g) {
            std::map<Triple, Residue> lhs, rhs;
            for (const auto& t : delta_[d][g]) {
                // (Δ ⊗ 1)
                const auto& dl = delta_[degree(t.left)][index_of(t.left)];
                for (const auto& u : dl) {
                    Residue& slot = lhs[{u.left, u.right, t.right}];
                    slot = f.add(slot, f.mul(t.coeff, u.coeff));
                }
                // (1 ⊗ Δ)
                const auto& dr = delta_[degree(t.right)][index_of(t.right)];
                for (const auto& u : dr) {
                    Residue& slot = rhs[{t.left, u.left, u.right}];
                    slot = f.add(slot, f.mul(t.coeff, u.coeff));
                }
            }
            std::erase_if(lhs, [](const auto& kv) { return kv.second == 0; });
            std::erase_if(rhs, [](const auto& kv) { return kv.second == 0; });
            if (lhs != rhs)
                return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// MinimalResolution

namespace {

/// Coordinates of F_s in degree t: one block per generator of degree <= t.
struct Layout {
    std::vector<std::size_t> offset;  ///< by generator index; only the first `count` are valid
    std::size_t count = 0;
    std::size_t dim = 0;
};

Layout layout_of(const DualAlgebra& alg, const std::vector<ResolutionGenerator>& gens, unsigned t)
{
    Layout l;
    for (const auto& g : gens) {
        if (g.t > t)
            break;
        l.offset.push_back(l.dim);
        l.dim += alg.basis(t - g.t).size();
        ++l.count;
    }
    return l;
}

/// e_a · ∂g in the layout of F_{s-1} in degree t.
std::vector<Residue> act_on_boundary(const DualAlgebra& alg, const std::vector<ResolutionGenerator>& lower,
                                     const ResolutionGenerator& g, unsigned t, std::uint32_t a, const Layout& target)
{
    const Zpk f = alg.field();
    std::vector<Residue> out(target.dim, 0);
    const unsigned da = t - g.t;
    for (const auto& part : g.boundary.parts) {
        const unsigned db = g.t - lower[part.gen].t;
        const std::size_t off = target.offset.at(part.gen);
        for (std::uint32_t b = 0; b < part.coeff.size(); ++b) {
            if (!part.coeff[b])
                continue;
            for (const auto& [c, k] : alg.product(da, a, db, b))
                out[off + c] = f.add(out[off + c], f.mul(part.coeff[b], k));
        }
    }
    return out;
}

std::vector<std::vector<Residue>> boundary_rows(const DualAlgebra& alg, const std::vector<ResolutionGenerator>& gens,
                                                const std::vector<ResolutionGenerator>& lower, unsigned t,
                                                const Layout& target)
{
    std::vector<std::vector<Residue>> rows;
    for (const auto& g : gens) {
        if (g.t > t)
            break;
        for (std::uint32_t a = 0; a < alg.basis(t - g.t).size(); ++a)
            rows.push_back(act_on_boundary(alg, lower, g, t, a, target));
    }
    return rows;
}

FreeElement to_free(const DualAlgebra& alg, const std::vector<ResolutionGenerator>& gens, unsigned t,
                    const Layout& l, const std::vector<Residue>& v)
{
    FreeElement e;
    for (std::uint32_t g = 0; g < l.count; ++g) {
        const std::size_t n = alg.basis(t - gens[g].t).size();
        std::vector<Residue> c(v.begin() + static_cast<std::ptrdiff_t>(l.offset[g]),
                               v.begin() + static_cast<std::ptrdiff_t>(l.offset[g] + n));
        if (std::any_of(c.begin(), c.end(), [](Residue x) { return x != 0; }))
            e.parts.push_back({g, std::move(c)});
    }
    return e;
}

}  // namespace

MinimalResolution::MinimalResolution(std::shared_ptr<const DualAlgebra> alg, unsigned s_max)
    : alg_(std::move(alg)), s_max_(s_max), gens_(s_max + 1)
{
    const DualAlgebra& A = *alg_;
    const Zpk f = A.field();
    gens_[0].push_back({0, {}});  // covers F_p through the augmentation
    for (unsigned t = 1; t <= A.t_max(); ++t) {
        // rank of ∂_{s-1} at t, with ∂_0 the augmentation (zero in positive degree)
        std::size_t rank_below = 0;
        for (unsigned s = 1; s <= s_max; ++s) {
            const Layout src = layout_of(A, gens_[s - 1], t);
            std::vector<std::vector<Residue>> kernel;
            std::size_t rank_prev = 0;
            if (s == 1) {
                for (std::size_t j = 0; j < src.dim; ++j) {
                    std::vector<Residue> e(src.dim, 0);
                    e[j] = 1;
                    kernel.push_back(std::move(e));
                }
            } else {
                const Layout tgt = layout_of(A, gens_[s - 2], t);
                auto rows = boundary_rows(A, gens_[s - 1], gens_[s - 2], t, tgt);
                FpEchelon ech(f);
                std::vector<std::size_t> tag_row;
                for (std::size_t j = 0; j < rows.size(); ++j) {
                    std::vector<Residue> v = rows[j];
                    auto comb = ech.reduce(v);
                    if (std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; })) {
                        std::vector<Residue> z(rows.size(), 0);
                        z[j] = 1;
                        for (std::size_t k = 0; k < comb.size(); ++k)
                            z[tag_row[k]] = f.sub(z[tag_row[k]], comb[k]);
                        kernel.push_back(std::move(z));
                    } else {
                        ech.insert(rows[j], true);
                        tag_row.push_back(j);
                    }
                }
                rank_prev = ech.rank();
                if (rank_prev + rank_below != tgt.dim)
                    throw ConsistencyError("minimal resolution: not exact in degree " + std::to_string(t));
            }

            // image of the generators already present, then new ones for the rest of the kernel
            FpEchelon image(f);
            for (auto& r : boundary_rows(A, gens_[s], gens_[s - 1], t, src))
                image.insert(std::move(r), false);
            const std::size_t old_rank = image.rank();
            std::size_t added = 0;
            for (const auto& z : kernel) {
                if (image.insert(z, false)) {
                    gens_[s].push_back({t, to_free(A, gens_[s - 1], t, src, z)});
                    ++added;
                }
            }
            if (old_rank + added != kernel.size() || src.dim - rank_prev != kernel.size())
                throw ConsistencyError("minimal resolution: generator count disagrees with the kernel rank");
            rank_below = rank_prev;
        }
    }
}

std::vector<std::uint32_t> MinimalResolution::generators(unsigned s, unsigned t) const
{
    std::vector<std::uint32_t> out;
    const auto& g = gens_.at(s);
    for (std::uint32_t k = 0; k < g.size(); ++k)
        if (g[k].t == t)
            out.push_back(k);
    return out;
}

Exps MinimalResolution::h_monomial(unsigned j) const
{
    return generator_power(1, ipow(alg_->prime(), j));
}

std::vector<Residue> MinimalResolution::product_by_h(unsigned s, unsigned t, const std::vector<Residue>& x,
                                                     unsigned j) const
{
    const DualAlgebra& A = *alg_;
    const Exps h = h_monomial(j);
    const unsigned dh = A.degree(h);
    if (s + 1 > s_max_ || t + dh > A.t_max())
        throw InvalidArgument("product_by_h: target outside the resolved window");
    const auto src = generators(s, t);
    if (x.size() != src.size())
        throw InvalidArgument("product_by_h: class has the wrong length");
    const auto hidx = static_cast<std::uint32_t>(A.index_of(h));
    const Zpk f = A.field();
    const auto dst = generators(s + 1, t + dh);
    std::vector<Residue> out(dst.size(), 0);
    for (std::size_t k = 0; k < dst.size(); ++k) {
        for (const auto& part : gens_[s + 1][dst[k]].boundary.parts) {
            auto pos = std::find(src.begin(), src.end(), part.gen);
            if (pos == src.end())
                continue;
            Residue c = part.coeff.at(hidx);
            out[k] = f.add(out[k], f.mul(c, x[static_cast<std::size_t>(pos - src.begin())]));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ext with coefficients

std::vector<std::vector<std::size_t>> ext_with_coefficients(const MinimalResolution& res,
                                                            const ComodulePresentation& m)
{
    const DualAlgebra& A = res.algebra();
    const Zpk f = A.field();
    const unsigned t_max = res.t_max();
    if (res.s_max() == 0)
        return {};
    check_presentation(m.degrees, t_max);
    if (m.weights.size() != m.degrees.size() || m.coaction.size() != m.degrees.size())
        throw InvalidArgument("comodule presentation has inconsistent sizes");

    const auto monos = monomials_by_degree(m.degrees, t_max, &m.weights, m.weight);
    std::map<Exps, std::uint32_t> index;
    for (const auto& group : monos)
        for (std::uint32_t k = 0; k < group.size(); ++k)
            index[group[k]] = k;

    // e_α · y = Σ y' over coaction terms y ⊗ x^α
    std::vector<TermMap> gens;
    for (const auto& terms : m.coaction) {
        TermMap t;
        for (const auto& term : terms) {
            Residue& slot = t[{term.y, term.x}];
            slot = f.add(slot, f.reduce(static_cast<std::int64_t>(term.coeff)));
        }
        gens.push_back(std::move(t));
    }
    const auto coaction = extend_multiplicatively(f, gens, monos);
    // action[d][k]: α → (index in M_{d-|α|}, coeff)
    std::vector<std::vector<std::map<Exps, std::vector<std::pair<std::uint32_t, Residue>>>>> action(t_max + 1);
    for (unsigned d = 0; d <= t_max; ++d)
        for (const auto& y : monos[d]) {
            std::map<Exps, std::vector<std::pair<std::uint32_t, Residue>>> act;
            for (const auto& [k, c] : coaction.at(y)) {
                auto it = index.find(k.first);
                if (it == index.end())
                    throw ConsistencyError("coaction leaves the weight piece");
                act[k.second].push_back({it->second, c});
            }
            action[d].push_back(std::move(act));
        }

    auto cochain_layout = [&](unsigned s, unsigned t) {
        Layout l;
        for (const auto& g : res.generators(s)) {
            if (g.t > t)
                break;
            l.offset.push_back(l.dim);
            l.dim += monos[t - g.t].size();
            ++l.count;
        }
        return l;
    };
    // rows: (g, m) in C^{s,t}; columns: (g', m') in C^{s+1,t}
    auto coboundary_rank = [&](unsigned s, unsigned t) {
        const Layout src = cochain_layout(s, t), tgt = cochain_layout(s + 1, t);
        std::vector<std::vector<Residue>> rows(src.dim, std::vector<Residue>(tgt.dim, 0));
        const auto& lower = res.generators(s);
        const auto& upper = res.generators(s + 1);
        for (std::uint32_t gp = 0; gp < tgt.count; ++gp)
            for (const auto& part : upper[gp].boundary.parts) {
                const unsigned db = upper[gp].t - lower[part.gen].t;
                const unsigned dm = t - lower[part.gen].t;
                for (std::uint32_t b = 0; b < part.coeff.size(); ++b) {
                    if (!part.coeff[b])
                        continue;
                    const Exps& beta = A.basis(db)[b];
                    for (std::uint32_t k = 0; k < monos[dm].size(); ++k) {
                        auto it = action[dm][k].find(beta);
                        if (it == action[dm][k].end())
                            continue;
                        auto& row = rows[src.offset[part.gen] + k];
                        for (const auto& [mk, c] : it->second) {
                            auto& slot = row[tgt.offset[gp] + mk];
                            slot = f.add(slot, f.mul(part.coeff[b], c));
                        }
                    }
                }
            }
        return std::make_pair(src.dim, echelon_rank(f, rows));
    };

    const unsigned s_top = res.s_max() - 1;
    std::vector<std::vector<std::size_t>> out(s_top + 1, std::vector<std::size_t>(t_max + 1, 0));
    for (unsigned t = 0; t <= t_max; ++t) {
        std::size_t rank_in = 0;
        for (unsigned s = 0; s <= s_top; ++s) {
            auto [dim, rank_out] = coboundary_rank(s, t);
            out[s][t] = dim - rank_out - rank_in;
            rank_in = rank_out;
        }
    }
    return out;
}

std::vector<ExtChartEntry> ext_chart(const MinimalResolution& res)
{
    std::vector<ExtChartEntry> out;
    for (unsigned s = 0; s <= res.s_max(); ++s)
        for (unsigned t = s; t <= res.t_max(); ++t)
            if (auto d = res.dimension(s, t))
                out.push_back({t - s, s, static_cast<unsigned>(d)});
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return std::tie(a.stem, a.s) < std::tie(b.stem, b.s); });
    return out;
}

std::string generators_tsv(const MinimalResolution& res)
{
    std::ostringstream os;
    os << "s\tt\tindex\n";
    for (unsigned s = 0; s <= res.s_max(); ++s)
        for (unsigned t = 0; t <= res.t_max(); ++t) {
            const auto n = res.dimension(s, t);
            for (std::size_t k = 0; k < n; ++k)
                os << s << '\t' << t << '\t' << k << '\n';
        }
    return os.str();
}

std::string products_tsv(const MinimalResolution& res, const std::vector<unsigned>& js)
{
    std::ostringstream os;
    os << "j\ts\tt\tsrc\tdst\n";
    for (unsigned j : js) {
        const unsigned dh = res.algebra().degree(res.h_monomial(j));
        for (unsigned s = 0; s < res.s_max(); ++s)
            for (unsigned t = 0; t + dh <= res.t_max(); ++t) {
                const auto n = res.dimension(s, t);
                for (std::size_t k = 0; k < n; ++k) {
                    std::vector<Residue> x(n, 0);
                    x[k] = 1;
                    const auto y = res.product_by_h(s, t, x, j);
                    for (std::size_t m = 0; m < y.size(); ++m)
                        if (y[m])
                            os << j << '\t' << s << '\t' << t << '\t' << k << '\t' << m << '\n';
                }
            }
    }
    return os.str();
}

}  // namespace algnov
