#include <algorithm>
#include <functional>
#include <sstream>

#include "algnov/specseq.hpp"

namespace algnov {

namespace {

// Koszul complex Λ(τ_0..τ_N) ⊗ BP_* in one internal degree.  A basis element
// is τ_S v^α with α over v_1..v_N; it sits in cochain degree N+1-|S| and
// d τ_S = Σ_{m ∈ S} ± v_m τ_{S∖m} with v_0 = p.
struct KoszulSlice {
    unsigned p, N, t;
    std::vector<unsigned> deg;  ///< |τ_n| = |v_n|
    struct Element {
        std::uint32_t subset;
        Exps alpha;
    };
    std::vector<std::vector<Element>> basis;  ///< by cochain degree 0..N+1
    std::vector<std::map<std::pair<std::uint32_t, Exps>, std::uint32_t>> index;

    KoszulSlice(unsigned p_, unsigned N_, unsigned t_) : p(p_), N(N_), t(t_), basis(N_ + 2), index(N_ + 2)
    {
        for (unsigned n = 0; n <= N; ++n)
            deg.push_back(static_cast<unsigned>(generator_degree(p, n)));
        for (std::uint32_t S = 0; S < (1u << (N + 1)); ++S) {
            unsigned dS = 0;
            for (unsigned n = 0; n <= N; ++n)
                if (S >> n & 1u)
                    dS += deg[n];
            if (dS > t)
                continue;
            const unsigned s = N + 1 - static_cast<unsigned>(__builtin_popcount(S));
            for (const auto& a : monomials(t - dS)) {
                index[s][{S, a}] = static_cast<std::uint32_t>(basis[s].size());
                basis[s].push_back({S, a});
            }
        }
    }

    std::vector<Exps> monomials(unsigned d) const
    {
        std::vector<Exps> out;
        Exps cur{};
        std::function<void(unsigned, unsigned)> rec = [&](unsigned n, unsigned left) {
            if (n > N) {
                if (left == 0)
                    out.push_back(cur);
                return;
            }
            for (unsigned e = 0; e * deg[n] <= left; ++e) {
                cur[n - 1] = static_cast<std::uint8_t>(e);
                rec(n + 1, left - e * deg[n]);
            }
            cur[n - 1] = 0;
        };
        rec(1, d);
        return out;
    }

    /// Matrix of d from degree s over R on the basis τ_S p^{max(0, n - |α|)} v^α
    /// of Λ ⊗ I^n (n = 0 gives the complex itself).
    ModPkMatrix differential(const Zpk& R, unsigned s, unsigned n) const
    {
        ModPkMatrix m(R, basis[s].size(), basis[s + 1].size());
        auto pad = [n](const Exps& a) { return n > length(a) ? n - length(a) : 0u; };
        for (std::uint32_t r = 0; r < basis[s].size(); ++r) {
            const auto& [S, a] = basis[s][r];
            int sign = 1;
            for (unsigned k = 0; k <= N; ++k) {
                if (!(S >> k & 1u))
                    continue;
                Exps b = a;
                std::int64_t c = sign;
                if (k == 0)
                    c *= static_cast<std::int64_t>(R.pow_p(1));
                else
                    ++b[k - 1];
                // p^{pad(a)} (v_k a) = p^{pad(a) - pad(b)} · basis element for b
                const unsigned shift = pad(a) - pad(b);
                const auto col = index[s + 1].at({S & ~(1u << k), b});
                m.set(r, col, static_cast<std::int64_t>(R.mul(R.reduce(c), R.pow_p(shift))));
                sign = -sign;
            }
        }
        return m;
    }

    std::vector<unsigned> weights(unsigned s) const
    {
        std::vector<unsigned> w;
        for (const auto& e : basis[s])
            w.push_back(length(e.alpha));
        return w;
    }
};

std::string at(unsigned s, unsigned i, unsigned t)
{
    std::ostringstream os;
    os << "(s=" << s << ", i=" << i << ", t=" << t << ")";
    return os.str();
}

std::vector<Residue> unit_vector(std::size_t n, std::size_t k, Residue v = 1)
{
    std::vector<Residue> x(n, 0);
    x[k] = v;
    return x;
}

}  // namespace

KoszulReport koszul_check(unsigned p, unsigned t_max, unsigned n_max, unsigned K)
{
    if (K < 4)
        throw InvalidArgument("koszul_check: precision must be at least 4");
    if (n_max + 2 > K)
        throw PrecisionExhausted("koszul_check: precision too small for the requested powers");
    const Zpk R(p, K);
    unsigned N = 0;
    while (generator_degree(p, N + 1) <= t_max)
        ++N;
    if (N + 1 > kMaxGenerators)
        throw InvalidArgument("koszul_check: too many generators");

    KoszulReport rep;
    rep.d1_hits_generators = rep.e2_in_weight_zero = rep.tor_maps_vanish = true;
    const unsigned top = N + 1;
    const unsigned step = 2 * (p - 1);

    for (unsigned t = 0; t <= t_max; t += step) {
        KoszulSlice slice(p, N, t);
        FilteredComplex c;
        c.ring = R;
        for (unsigned s = 0; s <= top; ++s)
            c.weights.push_back(slice.weights(s));
        for (unsigned s = 0; s < top; ++s) {
            c.d.push_back(slice.differential(R, s, 0));
            if (s > 0 && !(c.d[s - 1] * c.d[s]).is_zero())
                throw ConsistencyError("Koszul differential does not square to zero");
        }
        SpectralSequence ss(std::move(c));

        // d_1 τ_n = q_n: τ_n sits at (top-1, 0), q_n at (top, 1)
        for (unsigned n = 0; n <= N; ++n) {
            if (slice.deg[n] != t)
                continue;
            const auto& src = slice.basis[top - 1];
            const auto x = unit_vector(src.size(), slice.index[top - 1].at({1u << n, Exps{}}));
            const auto cls = ss.page_coordinates(top - 1, 0, 1, ss.e1_class(top - 1, 0, ss.graded(top - 1, 0, x)));
            const auto d1 = ss.differential(top - 1, 0, 1);
            std::vector<Residue> image(d1.cols(), 0);
            for (std::size_t r = 0; r < cls.size(); ++r)
                for (std::size_t k = 0; k < d1.cols(); ++k)
                    image[k] = ss.field().add(image[k], ss.field().mul(cls[r], d1.at(r, k)));

            Exps vn{};
            if (n > 0)
                vn[n - 1] = 1;
            const auto& dst = slice.basis[top];
            const auto y = unit_vector(dst.size(), slice.index[top].at({0u, vn}), n == 0 ? R.pow_p(1) : 1);
            const auto q = ss.page_coordinates(top, 1, 1, ss.e1_class(top, 1, ss.graded(top, 1, y)));
            if (image != q || std::all_of(q.begin(), q.end(), [](Residue v) { return v == 0; })) {
                rep.d1_hits_generators = false;
                rep.failures.push_back("d1 tau_" + std::to_string(n) + " is not q_" + std::to_string(n));
            }
        }

        // E_2 is F_p at the unit and zero elsewhere
        for (unsigned s = 0; s <= top; ++s)
            for (unsigned i = 0; i + 3 <= K; ++i) {
                const std::size_t want = (t == 0 && i == 0 && s == top) ? 1 : 0;
                if (ss.dimension(s, i, 2) != want) {
                    rep.e2_in_weight_zero = false;
                    rep.failures.push_back("E2 " + at(s, i, t) + " has dimension " +
                                           std::to_string(ss.dimension(s, i, 2)));
                }
            }

        // Tor(I^{n+1}, F_p) → Tor(I^n, F_p): integral cycles of Λ ⊗ I^{n+1}
        // are the reductions of cycles mod p^{K+1}, since the homology is
        // killed by p.
        const Zpk R1(p, K + 1);
        for (unsigned n = 0; n <= n_max; ++n)
            for (unsigned s = 0; s <= top; ++s) {
                const auto& b = slice.basis[s];
                if (b.empty())
                    continue;
                std::vector<Residue> incl(b.size());
                for (std::size_t k = 0; k < b.size(); ++k)
                    incl[k] = length(b[k].alpha) <= n ? R.pow_p(1) : 1;  // p^{pad_{n+1} - pad_n}

                ModPkMatrix cyc_rows(R1, 0, b.size());
                if (s < top) {
                    const SubmoduleBasis kb = kernel_basis(slice.differential(R1, s, n + 1));
                    cyc_rows = kb.generators();
                } else {
                    cyc_rows = ModPkMatrix::identity(R1, b.size());
                }
                ModPkMatrix bnd(R, 0, b.size());
                if (s > 0 && !slice.basis[s - 1].empty())
                    bnd = slice.differential(R, s - 1, n);
                const SubmoduleBasis boundaries(normal_form(bnd).form);
                for (std::size_t r = 0; r < cyc_rows.rows(); ++r) {
                    std::vector<Residue> z(b.size());
                    for (std::size_t k = 0; k < b.size(); ++k)
                        z[k] = R.mul(R.reduce(static_cast<std::int64_t>(cyc_rows.at(r, k) % R.modulus())), incl[k]);
                    if (!boundaries.contains(z)) {
                        rep.tor_maps_vanish = false;
                        rep.failures.push_back("Tor map from I^" + std::to_string(n + 1) + " to I^" +
                                               std::to_string(n) + " is nonzero at " + at(s, n, t));
                        break;
                    }
                }
            }
    }
    return rep;
}

}  // namespace algnov
