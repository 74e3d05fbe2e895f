#include "algnov/bp_hopf.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace algnov {

std::uint64_t generator_degree(unsigned p, unsigned n)
{
    std::uint64_t q = 1;
    for (unsigned i = 0; i < n; ++i)
        q *= p;
    return 2 * (q - 1);
}

std::uint64_t degree(unsigned p, const Exps& e)
{
    std::uint64_t d = 0;
    for (unsigned n = 0; n < kMaxGenerators; ++n)
        if (e[n])
            d += e[n] * generator_degree(p, n + 1);
    return d;
}

unsigned length(const Exps& e)
{
    unsigned s = 0;
    for (auto x : e)
        s += x;
    return s;
}

bool is_one(const Exps& e)
{
    return std::all_of(e.begin(), e.end(), [](std::uint8_t x) { return x == 0; });
}

Exps add(const Exps& a, const Exps& b)
{
    Exps c{};
    for (unsigned n = 0; n < kMaxGenerators; ++n) {
        unsigned s = unsigned(a[n]) + b[n];
        if (s > 255)
            throw InvalidArgument("exponent overflow");
        c[n] = static_cast<std::uint8_t>(s);
    }
    return c;
}

TruncationWindow TruncationWindow::make(unsigned p, unsigned t_max, unsigned K)
{
    TruncationWindow w;
    Zpk check(p, K);  // validates p and K
    (void)check;
    w.p = p;
    w.t_max = t_max + (t_max & 1u);
    w.K = K;
    w.N = 0;
    while (generator_degree(p, w.N + 1) <= w.t_max) {
        ++w.N;
        if (w.N > kMaxGenerators - 1)
            throw InvalidArgument("window needs more than " + std::to_string(kMaxGenerators - 1) + " generators");
    }
    return w;
}

std::uint64_t degree(unsigned p, const Mono& m)
{
    std::uint64_t d = 0;
    for (const auto& g : m.g)
        d += degree(p, g);
    return d;
}

RatPoly rat_constant(const mpq_class& c)
{
    RatPoly r;
    if (c != 0)
        r[Mono{}] = c;
    return r;
}

RatPoly rat_generator(Group g, unsigned n)
{
    if (n == 0)
        return rat_constant(1);
    Mono m;
    m.g[g][n - 1] = 1;
    return RatPoly{{m, mpq_class(1)}};
}

void rat_add_to(RatPoly& acc, const RatPoly& x, const mpq_class& scale)
{
    for (const auto& [m, c] : x) {
        auto [it, fresh] = acc.try_emplace(m, 0);
        it->second += scale * c;
        if (it->second == 0)
            acc.erase(it);
    }
}

namespace {

bool mono_mul(const Mono& a, const Mono& b, Mono& out)
{
    for (unsigned g = 0; g < 4; ++g)
        for (unsigned n = 0; n < kMaxGenerators; ++n) {
            unsigned s = unsigned(a.g[g][n]) + b.g[g][n];
            if (s > 255)
                return false;
            out.g[g][n] = static_cast<std::uint8_t>(s);
        }
    return true;
}

}  // namespace

RatPoly rat_mul(const RatPoly& a, const RatPoly& b, unsigned p, unsigned t_max)
{
    RatPoly out;
    for (const auto& [ma, ca] : a) {
        std::uint64_t da = degree(p, ma);
        if (da > t_max)
            continue;
        for (const auto& [mb, cb] : b) {
            if (da + degree(p, mb) > t_max)
                continue;
            Mono m;
            if (!mono_mul(ma, mb, m))
                continue;
            auto [it, fresh] = out.try_emplace(m, 0);
            it->second += ca * cb;
            if (it->second == 0)
                out.erase(it);
        }
    }
    return out;
}

RatPoly rat_pow(const RatPoly& a, std::uint64_t e, unsigned p, unsigned t_max)
{
    RatPoly result = rat_constant(1), base = a;
    while (e) {
        if (e & 1u)
            result = rat_mul(result, base, p, t_max);
        e >>= 1;
        if (e)
            base = rat_mul(base, base, p, t_max);
    }
    return result;
}

namespace {

// Polynomial whose only nonconstant groups are moved: group `from` of every
// monomial goes to group `to`.
RatPoly relabel(const RatPoly& x, Group from, Group to)
{
    RatPoly out;
    for (const auto& [m, c] : x) {
        Mono n = m;
        n.g[to] = m.g[from];
        if (to != from)
            n.g[from] = Exps{};
        out.emplace(n, c);
    }
    return out;
}

Residue to_residue(const Zpk& R, const mpq_class& c, const char* what)
{
    if (c.get_den() != 1)
        throw ConsistencyError(std::string(what) + ": non-integral coefficient " + c.get_str());
    mpz_class r = c.get_num() % static_cast<unsigned long>(R.modulus());
    if (r < 0)
        r += static_cast<unsigned long>(R.modulus());
    return static_cast<Residue>(r.get_ui());
}

unsigned p_valuation(const mpq_class& c, unsigned p)
{
    mpz_class n = c.get_num();
    unsigned v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

}  // namespace

HopfStructureMaps::HopfStructureMaps(TruncationWindow w) : w_(w), ring_(w.p, w.K)
{
    const unsigned p = w_.p, T = w_.t_max, N = w_.N;

    // Monomials by degree, lexicographic within a degree.
    by_degree_.assign(T + 1, {});
    std::function<void(unsigned, Exps&, std::uint64_t)> walk = [&](unsigned n, Exps& e, std::uint64_t d) {
        if (n == N) {
            by_degree_[d].push_back(e);
            return;
        }
        std::uint64_t g = generator_degree(p, n + 1);
        for (unsigned k = 0; d + k * g <= T; ++k) {
            e[n] = static_cast<std::uint8_t>(k);
            walk(n + 1, e, d + k * g);
        }
        e[n] = 0;
    };
    Exps e{};
    walk(0, e, 0);
    for (auto& list : by_degree_)
        std::sort(list.begin(), list.end());

    auto pw = [&](std::uint64_t e) {
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < e; ++i)
            r *= p;
        return r;
    };

    // Log coefficients: p m_n = Σ_{i<n} m_i v_{n-i}^{p^i}.
    log_.push_back(rat_constant(1));
    for (unsigned n = 1; n <= N; ++n) {
        RatPoly m;
        for (unsigned i = 0; i < n; ++i)
            rat_add_to(m, rat_mul(log_[i], rat_pow(rat_generator(kV, n - i), pw(i), p, T), p, T));
        for (auto& [mono, c] : m)
            c /= p;
        log_.push_back(std::move(m));
    }

    // η_R(m_n) = Σ_{i+j=n} m_i t_j^{p^i}.
    std::vector<RatPoly> eta_log(N + 1);
    for (unsigned n = 0; n <= N; ++n)
        for (unsigned i = 0; i <= n; ++i)
            rat_add_to(eta_log[n], rat_mul(log_[i], rat_pow(rat_generator(kT, n - i), pw(i), p, T), p, T));

    // η_R(v_n) = p η_R(m_n) − Σ_{1<=i<n} η_R(m_i) η_R(v_{n-i})^{p^i}.
    eta_.push_back(rat_constant(1));
    for (unsigned n = 1; n <= N; ++n) {
        RatPoly v;
        rat_add_to(v, eta_log[n], mpq_class(p));
        for (unsigned i = 1; i < n; ++i)
            rat_add_to(v, rat_mul(eta_log[i], rat_pow(eta_[n - i], pw(i), p, T), p, T), -1);
        for (const auto& [mono, c] : v)
            to_residue(ring_, c, "right unit");
        eta_.push_back(std::move(v));
    }

    // Δ(t_n) = Σ_{i+j+k=n} m_i t_j^{p^i} ⊗ t_k^{p^{i+j}} − Σ_{i>=1} m_i Δ(t_{n-i})^{p^i}.
    delta_.push_back(rat_constant(1));
    for (unsigned n = 1; n <= N; ++n) {
        RatPoly d;
        for (unsigned i = 0; i <= n; ++i)
            for (unsigned j = 0; i + j <= n; ++j) {
                unsigned k = n - i - j;
                RatPoly term = rat_mul(log_[i], rat_pow(rat_generator(kT, j), pw(i), p, T), p, T);
                term = rat_mul(term, rat_pow(rat_generator(kT2, k), pw(i + j), p, T), p, T);
                rat_add_to(d, term);
            }
        for (unsigned i = 1; i <= n; ++i)
            rat_add_to(d, rat_mul(log_[i], rat_pow(delta_[n - i], pw(i), p, T), p, T), -1);
        for (const auto& [mono, c] : d)
            to_residue(ring_, c, "coproduct");
        delta_.push_back(std::move(d));
    }

    // Integral tables for every monomial of the window, built multiplicatively
    // mod p^K from the generator images.
    const Zpk& R = ring_;
    using Key3 = std::array<Exps, 3>;
    auto mul_tables = [&](const std::map<Key3, Residue>& a, const std::map<Key3, Residue>& b) {
        std::map<Key3, Residue> out;
        for (const auto& [ka, ca] : a) {
            std::uint64_t da = degree(p, ka[0]) + degree(p, ka[1]) + degree(p, ka[2]);
            for (const auto& [kb, cb] : b) {
                if (da + degree(p, kb[0]) + degree(p, kb[1]) + degree(p, kb[2]) > T)
                    continue;
                Key3 k{add(ka[0], kb[0]), add(ka[1], kb[1]), add(ka[2], kb[2])};
                Residue& slot = out[k];
                slot = R.add(slot, R.mul(ca, cb));
            }
        }
        std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
        return out;
    };
    auto table_of = [&](const RatPoly& x) {
        std::map<Key3, Residue> out;
        for (const auto& [m, c] : x) {
            Residue r = to_residue(R, c, "table");
            if (r)
                out[Key3{m.g[0], m.g[1], m.g[2]}] = r;
        }
        return out;
    };
    std::vector<std::map<Key3, Residue>> eta_gen(N + 1), delta_gen(N + 1);
    for (unsigned n = 1; n <= N; ++n) {
        eta_gen[n] = table_of(eta_[n]);
        delta_gen[n] = table_of(delta_[n]);
    }
    std::map<Exps, std::map<Key3, Residue>> eta_full, delta_full;
    for (unsigned d = 0; d <= T; ++d)
        for (const Exps& a : by_degree_[d]) {
            if (is_one(a)) {
                eta_full[a] = {{Key3{}, 1}};
                delta_full[a] = {{Key3{}, 1}};
            }
            else {
                unsigned n = 0;
                while (a[n] == 0)
                    ++n;
                Exps rest = a;
                --rest[n];
                eta_full[a] = mul_tables(eta_full.at(rest), eta_gen[n + 1]);
                delta_full[a] = mul_tables(delta_full.at(rest), delta_gen[n + 1]);
            }
            auto& et = eta_table_[a];
            for (const auto& [k, c] : eta_full[a])
                et.push_back({c, k[0], k[1]});
            auto& dt = delta_table_[a];
            auto& bt = bar_table_[a];
            for (const auto& [k, c] : delta_full[a]) {
                dt.push_back({c, k[0], k[1], k[2]});
                if (is_one(k[0]) && c % p != 0)
                    bt.push_back({static_cast<Residue>(c % p), k[1], k[2]});
            }
        }
}

const std::vector<Exps>& HopfStructureMaps::monomials(unsigned deg) const
{
    static const std::vector<Exps> empty;
    return deg < by_degree_.size() ? by_degree_[deg] : empty;
}

const RatPoly& HopfStructureMaps::log_coefficient(unsigned n) const
{
    if (n > w_.N)
        throw InvalidArgument("log coefficient index " + std::to_string(n) + " outside window");
    return log_[n];
}

const RatPoly& HopfStructureMaps::right_unit_exact(unsigned n) const
{
    if (n < 1 || n > w_.N)
        throw InvalidArgument("right unit index " + std::to_string(n) + " outside window");
    return eta_[n];
}

const RatPoly& HopfStructureMaps::coproduct_exact(unsigned n) const
{
    if (n > w_.N)
        throw InvalidArgument("coproduct index " + std::to_string(n) + " outside window");
    return delta_[n];
}

const std::vector<RightUnitTerm>& HopfStructureMaps::right_unit(const Exps& alpha) const
{
    auto it = eta_table_.find(alpha);
    if (it == eta_table_.end())
        throw InvalidArgument("right unit: monomial outside window");
    return it->second;
}

const std::vector<CoproductTerm>& HopfStructureMaps::coproduct(const Exps& beta) const
{
    auto it = delta_table_.find(beta);
    if (it == delta_table_.end())
        throw InvalidArgument("coproduct: monomial outside window");
    return it->second;
}

const std::vector<BarCoproductTerm>& HopfStructureMaps::bar_coproduct(const Exps& beta) const
{
    auto it = bar_table_.find(beta);
    if (it == bar_table_.end())
        throw InvalidArgument("mod-I coproduct: monomial outside window");
    return it->second;
}

std::vector<GrCoactionTerm> HopfStructureMaps::gr_coaction(unsigned n) const
{
    if (n > w_.N)
        throw InvalidArgument("coaction index " + std::to_string(n) + " outside window");
    if (n == 0)
        return {{1, 0, Exps{}}};
    const unsigned p = w_.p;
    std::vector<GrCoactionTerm> out;
    for (const auto& [m, c] : eta_[n]) {
        unsigned nu = p_valuation(c, p), len = length(m.g[kV]);
        if (nu + len != 1)
            continue;
        mpz_class unit = c.get_num();
        unsigned q = 0;
        if (nu == 1)
            unit /= p;
        else
            while (m.g[kV][q] == 0)
                ++q;
        mpz_class r = unit % p;
        if (r < 0)
            r += p;
        out.push_back({static_cast<Residue>(r.get_ui()), nu == 1 ? 0u : q + 1, m.g[kT]});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.q_index, a.t) < std::tie(b.q_index, b.t);
    });
    return out;
}

RatPoly HopfStructureMaps::apply_right_unit(const RatPoly& x, Group into) const
{
    const unsigned p = w_.p, T = w_.t_max;
    RatPoly out;
    for (const auto& [m, c] : x) {
        RatPoly img = rat_constant(c);
        for (unsigned n = 0; n < w_.N; ++n)
            if (m.g[kV][n])
                img = rat_mul(img, rat_pow(relabel(eta_[n + 1], kT, into), m.g[kV][n], p, T), p, T);
        Mono rest = m;
        rest.g[kV] = Exps{};
        rat_add_to(out, rat_mul(img, RatPoly{{rest, mpq_class(1)}}, p, T));
    }
    return out;
}

RatPoly HopfStructureMaps::apply_coproduct(const RatPoly& x, Group from) const
{
    if (from == kV || from == kT3)
        throw InvalidArgument("apply_coproduct: group must be a t-group with room to split");
    const unsigned p = w_.p, T = w_.t_max;
    RatPoly out;
    for (const auto& [m, c] : x) {
        // Δ(t^β) with factors relabelled into (from, from+1).
        RatPoly img = rat_constant(1);
        for (unsigned n = 0; n < w_.N; ++n)
            if (m.g[from][n]) {
                RatPoly dn = relabel(relabel(delta_[n + 1], kT2, Group(from + 1)), kT, from);
                img = rat_mul(img, rat_pow(dn, m.g[from][n], p, T), p, T);
            }
        // New v's sit left of slot `from`; push them through earlier slots.
        for (unsigned slot = from - 1; slot >= kT; --slot)
            img = apply_right_unit(img, Group(slot));
        Mono rest{};
        rest.g[kV] = m.g[kV];
        for (unsigned g = kT; g < from; ++g)
            rest.g[g] = m.g[g];
        for (unsigned g = from + 1; g + 1 < 4; ++g)
            rest.g[g + 1] = m.g[g];
        rat_add_to(out, rat_mul(img, RatPoly{{rest, c}}, p, T));
    }
    return out;
}

bool AxiomReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

AxiomReport check_axioms(const HopfStructureMaps& maps)
{
    const auto& w = maps.window();
    const unsigned p = w.p, T = w.t_max, N = w.N;
    AxiomReport rep;
    auto add = [&](std::string name, bool pass, std::string detail = {}) {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    for (unsigned n = 1; n <= N; ++n) {
        const std::string tag = "n=" + std::to_string(n);
        const RatPoly& d = maps.coproduct_exact(n);
        const RatPoly tn = rat_generator(kT, n);

        // Counit on either side.
        RatPoly left, right;
        for (const auto& [m, c] : d) {
            if (is_one(m.g[kT])) {
                Mono k = m;
                k.g[kT] = m.g[kT2];
                k.g[kT2] = Exps{};
                rat_add_to(left, RatPoly{{k, c}});
            }
            if (is_one(m.g[kT2]))
                rat_add_to(right, RatPoly{{m, c}});
        }
        add("counit " + tag, left == tn && right == tn);

        // Coassociativity.
        RatPoly a = maps.apply_coproduct(d, kT), b = maps.apply_coproduct(d, kT2);
        add("coassociativity " + tag, a == b, std::to_string(a.size()) + " terms");

        // η_R applied to m_n through the ring map agrees with Σ m_i t_j^{p^i}.
        RatPoly lhs = maps.apply_right_unit(maps.log_coefficient(n), kT), rhs;
        std::uint64_t q = 1;
        for (unsigned i = 0; i <= n; ++i) {
            rat_add_to(rhs, rat_mul(maps.log_coefficient(i), rat_pow(rat_generator(kT, n - i), q, p, T), p, T));
            q *= p;
        }
        add("right unit is a ring map on m_" + std::to_string(n), lhs == rhs);

        // Δ∘η_R = η_R pushed into the first slot.
        const RatPoly& e = maps.right_unit_exact(n);
        RatPoly de = maps.apply_coproduct(e, kT);
        RatPoly shifted;
        for (const auto& [m, c] : e) {
            Mono k = m;
            k.g[kT2] = m.g[kT];
            k.g[kT] = Exps{};
            rat_add_to(shifted, RatPoly{{k, c}});
        }
        add("coproduct of right unit " + tag, de == maps.apply_right_unit(shifted, kT));

        // I is invariant and η_R(v_n) ≡ v_n mod I_{n-1}.
        bool in_I = true, congruent = true;
        RatPoly diff = e;
        rat_add_to(diff, rat_generator(kV, n), -1);
        for (const auto& [m, c] : e)
            if (p_valuation(c, p) + length(m.g[kV]) < 1)
                in_I = false;
        for (const auto& [m, c] : diff) {
            bool low_v = false;
            for (unsigned j = 0; j + 1 < n; ++j)
                low_v |= m.g[kV][j] > 0;
            if (p_valuation(c, p) == 0 && !low_v)
                congruent = false;
        }
        add("I invariant under right unit " + tag, in_I);
        add("right unit congruence mod I_{n-1} " + tag, congruent);
    }

    // Ring-map property on products: η_R(v_a v_b) via the integral table
    // equals the product of the exact images.
    const Zpk& R = maps.ring();
    for (unsigned a = 1; a <= N; ++a)
        for (unsigned b = a; b <= N; ++b) {
            if (generator_degree(p, a) + generator_degree(p, b) > T)
                continue;
            RatPoly prod = rat_mul(maps.right_unit_exact(a), maps.right_unit_exact(b), p, T);
            Exps ab{};
            ++ab[a - 1];
            ++ab[b - 1];
            std::map<std::pair<Exps, Exps>, Residue> tab, ref;
            for (const auto& t : maps.right_unit(ab))
                tab[{t.v, t.t}] = t.coeff;
            for (const auto& [m, c] : prod) {
                mpz_class r = c.get_num() % static_cast<unsigned long>(R.modulus());
                if (r < 0)
                    r += static_cast<unsigned long>(R.modulus());
                if (r != 0)
                    ref[{m.g[kV], m.g[kT]}] = static_cast<Residue>(r.get_ui());
            }
            add("right unit multiplicative on v_" + std::to_string(a) + " v_" + std::to_string(b), tab == ref);
        }
    return rep;
}

}  // namespace algnov
