#include "algnov/cobar.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace algnov {

namespace {

void append_key(std::string& key, const Exps& e, unsigned N)
{
    for (unsigned n = 0; n < N; ++n)
        key.push_back(static_cast<char>(e[n]));
}

std::string key_of(const CobarElement& e, unsigned N)
{
    std::string key;
    key.reserve((e.word.size() + 1) * N);
    append_key(key, e.coeff, N);
    for (const auto& b : e.word)
        append_key(key, b, N);
    return key;
}

// Appends every element with a coefficient of degree d_coeff accepted by
// keep, followed by all words of s nonzero monomials of the remaining degree.
void enumerate(const HopfStructureMaps& maps, unsigned s, unsigned t,
               const std::function<bool(const Exps&)>& keep, std::vector<CobarElement>& out)
{
    std::vector<Exps> word(s);
    std::function<void(const Exps&, unsigned, unsigned)> fill = [&](const Exps& coeff, unsigned k, unsigned rest) {
        if (k == s) {
            if (rest == 0)
                out.push_back({coeff, word});
            return;
        }
        if (k + 1 == s) {
            for (const auto& b : maps.monomials(rest))
                if (rest > 0) {
                    word[k] = b;
                    out.push_back({coeff, word});
                }
            return;
        }
        for (unsigned d = 2; d + 2 * (s - k - 1) <= rest; d += 2)
            for (const auto& b : maps.monomials(d)) {
                word[k] = b;
                fill(coeff, k + 1, rest - d);
            }
    };
    for (unsigned da = 0; da <= t; da += 2)
        for (const auto& a : maps.monomials(da))
            if (keep(a))
                fill(a, 0, t - da);
}

void check_window(const HopfStructureMaps& maps, unsigned t)
{
    if (t > maps.window().t_max)
        throw InvalidArgument("cobar: internal degree " + std::to_string(t) + " exceeds t_max " +
                              std::to_string(maps.window().t_max));
}

struct Accum {
    std::vector<std::pair<std::string, Residue>> terms;

    void add(std::string&& k, Residue c)
    {
        if (c)
            terms.emplace_back(std::move(k), c);
    }
    // Merges, drops zeros, and resolves keys to column indices.
    SparseVec finish(const Zpk& R, const std::unordered_map<std::string, std::uint32_t>& index)
    {
        std::vector<std::pair<std::uint32_t, Residue>> cols;
        cols.reserve(terms.size());
        for (auto& [k, c] : terms) {
            auto it = index.find(k);
            if (it == index.end())
                throw ConsistencyError("cobar: differential produced a term outside the target basis");
            cols.emplace_back(it->second, c);
        }
        std::sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseVec v;
        for (std::size_t i = 0; i < cols.size();) {
            std::uint32_t c = cols[i].first;
            Residue sum = 0;
            for (; i < cols.size() && cols[i].first == c; ++i)
                sum = R.add(sum, cols[i].second);
            if (sum)
                v.push(c, sum);
        }
        terms.clear();
        return v;
    }
};

// Pushing a coefficient v^μ sitting left of slot k to the far left: a sum of
// c · v^ν [w_1|...|w_{k-1}] where the w's multiply into slots 1..k-1.
struct PushTerm {
    Residue coeff;
    Exps v;
    std::vector<Exps> w;
};

class Pusher {
  public:
    explicit Pusher(const HopfStructureMaps& maps) : maps_(maps) {}

    const std::vector<PushTerm>& push(unsigned k, const Exps& mu)
    {
        auto key = std::make_pair(k, mu);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        std::vector<PushTerm> out;
        if (k == 1)
            out.push_back({1, mu, {}});
        else {
            const Zpk& R = maps_.ring();
            std::map<std::pair<Exps, std::vector<Exps>>, Residue> acc;
            for (const auto& e : maps_.right_unit(mu)) {
                const auto& inner = push(k - 1, e.v);
                for (const auto& pt : inner) {
                    std::vector<Exps> w = pt.w;
                    w.push_back(e.t);
                    Residue& slot = acc[{pt.v, std::move(w)}];
                    slot = R.add(slot, R.mul(e.coeff, pt.coeff));
                }
            }
            for (auto& [kv, c] : acc)
                if (c)
                    out.push_back({c, kv.first, kv.second});
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

  private:
    const HopfStructureMaps& maps_;
    std::map<std::pair<unsigned, Exps>, std::vector<PushTerm>> memo_;
};

}  // namespace

std::string to_string(const CobarElement& e, unsigned N, bool graded, unsigned weight)
{
    std::ostringstream os;
    auto mono = [&](const Exps& m, const char* sym) {
        bool any = false;
        for (unsigned n = 0; n < N; ++n)
            if (m[n]) {
                if (any)
                    os << ' ';
                os << sym << n + 1;
                if (m[n] > 1)
                    os << '^' << unsigned(m[n]);
                any = true;
            }
        return any;
    };
    bool any = false;
    if (graded) {
        unsigned q0 = weight - length(e.coeff);
        if (q0) {
            os << "q0";
            if (q0 > 1)
                os << '^' << q0;
            any = true;
        }
        if (any && !is_one(e.coeff))
            os << ' ';
        any |= mono(e.coeff, "q");
    }
    else
        any = mono(e.coeff, "v");
    if (!any && e.word.empty())
        os << '1';
    if (!e.word.empty()) {
        os << '[';
        for (std::size_t k = 0; k < e.word.size(); ++k) {
            if (k)
                os << '|';
            mono(e.word[k], "t");
        }
        os << ']';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Integral complex

CobarComplex::CobarComplex(std::shared_ptr<const HopfStructureMaps> maps) : maps_(std::move(maps)) {}

std::uint64_t CobarComplex::dimension(unsigned s, unsigned t) const
{
    check_window(*maps_, t);
    // words[j][d]: number of j-letter words of degree d.
    std::vector<std::vector<std::uint64_t>> words(s + 1, std::vector<std::uint64_t>(t + 1, 0));
    words[0][0] = 1;
    for (unsigned j = 1; j <= s; ++j)
        for (unsigned d = 0; d <= t; ++d)
            for (unsigned e = 2; e <= d; ++e)
                words[j][d] += words[j - 1][d - e] * maps_->monomials(e).size();
    std::uint64_t total = 0;
    for (unsigned da = 0; da <= t; ++da)
        total += maps_->monomials(da).size() * words[s][t - da];
    return total;
}

const CobarComplex::Cached& CobarComplex::cached(unsigned s, unsigned t) const
{
    check_window(*maps_, t);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find({s, t});
        if (it != cache_.end())
            return *it->second;
    }
    auto c = std::make_shared<Cached>();
    enumerate(*maps_, s, t, [](const Exps&) { return true; }, c->basis);
    const unsigned N = maps_->window().N;
    c->index.reserve(c->basis.size());
    for (std::uint32_t i = 0; i < c->basis.size(); ++i)
        c->index.emplace(key_of(c->basis[i], N), i);
    std::lock_guard lock(mu_);
    return *cache_.emplace(std::make_pair(s, t), std::move(c)).first->second;
}

const std::vector<CobarElement>& CobarComplex::basis(unsigned s, unsigned t) const { return cached(s, t).basis; }

std::uint32_t CobarComplex::index_of(unsigned s, unsigned t, const CobarElement& e) const
{
    const auto& c = cached(s, t);
    auto it = c.index.find(key_of(e, maps_->window().N));
    if (it == c.index.end())
        throw InvalidArgument("cobar: element not in basis");
    return it->second;
}

std::vector<unsigned> CobarComplex::valuations(unsigned s, unsigned t) const
{
    std::vector<unsigned> out;
    for (const auto& e : basis(s, t))
        out.push_back(length(e.coeff));
    return out;
}

SparseMatrix CobarComplex::differential(unsigned s, unsigned t) const
{
    const auto& src = cached(s, t);
    const auto& dst = cached(s + 1, t);
    const Zpk& R = ring();
    const unsigned N = maps_->window().N;
    Pusher pusher(*maps_);

    SparseMatrix m;
    m.cols = static_cast<std::uint32_t>(dst.basis.size());
    m.rows.reserve(src.basis.size());
    Accum acc;
    std::string key;
    for (const auto& x : src.basis) {
        // δ^0
        for (const auto& e : maps_->right_unit(x.coeff)) {
            if (is_one(e.t))
                continue;
            key.clear();
            append_key(key, e.v, N);
            append_key(key, e.t, N);
            for (const auto& b : x.word)
                append_key(key, b, N);
            acc.add(std::string(key), e.coeff);
        }
        // δ^k, sign (-1)^k
        for (unsigned k = 1; k <= s; ++k) {
            for (const auto& c : maps_->coproduct(x.word[k - 1])) {
                if (is_one(c.left) || is_one(c.right))
                    continue;
                Residue base = (k & 1u) ? R.neg(c.coeff) : c.coeff;
                for (const auto& pt : pusher.push(k, c.v)) {
                    key.clear();
                    append_key(key, add(x.coeff, pt.v), N);
                    for (unsigned j = 0; j + 1 < k; ++j)
                        append_key(key, add(x.word[j], pt.w[j]), N);
                    append_key(key, c.left, N);
                    append_key(key, c.right, N);
                    for (unsigned j = k; j < s; ++j)
                        append_key(key, x.word[j], N);
                    acc.add(std::string(key), R.mul(base, pt.coeff));
                }
            }
        }
        m.rows.push_back(acc.finish(R, dst.index));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Associated graded complex

GrCobarComplex::GrCobarComplex(std::shared_ptr<const HopfStructureMaps> maps)
    : maps_(std::move(maps)), field_(maps_->window().p, 1)
{
}

const GrCobarComplex::Cached& GrCobarComplex::cached(unsigned s, unsigned i, unsigned t) const
{
    check_window(*maps_, t);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find({s, i, t});
        if (it != cache_.end())
            return *it->second;
    }
    auto c = std::make_shared<Cached>();
    enumerate(*maps_, s, t, [i](const Exps& a) { return length(a) <= i; }, c->basis);
    const unsigned N = maps_->window().N;
    c->index.reserve(c->basis.size());
    for (std::uint32_t k = 0; k < c->basis.size(); ++k)
        c->index.emplace(key_of(c->basis[k], N), k);
    std::lock_guard lock(mu_);
    return *cache_.emplace(std::make_tuple(s, i, t), std::move(c)).first->second;
}

const std::vector<CobarElement>& GrCobarComplex::basis(unsigned s, unsigned i, unsigned t) const
{
    return cached(s, i, t).basis;
}

std::uint32_t GrCobarComplex::index_of(unsigned s, unsigned i, unsigned t, const CobarElement& e) const
{
    const auto& c = cached(s, i, t);
    auto it = c.index.find(key_of(e, maps_->window().N));
    if (it == c.index.end())
        throw InvalidArgument("gr cobar: element not in basis");
    return it->second;
}

SparseMatrix GrCobarComplex::differential(unsigned s, unsigned i, unsigned t) const
{
    const auto& src = cached(s, i, t);
    const auto& dst = cached(s + 1, i, t);
    const Zpk& F = field_;
    const unsigned p = maps_->window().p, N = maps_->window().N, T = maps_->window().t_max;

    // ψ(q_n) for n = 1..N, as (coeff, q-index, t̄-monomial).
    std::vector<std::vector<GrCoactionTerm>> psi(N + 1);
    for (unsigned n = 1; n <= N; ++n)
        psi[n] = maps_->gr_coaction(n);

    // ψ of the q_1..q_N part; q_0 is primitive.  Keys: (q_1..q_N exps, t̄).
    std::map<Exps, std::map<std::pair<Exps, Exps>, Residue>> memo;
    std::function<const std::map<std::pair<Exps, Exps>, Residue>&(const Exps&)> coact =
        [&](const Exps& a) -> const std::map<std::pair<Exps, Exps>, Residue>& {
        auto it = memo.find(a);
        if (it != memo.end())
            return it->second;
        std::map<std::pair<Exps, Exps>, Residue> out;
        if (is_one(a))
            out[{Exps{}, Exps{}}] = 1;
        else {
            unsigned n = 0;
            while (a[n] == 0)
                ++n;
            Exps rest = a;
            --rest[n];
            for (const auto& [k, c] : coact(rest))
                for (const auto& term : psi[n + 1]) {
                    Exps q = k.first;
                    if (term.q_index > 0)
                        ++q[term.q_index - 1];
                    Exps tb = add(k.second, term.t);
                    if (degree(p, q) + degree(p, tb) > T)
                        continue;
                    Residue& slot = out[{q, tb}];
                    slot = F.add(slot, F.mul(c, term.coeff));
                }
            std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
        }
        return memo.emplace(a, std::move(out)).first->second;
    };

    SparseMatrix m;
    m.cols = static_cast<std::uint32_t>(dst.basis.size());
    m.rows.reserve(src.basis.size());
    Accum acc;
    std::string key;
    for (const auto& x : src.basis) {
        for (const auto& [k, c] : coact(x.coeff)) {
            if (is_one(k.second))
                continue;
            key.clear();
            append_key(key, k.first, N);
            append_key(key, k.second, N);
            for (const auto& b : x.word)
                append_key(key, b, N);
            acc.add(std::string(key), c);
        }
        for (unsigned k = 1; k <= s; ++k)
            for (const auto& c : maps_->bar_coproduct(x.word[k - 1])) {
                if (is_one(c.left) || is_one(c.right))
                    continue;
                key.clear();
                append_key(key, x.coeff, N);
                for (unsigned j = 0; j + 1 < k; ++j)
                    append_key(key, x.word[j], N);
                append_key(key, c.left, N);
                append_key(key, c.right, N);
                for (unsigned j = k; j < s; ++j)
                    append_key(key, x.word[j], N);
                acc.add(std::string(key), (k & 1u) ? F.neg(c.coeff) : c.coeff);
            }
        m.rows.push_back(acc.finish(F, dst.index));
    }
    return m;
}

std::size_t GrCobarComplex::cohomology_dimension(unsigned s, unsigned i, unsigned t) const
{
    std::size_t n = basis(s, i, t).size();
    std::size_t out_rank = sparse_rank(field_, differential(s, i, t));
    std::size_t in_rank = s == 0 ? 0 : sparse_rank(field_, differential(s - 1, i, t));
    return n - out_rank - in_rank;
}

}  // namespace algnov
