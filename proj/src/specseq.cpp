#include "algnov/specseq.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace algnov {

namespace {

bool all_zero(const std::vector<Residue>& v)
{
    return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

std::vector<Residue> apply(const Zpk& R, std::span<const Residue> x, const ModPkMatrix& d)
{
    std::vector<Residue> y(d.cols(), 0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        if (x[r] == 0)
            continue;
        auto row = d.row(r);
        for (std::size_t c = 0; c < y.size(); ++c)
            if (row[c])
                y[c] = R.add(y[c], R.mul(x[r], row[c]));
    }
    return y;
}

unsigned clamp_level(long level, unsigned K)
{
    return static_cast<unsigned>(std::clamp<long>(level, 0, K));
}

}  // namespace

std::size_t fp_rank(const ModPkMatrix& m)
{
    if (m.ring().precision() != 1)
        throw InvalidArgument("fp_rank: requires a field");
    if (m.ring().prime() == 2) {
        F2Matrix bits(m.rows(), m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m.at(r, c))
                    bits.flip(r, c);
        return bits.rank();
    }
    FpEchelon e(m.ring());
    for (std::size_t r = 0; r < m.rows(); ++r)
        e.insert(std::vector<Residue>(m.row(r).begin(), m.row(r).end()), false);
    return e.rank();
}

// ---------------------------------------------------------------------------
// Sources and reduction

ComplexSource cobar_source(const CobarComplex& cobar, unsigned t, unsigned top)
{
    ComplexSource src;
    src.ring = cobar.ring();
    src.top = top;
    src.weights = [&cobar, t](unsigned s) { return cobar.valuations(s, t); };
    src.differential = [&cobar, t](unsigned s) { return cobar.differential(s, t); };
    return src;
}

FilteredComplex densify(const ComplexSource& src)
{
    FilteredComplex c;
    c.ring = src.ring;
    for (unsigned s = 0; s <= src.top; ++s)
        c.weights.push_back(src.weights(s));
    for (unsigned s = 0; s < src.top; ++s) {
        SparseMatrix m = src.differential(s);
        if (m.rows.size() != c.weights[s].size() || m.cols != c.weights[s + 1].size())
            throw InvalidArgument("densify: differential shape does not match the bases");
        c.d.push_back(m.to_dense(src.ring));
    }
    return c;
}

Reduction reduce(const ComplexSource& src, bool full_maps)
{
    const Zpk& R = src.ring;
    const unsigned top = src.top;
    enum : std::uint8_t { kSurvivor = 0, kPivotRow = 1, kPivotCol = 2 };

    std::vector<std::vector<unsigned>> w(top + 1);
    for (unsigned s = 0; s <= top; ++s)
        w[s] = src.weights(s);
    std::vector<std::vector<std::uint8_t>> state(top + 1);
    for (unsigned s = 0; s <= top; ++s)
        state[s].assign(w[s].size(), kSurvivor);

    Reduction out;
    out.survivors.resize(top + 1);
    out.include.resize(top + 1);
    out.project.resize(top + 1);
    out.reduced.ring = R;
    out.reduced.weights.resize(top + 1);
    for (unsigned s = 0; s <= top; ++s)
        out.original_rank.push_back(w[s].size());

    Elimination prev;  // elimination of d_{s-1}
    for (unsigned s = 0; s <= top; ++s) {
        Elimination cur;
        if (s < top) {
            SparseMatrix d = src.differential(s);
            if (d.rows.size() != w[s].size() || d.cols != w[s + 1].size())
                throw InvalidArgument("reduce: differential shape does not match the bases");
            for (std::size_t r = 0; r < d.rows.size(); ++r)
                if (state[s][r] == kPivotCol)
                    d.rows[r] = SparseVec{};
            const auto& ws = w[s];
            const auto& wt = w[s + 1];
            cur = eliminate(
                R, std::move(d),
                [&](std::uint32_t r, std::uint32_t c, Residue v) { return R.is_unit(v) && ws[r] == wt[c]; },
                EliminationOptions{.keep_pivot_rows = full_maps || s + 1 < top,
                                   .track_transform = full_maps || s + 1 < top});
            for (auto [r, c] : cur.pivots) {
                state[s][r] = kPivotRow;
                state[s + 1][c] = kPivotCol;
            }
        }

        // Degree s is now fully classified.
        std::vector<std::uint32_t> local(w[s].size(), UINT32_MAX);
        auto& surv = out.survivors[s];
        for (std::uint32_t e = 0; e < w[s].size(); ++e)
            if (state[s][e] == kSurvivor) {
                local[e] = static_cast<std::uint32_t>(surv.size());
                surv.push_back(e);
                out.reduced.weights[s].push_back(w[s][e]);
            }

        for (std::uint32_t e : surv) {
            if (s < top && (full_maps || s + 1 < top))
                out.include[s].push_back(std::move(cur.transform[e]));
            else if (s + 1 == top)
                out.include[s].emplace_back();
            else {
                SparseVec u;
                u.push(e, 1 % R.modulus());
                out.include[s].push_back(std::move(u));
            }
        }

        // Projection: survivors are fixed, pivot rows die, and a cancelled
        // column c of the previous step is rewritten through its pivot row
        // -u·c = Σ_{y≠c} a_y y (mod the cancelled boundary), latest first.
        auto& proj = out.project[s];
        proj.assign(w[s].size(), SparseVec{});
        for (std::uint32_t e : surv)
            proj[e].push(local[e], 1 % R.modulus());
        if (s > 0) {
            const std::size_t n = surv.size();
            std::vector<Residue> acc(n);
            for (std::size_t k = full_maps || s < top ? prev.pivots.size() : 0; k-- > 0;) {
                std::uint32_t c = prev.pivots[k].second;
                const SparseVec& row = prev.pivot_rows[k];
                Residue minus_inv = R.neg(R.inverse(row.get(c)));
                std::fill(acc.begin(), acc.end(), 0);
                for (std::size_t q = 0; q < row.size(); ++q) {
                    std::uint32_t y = row.idx[q];
                    if (y == c)
                        continue;
                    const SparseVec& py = proj[y];
                    Residue f = R.mul(minus_inv, row.val[q]);
                    for (std::size_t z = 0; z < py.size(); ++z)
                        acc[py.idx[z]] = R.add(acc[py.idx[z]], R.mul(f, py.val[z]));
                }
                for (std::uint32_t z = 0; z < n; ++z)
                    if (acc[z])
                        proj[c].push(z, acc[z]);
            }

            // Reduced d_{s-1}: surviving rows, surviving columns.
            const auto& prev_surv = out.survivors[s - 1];
            ModPkMatrix dm(R, prev_surv.size(), n);
            for (std::size_t a = 0; a < prev_surv.size(); ++a) {
                const SparseVec& row = prev.reduced.rows[prev_surv[a]];
                for (std::size_t q = 0; q < row.size(); ++q) {
                    std::uint32_t c = row.idx[q];
                    if (state[s][c] == kSurvivor)
                        dm.row(a)[local[c]] = row.val[q];
                    else if (state[s][c] == kPivotCol)
                        throw ConsistencyError("reduce: surviving row meets a cancelled column");
                }
            }
            out.reduced.d.push_back(std::move(dm));
        }
        cur.transform.clear();
        cur.transform.shrink_to_fit();
        prev = std::move(cur);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectral sequence

struct SpectralSequence::E1Data {
    explicit E1Data(Zpk f) : coords(f) {}
    FpEchelon coords;                        ///< boundaries untagged, then cocycle representatives tagged
    std::vector<std::vector<Residue>> reps;  ///< gr^i cocycle for each E_1 basis element
};

struct SpectralSequence::PageData {
    explicit PageData(Zpk f) : coords(f) {}
    PageBasis basis;
    FpEchelon coords;  ///< B_r untagged, then the basis classes tagged
};

SpectralSequence::SpectralSequence(FilteredComplex c) : c_(std::move(c)), field_(c_.ring.prime(), 1)
{
    if (c_.weights.empty())
        throw InvalidArgument("SpectralSequence: empty complex");
    if (c_.d.size() != c_.top())
        throw InvalidArgument("SpectralSequence: need one differential per degree below the top");
    for (unsigned s = 0; s < c_.top(); ++s) {
        const auto& d = c_.d[s];
        if (d.rows() != c_.rank(s) || d.cols() != c_.rank(s + 1) || !(d.ring() == c_.ring))
            throw InvalidArgument("SpectralSequence: differential shape mismatch");
    }
    for (const auto& ws : c_.weights)
        for (unsigned w : ws)
            max_weight_ = std::max(max_weight_, w + c_.ring.precision() - 1);
}

std::vector<Residue> SpectralSequence::graded(unsigned s, unsigned i, std::span<const Residue> x) const
{
    const Zpk& R = c_.ring;
    const unsigned K = R.precision();
    const auto& ws = c_.weights.at(s);
    std::vector<Residue> out;
    for (std::size_t b = 0; b < ws.size(); ++b) {
        if (ws[b] > i)
            continue;
        unsigned j = i - ws[b];
        if (j >= K) {
            if (x[b] != 0)
                throw ConsistencyError("graded: element is not in the requested filtration");
            continue;
        }
        if (R.valuation(x[b]) < j)
            throw ConsistencyError("graded: element is not in the requested filtration");
        out.push_back((x[b] / R.pow_p(j)) % R.prime());
    }
    return out;
}

const SpectralSequence::E1Data& SpectralSequence::e1(unsigned s, unsigned i)
{
    std::lock_guard lock(mu_);
    auto key = std::make_pair(s, i);
    if (auto it = e1_.find(key); it != e1_.end())
        return *it->second;

    const Zpk& R = c_.ring;
    const unsigned K = R.precision();
    // gr^i generators p^{i-w} e of degree s, as module elements.
    auto generators = [&](unsigned deg) {
        std::vector<std::vector<Residue>> g;
        const auto& ws = c_.weights[deg];
        for (std::size_t b = 0; b < ws.size(); ++b)
            if (ws[b] <= i && i - ws[b] < K) {
                std::vector<Residue> x(ws.size(), 0);
                x[b] = R.pow_p(i - ws[b]);
                g.push_back(std::move(x));
            }
        return g;
    };
    auto here = generators(s);
    const std::size_t n = here.size();

    auto data = std::make_shared<E1Data>(field_);
    if (s > 0)
        for (const auto& y : generators(s - 1))
            data->coords.insert(graded(s, i, apply(R, y, c_.d[s - 1])), false);

    std::vector<std::vector<Residue>> cocycles;
    if (s < c_.top()) {
        std::size_t m = 0;
        std::vector<std::vector<Residue>> rows;
        for (const auto& x : here) {
            rows.push_back(graded(s + 1, i, apply(R, x, c_.d[s])));
            m = rows.back().size();
        }
        if (n > 0 && m > 0) {
            ModPkMatrix g(field_, n, m);
            for (std::size_t r = 0; r < n; ++r)
                std::copy(rows[r].begin(), rows[r].end(), g.row(r).begin());
            const SubmoduleBasis kb = kernel_basis(g);
            const ModPkMatrix& ker = kb.generators();
            for (std::size_t r = 0; r < ker.rows(); ++r)
                cocycles.emplace_back(ker.row(r).begin(), ker.row(r).end());
        }
        else
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<Residue> u(n, 0);
                u[r] = 1;
                cocycles.push_back(std::move(u));
            }
    }
    else
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<Residue> u(n, 0);
            u[r] = 1;
            cocycles.push_back(std::move(u));
        }
    for (auto& z : cocycles)
        if (data->coords.insert(z, true))
            data->reps.push_back(std::move(z));

    auto [it, ok] = e1_.emplace(key, std::move(data));
    return *it->second;
}

std::vector<Residue> SpectralSequence::e1_class(unsigned s, unsigned i, const std::vector<Residue>& gr)
{
    const E1Data& e = e1(s, i);
    std::vector<Residue> v = gr;
    std::vector<Residue> coords = e.coords.reduce(v);
    if (!all_zero(v))
        throw ConsistencyError("e1_class: vector is not a d_0-cocycle");
    coords.resize(e.reps.size(), 0);
    return coords;
}

std::vector<std::vector<Residue>> SpectralSequence::filtered_kernel(unsigned s, unsigned from, unsigned level)
{
    const Zpk& R = c_.ring;
    const unsigned K = R.precision();
    const auto& ws = c_.weights[s];
    std::vector<std::size_t> gb;
    std::vector<unsigned> gj;
    for (std::size_t b = 0; b < ws.size(); ++b) {
        unsigned j = from > ws[b] ? from - ws[b] : 0;
        if (j < K) {
            gb.push_back(b);
            gj.push_back(j);
        }
    }
    std::vector<std::vector<Residue>> out;
    auto element = [&](std::span<const Residue> k) {
        std::vector<Residue> x(ws.size(), 0);
        for (std::size_t g = 0; g < gb.size(); ++g)
            x[gb[g]] = R.mul(k[g], R.pow_p(gj[g]));
        return x;
    };
    if (s == c_.top() || c_.rank(s + 1) == 0) {
        for (std::size_t g = 0; g < gb.size(); ++g) {
            std::vector<Residue> k(gb.size(), 0);
            k[g] = 1;
            out.push_back(element(k));
        }
        return out;
    }
    const auto& d = c_.d[s];
    const auto& wt = c_.weights[s + 1];
    std::vector<Residue> col_scale(wt.size());
    for (std::size_t c = 0; c < wt.size(); ++c) {
        unsigned f = level == UINT_MAX ? K : clamp_level(static_cast<long>(level) - wt[c], K);
        col_scale[c] = R.pow_p(K - f);
    }
    ModPkMatrix m(R, gb.size(), wt.size());
    for (std::size_t g = 0; g < gb.size(); ++g) {
        auto src = d.row(gb[g]);
        auto dst = m.row(g);
        Residue ps = R.pow_p(gj[g]);
        for (std::size_t c = 0; c < wt.size(); ++c)
            dst[c] = R.mul(R.mul(src[c], ps), col_scale[c]);
    }
    const SubmoduleBasis kb = kernel_basis(m);
            const ModPkMatrix& ker = kb.generators();
    for (std::size_t r = 0; r < ker.rows(); ++r)
        out.push_back(element(ker.row(r)));
    return out;
}

const SpectralSequence::PageData& SpectralSequence::page_data(unsigned s, unsigned i, unsigned r)
{
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(s, i, r);
    if (auto it = pages_.find(key); it != pages_.end())
        return *it->second;
    if (r == 0)
        throw InvalidArgument("page: pages start at r = 1");

    const Zpk& R = c_.ring;
    auto data = std::make_shared<PageData>(field_);
    if (s > 0) {
        unsigned from = r == kInfinitePage ? 0 : (i + 1 > r ? i + 1 - r : 0);
        for (const auto& y : filtered_kernel(s - 1, from, i)) {
            auto cls = e1_class(s, i, graded(s, i, apply(R, y, c_.d[s - 1])));
            data->coords.insert(std::move(cls), false);
        }
    }
    for (auto& x : filtered_kernel(s, i, r == kInfinitePage ? UINT_MAX : i + r)) {
        auto cls = e1_class(s, i, graded(s, i, x));
        if (data->coords.insert(cls, true)) {
            data->basis.classes.push_back(std::move(cls));
            data->basis.lifts.push_back(std::move(x));
        }
    }
    auto [it, ok] = pages_.emplace(key, std::move(data));
    return *it->second;
}

const PageBasis& SpectralSequence::page(unsigned s, unsigned i, unsigned r)
{
    if (s > c_.top())
        throw InvalidArgument("page: degree above the top of the complex");
    if (r != kInfinitePage && i + r >= c_.ring.precision())
        throw PrecisionExhausted("page: E_" + std::to_string(r) + " at weight " + std::to_string(i) +
                                 " needs precision above K = " + std::to_string(c_.ring.precision()));
    return page_data(s, i, r).basis;
}

ModPkMatrix SpectralSequence::differential(unsigned s, unsigned i, unsigned r)
{
    if (r == kInfinitePage)
        throw InvalidArgument("differential: no differential on the limit page");
    const PageBasis& src = page(s, i, r);
    std::lock_guard lock(mu_);
    if (s >= c_.top())
        return ModPkMatrix(field_, src.dim(), 0);
    const PageData& tgt = page_data(s + 1, i + r, r);
    ModPkMatrix m(field_, src.dim(), tgt.basis.dim());
    for (std::size_t k = 0; k < src.dim(); ++k) {
        auto dx = apply(c_.ring, src.lifts[k], c_.d[s]);
        auto e = e1_class(s + 1, i + r, graded(s + 1, i + r, dx));
        auto coords = tgt.coords.reduce(e);
        if (!all_zero(e))
            throw ConsistencyError("differential: image leaves Z_r of the target");
        coords.resize(tgt.basis.dim(), 0);
        std::copy(coords.begin(), coords.end(), m.row(k).begin());
    }
    return m;
}

std::vector<Residue> SpectralSequence::page_coordinates(unsigned s, unsigned i, unsigned r,
                                                        const std::vector<Residue>& e1v)
{
    page(s, i, r);
    std::lock_guard lock(mu_);
    const PageData& pd = page_data(s, i, r);
    std::vector<Residue> v = e1v;
    auto coords = pd.coords.reduce(v);
    if (!all_zero(v))
        throw ConsistencyError("page_coordinates: class does not survive to this page");
    coords.resize(pd.basis.dim(), 0);
    return coords;
}

// ---------------------------------------------------------------------------
// Length-based oracle

std::vector<std::size_t> graded_homology(const ComplexSource& src, unsigned s)
{
    const Zpk& R = src.ring;
    const unsigned K = R.precision();
    auto ws = src.weights(s);
    std::vector<unsigned> wn = s < src.top ? src.weights(s + 1) : std::vector<unsigned>{};
    std::vector<unsigned> wp = s > 0 ? src.weights(s - 1) : std::vector<unsigned>{};
    SparseMatrix dout = s < src.top ? src.differential(s) : SparseMatrix{};
    SparseMatrix din = s > 0 ? src.differential(s - 1) : SparseMatrix{};
    if (s >= src.top) {
        dout.cols = 0;
        dout.rows.assign(ws.size(), SparseVec{});
    }
    if (s == 0) {
        din.cols = static_cast<std::uint32_t>(ws.size());
    }

    unsigned top_weight = 0;
    for (unsigned w : ws)
        top_weight = std::max(top_weight, w + K);
    const unsigned len_b = din.rows.empty() ? 0 : span_length(R, din);

    // length of F^i H = len(Z ∩ F^i) - len(B ∩ F^i)
    auto filtered_length = [&](unsigned i) -> long {
        long len_f = 0;
        std::vector<unsigned> shift(ws.size());
        for (std::size_t b = 0; b < ws.size(); ++b) {
            shift[b] = i > ws[b] ? i - ws[b] : 0;
            if (shift[b] < K)
                len_f += K - shift[b];
        }
        long len_z = len_f - (dout.rows.empty() ? 0 : static_cast<long>(span_length(R, dout, shift)));
        long len_bf = 0;
        if (!din.rows.empty()) {
            std::vector<unsigned> col(ws.size());
            for (std::size_t c = 0; c < ws.size(); ++c)
                col[c] = K - clamp_level(static_cast<long>(i) - ws[c], K);
            len_bf = static_cast<long>(len_b) - static_cast<long>(span_length(R, din, {}, col));
        }
        return len_z - len_bf;
    };
    std::vector<long> lens(top_weight + 2, 0);
    for (unsigned i = 0; i <= top_weight; ++i)
        lens[i] = filtered_length(i);
    std::vector<std::size_t> out(top_weight + 1);
    for (unsigned i = 0; i <= top_weight; ++i) {
        long g = lens[i] - lens[i + 1];
        if (g < 0)
            throw ConsistencyError("graded_homology: filtration lengths are not monotone");
        out[i] = static_cast<std::size_t>(g);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Novikov window

NovikovWindow NovikovWindow::make(unsigned p, unsigned stem_max, unsigned s_max, std::optional<unsigned> i_max,
                                  std::optional<unsigned> r_max, std::optional<unsigned> K)
{
    if (p < 2)
        throw InvalidArgument("window: p must be prime");
    for (unsigned q = 2; q * q <= p; ++q)
        if (p % q == 0)
            throw InvalidArgument("window: p must be prime");
    NovikovWindow w;
    w.p = p;
    w.stem_max = stem_max;
    w.s_max = s_max;
    w.i_max = i_max.value_or(s_max + stem_max / 2);
    w.r_max = r_max.value_or(8);
    if (w.r_max == 0)
        throw InvalidArgument("window: r_max must be at least 1");
    w.K = K.value_or(w.i_max + w.r_max + 4);
    if (w.K <= w.i_max + w.r_max + 1)
        throw PrecisionExhausted("window: K = " + std::to_string(w.K) + " cannot certify pages up to E_" +
                                 std::to_string(w.r_max + 1) + " at weight " + std::to_string(w.i_max));
    w.t_max = stem_max + s_max;
    w.t_max += w.t_max % 2;
    Zpk check(p, w.K);  // throws if p^K does not fit
    (void)check;
    return w;
}

std::vector<unsigned> NovikovWindow::degrees() const
{
    std::vector<unsigned> out;
    const unsigned q = 2 * (p - 1);
    for (unsigned t = 0; t <= t_max; t += q)
        out.push_back(t);
    return out;
}

namespace {

unsigned top_degree(const NovikovWindow& w, unsigned t)
{
    return std::min(w.s_max + 1, t / (2 * (w.p - 1)) + 1);
}

}  // namespace

std::uint64_t estimated_basis_count(const CobarComplex& cobar, const NovikovWindow& w)
{
    std::uint64_t total = 0;
    for (unsigned t : w.degrees())
        for (unsigned s = 0; s <= top_degree(w, t); ++s)
            total += cobar.dimension(s, t);
    return total;
}

NovikovRun::NovikovRun(NovikovWindow w, unsigned threads, std::uint64_t basis_cap) : w_(w)
{
    maps_ = std::make_shared<const HopfStructureMaps>(TruncationWindow::make(w_.p, w_.t_max, w_.K));
    cobar_ = std::make_unique<CobarComplex>(maps_);
    if (basis_cap) {
        std::uint64_t n = estimated_basis_count(*cobar_, w_);
        if (n > basis_cap)
            throw WindowTooLarge("window needs about " + std::to_string(n) + " cobar basis elements, cap is " +
                                 std::to_string(basis_cap));
    }
    std::vector<unsigned> ts = w_.degrees();
    std::reverse(ts.begin(), ts.end());  // largest first for balance
    std::vector<Slice> done(ts.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(ts.size());
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < ts.size();) {
            try {
                // products start below s_max, so a slice cut off at s_max + 1 needs no
                // chain maps in its top two degrees
                const unsigned top = top_degree(w_, ts[k]);
                done[k].red = reduce(cobar_source(*cobar_, ts[k], top), top <= w_.s_max);
                done[k].ss = std::make_unique<SpectralSequence>(done[k].red.reduced);
            }
            catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ts.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    for (std::size_t k = 0; k < ts.size(); ++k)
        slices_.emplace(ts[k], std::move(done[k]));
}

NovikovRun::Slice& NovikovRun::slice(unsigned t)
{
    auto it = slices_.find(t);
    if (it == slices_.end())
        throw InvalidArgument("internal degree " + std::to_string(t) + " is outside the window");
    return it->second;
}

const NovikovRun::Slice& NovikovRun::slice(unsigned t) const
{
    auto it = slices_.find(t);
    if (it == slices_.end())
        throw InvalidArgument("internal degree " + std::to_string(t) + " is outside the window");
    return it->second;
}

SpectralSequence& NovikovRun::sequence(unsigned t) { return *slice(t).ss; }
const Reduction& NovikovRun::reduction(unsigned t) const { return slice(t).red; }

std::vector<CollapseEntry> NovikovRun::collapse_report()
{
    std::vector<CollapseEntry> out;
    for (auto& [t, sl] : slices_) {
        SpectralSequence& ss = *sl.ss;
        const unsigned top = ss.complex().top();
        for (unsigned s = 0; s < top && s <= w_.s_max; ++s)
            for (unsigned i = 0; i <= w_.i_max; ++i) {
                if (!w_.contains(s, i, t))
                    continue;
                CollapseEntry e{s, i, t, {}, 0, 1, true};
                for (unsigned r = 1; r <= w_.r_max + 1; ++r)
                    e.dims.push_back(ss.dimension(s, i, r));
                e.e_infinity = ss.dimension(s, i, kInfinitePage);
                // a slice cut off at s_max + 1 has a truncated top degree whose
                // pages are never needed; the outgoing rank there is the drop
                const bool cut = s + 1 == top && top == w_.s_max + 1;
                for (unsigned r = 1; r <= w_.r_max; ++r) {
                    std::size_t in_rank = (s > 0 && i >= r) ? fp_rank(ss.differential(s - 1, i - r, r)) : 0;
                    std::size_t out_rank = 0;
                    if (!cut)
                        out_rank = fp_rank(ss.differential(s, i, r));
                    else if (e.dims[r] + in_rank <= e.dims[r - 1])
                        out_rank = e.dims[r - 1] - e.dims[r] - in_rank;
                    if (e.dims[r] + out_rank + in_rank != e.dims[r - 1])
                        throw ConsistencyError("collapse_report: page dimensions disagree with d_" +
                                               std::to_string(r) + " at (s,i,t) = (" + std::to_string(s) + "," +
                                               std::to_string(i) + "," + std::to_string(t) + ")");
                    if (out_rank + in_rank > 0)
                        e.stable_page = r + 1;
                }
                e.stable = e.dims.back() == e.e_infinity;
                if (e.dims.front() > 0 || e.e_infinity > 0)
                    out.push_back(std::move(e));
            }
    }
    return out;
}

std::vector<DifferentialEntry> NovikovRun::differentials()
{
    std::vector<DifferentialEntry> out;
    for (auto& [t, sl] : slices_) {
        SpectralSequence& ss = *sl.ss;
        const unsigned top = ss.complex().top();
        for (unsigned s = 0; s < top && s <= w_.s_max; ++s)
            for (unsigned i = 0; i <= w_.i_max; ++i) {
                if (!w_.contains(s, i, t) || (s + 1 == top && top == w_.s_max + 1))
                    continue;
                for (unsigned r = 1; r <= w_.r_max; ++r) {
                    ModPkMatrix m = ss.differential(s, i, r);
                    std::size_t rk = fp_rank(m);
                    if (rk > 0)
                        out.push_back(DifferentialEntry{r, s, i, t, rk, std::move(m)});
                }
            }
    }
    return out;
}

std::vector<Residue> NovikovRun::lift(unsigned s, unsigned i, unsigned t, const std::vector<Residue>& e1v)
{
    SpectralSequence& ss = sequence(t);
    const FilteredComplex& c = ss.complex();
    const Zpk& R = c.ring;
    const PageBasis& basis = ss.page(s, i, 1);
    if (e1v.size() != basis.dim())
        throw InvalidArgument("lift: class has the wrong length");
    std::vector<Residue> x(c.rank(s), 0);
    // The E_1 page basis need not be the unit basis; its lifts are module elements.
    ModPkMatrix classes(ss.field(), basis.dim(), basis.dim());
    for (std::size_t k = 0; k < basis.dim(); ++k)
        std::copy(basis.classes[k].begin(), basis.classes[k].end(), classes.row(k).begin());
    auto coeff = solve(classes, e1v);
    if (!coeff)
        throw ConsistencyError("lift: E_1 page basis does not span E_1");
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        Residue a = (*coeff)[k];
        if (a == 0)
            continue;
        for (std::size_t b = 0; b < x.size(); ++b)
            x[b] = R.add(x[b], R.mul(a, basis.lifts[k][b]));
    }
    return x;
}

std::vector<Residue> NovikovRun::times_p(unsigned s, unsigned i, unsigned t, const std::vector<Residue>& e1v)
{
    SpectralSequence& ss = sequence(t);
    const Zpk& R = ss.complex().ring;
    std::vector<Residue> x = lift(s, i, t, e1v);
    for (auto& v : x)
        v = R.mul(v, R.prime());
    return ss.e1_class(s, i + 1, ss.graded(s, i + 1, x));
}

std::optional<std::vector<Residue>> NovikovRun::times_h(unsigned j, unsigned s, unsigned i, unsigned t,
                                                        const std::vector<Residue>& e1v)
{
    std::uint64_t pj = 1;
    for (unsigned k = 0; k < j; ++k)
        pj *= w_.p;
    if (pj > 255)
        return std::nullopt;
    const unsigned t2 = t + static_cast<unsigned>(2 * (w_.p - 1) * pj);
    auto it = slices_.find(t2);
    if (it == slices_.end() || s + 1 > w_.s_max || s + 1 >= it->second.ss->complex().top())
        return std::nullopt;

    const Zpk& R = cobar_->ring();
    std::vector<Residue> x = lift(s, i, t, e1v);
    const Reduction& red = slice(t).red;
    const Reduction& red2 = it->second.red;
    const auto& basis = cobar_->basis(s, t);

    std::map<std::uint32_t, Residue> original;
    for (std::size_t b = 0; b < x.size(); ++b) {
        if (x[b] == 0)
            continue;
        const SparseVec& inc = red.include[s][b];
        for (std::size_t q = 0; q < inc.size(); ++q) {
            Residue& slot = original[inc.idx[q]];
            slot = R.add(slot, R.mul(x[b], inc.val[q]));
        }
    }
    Exps tail{};
    tail[0] = static_cast<std::uint8_t>(pj);
    std::vector<Residue> y(red2.reduced.rank(s + 1), 0);
    for (auto [e, a] : original) {
        if (a == 0)
            continue;
        CobarElement el = basis[e];
        el.word.push_back(tail);
        std::uint32_t idx = cobar_->index_of(s + 1, t2, el);
        const SparseVec& pr = red2.project[s + 1][idx];
        for (std::size_t q = 0; q < pr.size(); ++q)
            y[pr.idx[q]] = R.add(y[pr.idx[q]], R.mul(a, pr.val[q]));
    }
    SpectralSequence& ss2 = *it->second.ss;
    return ss2.e1_class(s + 1, i, ss2.graded(s + 1, i, y));
}

}  // namespace algnov
