#include "algnov/linalg.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <string>

namespace algnov {

namespace {

bool is_prime(unsigned p)
{
    if (p < 2)
        return false;
    for (unsigned d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

using DenseRow = std::vector<Residue>;

// row_a += f * row_b
void dense_axpy(const Zpk& R, DenseRow& a, Residue f, const DenseRow& b)
{
    if (f == 0)
        return;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i])
            a[i] = R.add(a[i], R.mul(f, b[i]));
}

bool dense_is_zero(const DenseRow& r)
{
    return std::all_of(r.begin(), r.end(), [](Residue x) { return x == 0; });
}

// Howell form over the first pivot_cols columns; remaining columns are
// carried along (used for transformation tracking).
std::vector<DenseRow> howell_rows(const Zpk& R, std::vector<DenseRow> active, std::size_t pivot_cols)
{
    std::vector<DenseRow> pivots;
    std::vector<std::size_t> pivot_col;
    for (std::size_t j = 0; j < pivot_cols; ++j) {
        std::size_t best = active.size();
        unsigned best_v = R.precision();
        for (std::size_t r = 0; r < active.size(); ++r) {
            Residue e = active[r][j];
            if (e == 0)
                continue;
            unsigned v = R.valuation(e);
            if (v < best_v) {
                best_v = v;
                best = r;
            }
        }
        if (best == active.size())
            continue;
        DenseRow piv = std::move(active[best]);
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best));

        Residue pv = R.pow_p(best_v);
        Residue unit = static_cast<Residue>(piv[j] / pv);
        Residue inv = R.inverse(unit);
        for (auto& x : piv)
            x = R.mul(x, inv);

        for (auto& row : active) {
            if (row[j] == 0)
                continue;
            Residue f = static_cast<Residue>(row[j] / pv);
            dense_axpy(R, row, R.neg(f), piv);
        }
        for (auto& q : pivots) {
            if (q[j] >= pv) {
                Residue f = static_cast<Residue>(q[j] / pv);
                dense_axpy(R, q, R.neg(f), piv);
            }
        }
        if (best_v > 0) {
            DenseRow ann = piv;
            Residue s = R.pow_p(R.precision() - best_v);
            for (auto& x : ann)
                x = R.mul(x, s);
            if (!dense_is_zero(ann))
                active.push_back(std::move(ann));
        }
        pivots.push_back(std::move(piv));
        pivot_col.push_back(j);
    }
    return pivots;
}

std::vector<DenseRow> to_rows(const ModPkMatrix& m, bool augment_identity)
{
    std::size_t width = m.cols() + (augment_identity ? m.rows() : 0);
    std::vector<DenseRow> rows(m.rows(), DenseRow(width, 0));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto src = m.row(r);
        std::copy(src.begin(), src.end(), rows[r].begin());
        if (augment_identity)
            rows[r][m.cols() + r] = 1;
    }
    return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Zpk

Zpk::Zpk(unsigned p, unsigned K) : p_(p), K_(K), mod_(1)
{
    if (!is_prime(p))
        throw InvalidArgument("Zpk: p must be prime, got " + std::to_string(p));
    if (K < 1)
        throw InvalidArgument("Zpk: precision K must be >= 1");
    pow_.push_back(1);
    for (unsigned i = 0; i < K; ++i) {
        if (mod_ > ((std::uint64_t(1) << 63) - 1) / p)
            throw InvalidArgument("Zpk: p^K must be below 2^63");
        mod_ *= p;
        if (i + 1 < K)
            pow_.push_back(static_cast<Residue>(mod_));
    }
}

unsigned Zpk::valuation(Residue x) const
{
    if (x == 0)
        return K_;
    unsigned v = 0;
    while (x % p_ == 0) {
        x /= p_;
        ++v;
    }
    return v;
}

Residue Zpk::inverse(Residue unit) const
{
    unit %= mod_;
    if (unit % p_ == 0)
        throw InvalidArgument("Zpk::inverse: not a unit");
    // Inverse mod p by Fermat, then Newton lifting x <- x(2 - ux).
    Residue x = 1, base = unit % p_;
    for (unsigned e = p_ - 2; e; e >>= 1) {
        if (e & 1u)
            x = x * base % p_;
        base = base * base % p_;
    }
    for (unsigned prec = 1; prec < K_; prec *= 2)
        x = mul(x, sub(2 % mod_, mul(unit, x)));
    return x;
}

Residue Zpk::divide(Residue a, Residue b) const
{
    if (a == 0)
        return 0;
    unsigned vb = valuation(b);
    if (valuation(a) < vb)
        throw InvalidArgument("Zpk::divide: not divisible");
    Residue pv = pow_[vb];
    return mul(static_cast<Residue>(a / pv), inverse(static_cast<Residue>(b / pv)));
}

// ---------------------------------------------------------------------------
// ModPkMatrix

ModPkMatrix::ModPkMatrix(Zpk ring, std::size_t rows, std::size_t cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols), data_(rows * cols, 0)
{
}

ModPkMatrix ModPkMatrix::identity(Zpk ring, std::size_t n)
{
    ModPkMatrix m(std::move(ring), n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, 1);
    return m;
}

ModPkMatrix ModPkMatrix::from_rows(Zpk ring, std::size_t cols, const std::vector<std::vector<std::int64_t>>& rows)
{
    ModPkMatrix m(std::move(ring), rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw InvalidArgument("ModPkMatrix::from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m.set(r, c, rows[r][c]);
    }
    return m;
}

void ModPkMatrix::append_row(std::span<const Residue> r)
{
    if (r.size() != cols_)
        throw InvalidArgument("ModPkMatrix::append_row: width mismatch");
    for (Residue x : r)
        data_.push_back(static_cast<Residue>(x % ring_.modulus()));
    ++rows_;
}

ModPkMatrix ModPkMatrix::operator*(const ModPkMatrix& rhs) const
{
    if (cols_ != rhs.rows_ || !(ring_ == rhs.ring_))
        throw InvalidArgument("ModPkMatrix::operator*: shape or ring mismatch");
    ModPkMatrix out(ring_, rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            Residue a = at(i, k);
            if (a == 0)
                continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                Residue b = rhs.at(k, j);
                if (b)
                    out.data_[i * out.cols_ + j] = ring_.add(out.data_[i * out.cols_ + j], ring_.mul(a, b));
            }
        }
    return out;
}

bool ModPkMatrix::is_zero() const
{
    return std::all_of(data_.begin(), data_.end(), [](Residue x) { return x == 0; });
}

bool ModPkMatrix::operator==(const ModPkMatrix& o) const
{
    return ring_ == o.ring_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

// ---------------------------------------------------------------------------
// SubmoduleBasis

SubmoduleBasis::SubmoduleBasis(Zpk ring, std::size_t ambient) : gens_(std::move(ring), 0, ambient) {}

SubmoduleBasis::SubmoduleBasis(ModPkMatrix howell_rows) : gens_(std::move(howell_rows)) {}

bool SubmoduleBasis::contains(std::span<const Residue> v) const
{
    if (v.size() != gens_.cols())
        throw InvalidArgument("SubmoduleBasis::contains: dimension mismatch");
    const Zpk& R = gens_.ring();
    DenseRow x(v.begin(), v.end());
    for (std::size_t g = 0; g < gens_.rows(); ++g) {
        auto row = gens_.row(g);
        std::size_t lead = 0;
        while (lead < row.size() && row[lead] == 0)
            ++lead;
        for (std::size_t j = 0; j < lead; ++j)
            if (x[j] != 0)
                return false;
        if (x[lead] == 0)
            continue;
        if (R.valuation(x[lead]) < R.valuation(row[lead]))
            return false;
        Residue f = static_cast<Residue>(x[lead] / row[lead]);
        DenseRow rr(row.begin(), row.end());
        dense_axpy(R, x, R.neg(f), rr);
    }
    return dense_is_zero(x);
}

unsigned SubmoduleBasis::length() const
{
    const Zpk& R = gens_.ring();
    unsigned total = 0;
    for (std::size_t g = 0; g < gens_.rows(); ++g)
        for (Residue e : gens_.row(g))
            if (e != 0) {
                total += R.precision() - R.valuation(e);
                break;
            }
    return total;
}

// ---------------------------------------------------------------------------
// Normal forms, kernels, solving

NormalForm normal_form(const ModPkMatrix& m)
{
    const Zpk& R = m.ring();
    auto rows = howell_rows(R, to_rows(m, true), m.cols());
    NormalForm nf{ModPkMatrix(R, 0, m.cols()), ModPkMatrix(R, 0, m.rows())};
    for (const auto& r : rows) {
        nf.form.append_row(std::span<const Residue>(r.data(), m.cols()));
        nf.transform.append_row(std::span<const Residue>(r.data() + m.cols(), m.rows()));
    }
    return nf;
}

SubmoduleBasis kernel_basis(const ModPkMatrix& m)
{
    const Zpk& R = m.ring();
    std::size_t width = m.cols() + m.rows();
    auto rows = howell_rows(R, to_rows(m, true), width);
    ModPkMatrix k(R, 0, m.rows());
    for (const auto& r : rows) {
        bool zero_left = std::all_of(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m.cols()),
                                     [](Residue x) { return x == 0; });
        if (zero_left)
            k.append_row(std::span<const Residue>(r.data() + m.cols(), m.rows()));
    }
    return SubmoduleBasis(std::move(k));
}

std::optional<std::vector<Residue>> solve(const ModPkMatrix& m, std::span<const Residue> b)
{
    if (b.size() != m.cols())
        throw InvalidArgument("solve: right-hand side has length " + std::to_string(b.size()) + ", expected " +
                              std::to_string(m.cols()));
    const Zpk& R = m.ring();
    auto rows = howell_rows(R, to_rows(m, true), m.cols());
    DenseRow rest(b.begin(), b.end());
    for (auto& x : rest)
        x = static_cast<Residue>(x % R.modulus());
    DenseRow x(m.rows(), 0);
    for (const auto& r : rows) {
        std::size_t lead = 0;
        while (lead < m.cols() && r[lead] == 0)
            ++lead;
        for (std::size_t j = 0; j < lead; ++j)
            if (rest[j] != 0)
                return std::nullopt;
        if (rest[lead] == 0)
            continue;
        if (R.valuation(rest[lead]) < R.valuation(r[lead]))
            return std::nullopt;
        Residue f = static_cast<Residue>(rest[lead] / r[lead]);
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (r[j])
                rest[j] = R.sub(rest[j], R.mul(f, r[j]));
        for (std::size_t j = 0; j < m.rows(); ++j)
            if (r[m.cols() + j])
                x[j] = R.add(x[j], R.mul(f, r[m.cols() + j]));
    }
    if (!dense_is_zero(rest))
        return std::nullopt;
    return x;
}

std::vector<unsigned> smith_exponents(const ModPkMatrix& m)
{
    const Zpk& R = m.ring();
    std::vector<DenseRow> a = to_rows(m, false);
    std::size_t nr = m.rows(), nc = m.cols();
    std::vector<unsigned> out;
    for (std::size_t k = 0; k < std::min(nr, nc); ++k) {
        std::size_t br = nr, bc = nc;
        unsigned bv = R.precision();
        for (std::size_t i = k; i < nr && bv > 0; ++i)
            for (std::size_t j = k; j < nc; ++j)
                if (a[i][j] != 0) {
                    unsigned v = R.valuation(a[i][j]);
                    if (v < bv) {
                        bv = v;
                        br = i;
                        bc = j;
                        if (v == 0)
                            break;
                    }
                }
        if (br == nr)
            break;
        std::swap(a[k], a[br]);
        for (std::size_t i = 0; i < nr; ++i)
            std::swap(a[i][k], a[i][bc]);
        Residue piv = a[k][k];
        for (std::size_t i = k + 1; i < nr; ++i)
            if (a[i][k] != 0)
                dense_axpy(R, a[i], R.neg(R.divide(a[i][k], piv)), a[k]);
        for (std::size_t j = k + 1; j < nc; ++j)
            a[k][j] = 0;  // column operations clear the pivot row without touching other rows
        out.push_back(bv);
    }
    return out;
}

std::vector<unsigned> homology(const ModPkMatrix& d_in, const ModPkMatrix& d_out)
{
    const Zpk& R = d_out.ring();
    if (d_in.cols() != d_out.rows())
        throw InvalidArgument("homology: d_in and d_out do not share the middle module");
    if (d_in.rows() > 0 && !(d_in * d_out).is_zero())
        throw ConsistencyError("homology: d_in · d_out is not zero");
    std::size_t n = d_out.rows();
    SubmoduleBasis z = kernel_basis(d_out);
    const ModPkMatrix& zm = z.generators();
    std::size_t m = zm.rows();
    // Relations among the cycle generators, then boundaries in cycle coordinates.
    ModPkMatrix rel = kernel_basis(zm).generators();
    for (std::size_t r = 0; r < d_in.rows(); ++r) {
        auto coords = solve(zm, d_in.row(r));
        if (!coords)
            throw ConsistencyError("homology: boundary is not a cycle");
        rel.append_row(*coords);
    }
    (void)n;
    std::vector<unsigned> diag = smith_exponents(rel);
    std::vector<unsigned> out;
    for (unsigned e : diag)
        if (e > 0)
            out.push_back(e);
    for (std::size_t i = diag.size(); i < m; ++i)
        out.push_back(R.precision());
    std::sort(out.begin(), out.end());
    return out;
}

void write_matrix(std::ostream& os, const ModPkMatrix& m)
{
    os << m.ring().prime() << ' ' << m.ring().precision() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? " " : "") << row[c];
        os << '\n';
    }
}

ModPkMatrix read_matrix(std::istream& is)
{
    unsigned p = 0, K = 0;
    std::size_t rows = 0, cols = 0;
    if (!(is >> p >> K >> rows >> cols))
        throw InvalidArgument("read_matrix: bad header");
    ModPkMatrix m(Zpk(p, K), rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            std::int64_t v;
            if (!(is >> v))
                throw InvalidArgument("read_matrix: truncated body");
            m.set(r, c, v);
        }
    return m;
}

// ---------------------------------------------------------------------------
// Sparse vectors

Residue SparseVec::get(std::uint32_t i) const
{
    auto it = std::lower_bound(idx.begin(), idx.end(), i);
    if (it == idx.end() || *it != i)
        return 0;
    return val[static_cast<std::size_t>(it - idx.begin())];
}

void axpy(const Zpk& R, SparseVec& target, Residue f, const SparseVec& src)
{
    if (f == 0 || src.empty())
        return;
    SparseVec out;
    out.idx.reserve(target.size() + src.size());
    out.val.reserve(target.size() + src.size());
    std::size_t a = 0, b = 0;
    while (a < target.size() || b < src.size()) {
        if (b == src.size() || (a < target.size() && target.idx[a] < src.idx[b])) {
            out.push(target.idx[a], target.val[a]);
            ++a;
        }
        else if (a == target.size() || src.idx[b] < target.idx[a]) {
            Residue v = R.mul(f, src.val[b]);
            if (v)
                out.push(src.idx[b], v);
            ++b;
        }
        else {
            Residue v = R.add(target.val[a], R.mul(f, src.val[b]));
            if (v)
                out.push(target.idx[a], v);
            ++a;
            ++b;
        }
    }
    target = std::move(out);
}

ModPkMatrix SparseMatrix::to_dense(const Zpk& ring) const
{
    ModPkMatrix m(ring, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < rows[r].size(); ++k)
            m.set(r, rows[r].idx[k], rows[r].val[k]);
    return m;
}

SparseMatrix multiply(const Zpk& R, const SparseMatrix& a, const SparseMatrix& b)
{
    for (const auto& row : a.rows)
        if (!row.empty() && row.idx.back() >= b.rows.size())
            throw InvalidArgument("multiply: inner dimensions differ");
    SparseMatrix out;
    out.cols = b.cols;
    out.rows.resize(a.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t k = 0; k < a.rows[r].size(); ++k)
            axpy(R, out.rows[r], a.rows[r].val[k], b.rows[a.rows[r].idx[k]]);
    return out;
}

bool is_zero(const SparseMatrix& m)
{
    return std::all_of(m.rows.begin(), m.rows.end(), [](const SparseVec& v) { return v.empty(); });
}

unsigned span_length(const Zpk& R, const SparseMatrix& m, std::span<const unsigned> row_shift,
                     std::span<const unsigned> col_shift)
{
    const unsigned K = R.precision();
    // Rows bucketed by leading column; ties resolved by insertion id.
    using Item = std::pair<std::uint32_t, std::uint32_t>;  // (lead col, id)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<SparseVec> store;
    auto push = [&](SparseVec&& v) {
        if (v.empty())
            return;
        store.push_back(std::move(v));
        heap.emplace(store.back().idx[0], static_cast<std::uint32_t>(store.size() - 1));
    };
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        unsigned rs = row_shift.empty() ? 0 : row_shift[r];
        if (rs >= K)
            continue;
        SparseVec v;
        for (std::size_t k = 0; k < m.rows[r].size(); ++k) {
            std::uint32_t c = m.rows[r].idx[k];
            unsigned sh = rs + (col_shift.empty() ? 0 : col_shift[c]);
            if (sh >= K)
                continue;
            Residue x = R.mul(m.rows[r].val[k], R.pow_p(sh));
            if (x)
                v.push(c, x);
        }
        push(std::move(v));
    }
    unsigned length = 0;
    std::vector<std::uint32_t> group;
    while (!heap.empty()) {
        std::uint32_t col = heap.top().first;
        group.clear();
        while (!heap.empty() && heap.top().first == col) {
            group.push_back(heap.top().second);
            heap.pop();
        }
        std::uint32_t best = group[0];
        unsigned bv = R.valuation(store[best].val[0]);
        for (std::uint32_t id : group) {
            unsigned v = R.valuation(store[id].val[0]);
            if (v < bv) {
                bv = v;
                best = id;
            }
        }
        const SparseVec piv = std::move(store[best]);
        Residue pv = piv.val[0];
        for (std::uint32_t id : group) {
            if (id == best)
                continue;
            SparseVec v = std::move(store[id]);
            axpy(R, v, R.neg(R.divide(v.val[0], pv)), piv);
            push(std::move(v));
        }
        length += K - bv;
        if (bv > 0) {
            SparseVec ann;
            Residue s = R.pow_p(K - bv);
            for (std::size_t k = 0; k < piv.size(); ++k) {
                Residue x = R.mul(piv.val[k], s);
                if (x)
                    ann.push(piv.idx[k], x);
            }
            push(std::move(ann));
        }
    }
    return length;
}

Elimination eliminate(const Zpk& R, SparseMatrix m, const PivotRule& rule, const EliminationOptions& opts)
{
    const std::uint32_t ncols = m.cols;
    const std::size_t nrows = m.rows.size();
    std::vector<std::vector<std::uint32_t>> col_rows(ncols);
    std::vector<std::uint32_t> count(ncols, 0);
    for (std::uint32_t r = 0; r < nrows; ++r)
        for (std::uint32_t c : m.rows[r].idx) {
            col_rows[c].push_back(r);
            ++count[c];
        }
    std::set<std::pair<std::uint32_t, std::uint32_t>> queue;
    std::vector<char> in_queue(ncols, 0), done(ncols, 0);
    for (std::uint32_t c = 0; c < ncols; ++c)
        if (count[c]) {
            queue.emplace(count[c], c);
            in_queue[c] = 1;
        }
    auto adjust = [&](std::uint32_t c, int delta) {
        if (done[c])
            return;
        if (in_queue[c])
            queue.erase({count[c], c});
        count[c] = static_cast<std::uint32_t>(static_cast<int>(count[c]) + delta);
        in_queue[c] = count[c] > 0;
        if (in_queue[c])
            queue.emplace(count[c], c);
    };

    Elimination out;
    out.row_alive.assign(nrows, true);
    if (opts.track_transform) {
        out.transform.resize(nrows);
        for (std::uint32_t r = 0; r < nrows; ++r)
            out.transform[r].push(r, 1 % R.modulus());
    }
    std::vector<std::uint32_t> live;
    while (!queue.empty()) {
        auto [cnt, c] = *queue.begin();
        queue.erase(queue.begin());
        in_queue[c] = 0;

        auto& lst = col_rows[c];
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        live.clear();
        for (std::uint32_t r : lst)
            if (out.row_alive[r] && m.rows[r].get(c) != 0)
                live.push_back(r);
        lst = live;

        std::uint32_t piv = UINT32_MAX;
        for (std::uint32_t r : live) {
            Residue e = m.rows[r].get(c);
            if (!rule(r, c, e))
                continue;
            if (piv == UINT32_MAX || m.rows[r].size() < m.rows[piv].size())
                piv = r;
        }
        if (piv == UINT32_MAX)
            continue;  // blocked until one of its entries changes

        const SparseVec prow = m.rows[piv];
        const SparseVec ptrans = opts.track_transform ? std::move(out.transform[piv]) : SparseVec{};
        Residue inv = R.inverse(prow.get(c));
        for (std::uint32_t r : live) {
            if (r == piv)
                continue;
            SparseVec& row = m.rows[r];
            Residue f = R.neg(R.mul(row.get(c), inv));
            // Track column membership changes for the counts.
            SparseVec before = row;
            axpy(R, row, f, prow);
            if (opts.track_transform)
                axpy(R, out.transform[r], f, ptrans);
            std::size_t a = 0, b = 0;
            while (a < before.size() || b < row.size()) {
                if (b == row.size() || (a < before.size() && before.idx[a] < row.idx[b])) {
                    if (before.idx[a] != c)
                        adjust(before.idx[a], -1);
                    ++a;
                }
                else if (a == before.size() || row.idx[b] < before.idx[a]) {
                    col_rows[row.idx[b]].push_back(r);
                    adjust(row.idx[b], +1);
                    ++b;
                }
                else {
                    if (before.val[a] != row.val[b] && !in_queue[row.idx[b]] && !done[row.idx[b]] &&
                        count[row.idx[b]] > 0) {
                        queue.emplace(count[row.idx[b]], row.idx[b]);  // revisit a blocked column
                        in_queue[row.idx[b]] = 1;
                    }
                    ++a;
                    ++b;
                }
            }
        }
        out.row_alive[piv] = false;
        for (std::uint32_t cc : prow.idx)
            if (cc != c)
                adjust(cc, -1);
        done[c] = 1;
        count[c] = 0;
        m.rows[piv] = SparseVec{};
        if (opts.track_transform)
            out.transform[piv] = SparseVec{};
        if (opts.keep_pivot_rows)
            out.pivot_rows.push_back(prow);
        out.pivots.emplace_back(piv, c);
    }
    out.reduced = std::move(m);
    return out;
}

std::size_t sparse_rank(const Zpk& field, SparseMatrix m)
{
    if (field.precision() != 1)
        throw InvalidArgument("sparse_rank: requires a field (K = 1)");
    return eliminate(field, std::move(m), [](std::uint32_t, std::uint32_t, Residue) { return true; }).pivots.size();
}

// ---------------------------------------------------------------------------
// FpEchelon

FpEchelon::FpEchelon(Zpk field) : f_(field)
{
    if (field.precision() != 1)
        throw InvalidArgument("FpEchelon: requires a field");
}

std::vector<Residue> FpEchelon::reduce(std::vector<Residue>& v) const
{
    std::vector<Residue> acc(ntags_, 0);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        Residue c = v[piv_[k]];
        if (c == 0)
            continue;
        const auto& row = rows_[k];
        for (std::size_t j = 0; j < v.size(); ++j)
            if (row[j])
                v[j] = f_.sub(v[j], f_.mul(c, row[j]));
        const auto& tag = tags_[k];
        for (std::size_t j = 0; j < tag.size(); ++j)
            if (tag[j])
                acc[j] = f_.add(acc[j], f_.mul(c, tag[j]));
    }
    return acc;
}

bool FpEchelon::insert(std::vector<Residue> v, bool tagged)
{
    std::vector<Residue> acc = reduce(v);
    auto it = std::find_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
    if (it == v.end())
        return false;
    std::size_t pos = static_cast<std::size_t>(it - v.begin());
    Residue inv = f_.inverse(v[pos]);
    for (auto& x : v)
        x = f_.mul(x, inv);
    std::vector<Residue> tag(ntags_ + (tagged ? 1 : 0), 0);
    for (std::size_t j = 0; j < acc.size(); ++j)
        tag[j] = f_.mul(f_.neg(acc[j]), inv);
    if (tagged) {
        tag[ntags_] = inv;
        ++ntags_;
    }
    rows_.push_back(std::move(v));
    piv_.push_back(pos);
    tags_.push_back(std::move(tag));
    return true;
}

// ---------------------------------------------------------------------------
// F2Matrix

F2Matrix::F2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(rows * ((cols + 63) / 64), 0)
{
}

void F2Matrix::set(std::size_t r, std::size_t c, bool v)
{
    std::uint64_t bit = std::uint64_t(1) << (c & 63);
    if (v)
        row(r)[c >> 6] |= bit;
    else
        row(r)[c >> 6] &= ~bit;
}

void F2Matrix::add_row(std::size_t target, std::size_t src)
{
    std::uint64_t* t = row(target);
    const std::uint64_t* s = row(src);
    for (std::size_t w = 0; w < stride_; ++w)
        t[w] ^= s[w];
}

bool F2Matrix::row_is_zero(std::size_t r) const
{
    const std::uint64_t* x = row(r);
    for (std::size_t w = 0; w < stride_; ++w)
        if (x[w])
            return false;
    return true;
}

void F2Matrix::append_zero_row()
{
    words_.resize(words_.size() + stride_, 0);
    ++rows_;
}

std::vector<std::size_t> F2Matrix::rref()
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
        std::size_t w = c >> 6;
        std::uint64_t bit = std::uint64_t(1) << (c & 63);
        std::size_t found = rows_;
        for (std::size_t i = r; i < rows_; ++i)
            if (row(i)[w] & bit) {
                found = i;
                break;
            }
        if (found == rows_)
            continue;
        if (found != r)
            std::swap_ranges(row(found), row(found) + stride_, row(r));
        for (std::size_t i = 0; i < rows_; ++i)
            if (i != r && (row(i)[w] & bit))
                add_row(i, r);
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::size_t F2Matrix::rank() const
{
    F2Matrix copy = *this;
    return copy.rref().size();
}

}  // namespace algnov
