#pragma once

// Exact linear algebra over Z/p^K (K = 1 is F_p).
//
// Vectors are row vectors; a matrix M acts by x ↦ xM, so "row span" is the
// image of the map a matrix describes.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "algnov/errors.hpp"

namespace algnov {

using Residue = std::uint64_t;

/// The ring Z/p^K with p^K < 2^63.
class Zpk {
  public:
    Zpk(unsigned p, unsigned K);

    unsigned prime() const { return p_; }
    unsigned precision() const { return K_; }
    std::uint64_t modulus() const { return mod_; }

    Residue reduce(std::int64_t x) const
    {
        std::int64_t r = x % static_cast<std::int64_t>(mod_);
        return static_cast<Residue>(r < 0 ? r + static_cast<std::int64_t>(mod_) : r);
    }
    Residue add(Residue a, Residue b) const
    {
        Residue s = a + b;
        return s >= mod_ ? s - mod_ : s;
    }
    Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + mod_ - b; }
    Residue neg(Residue a) const { return a == 0 ? 0 : mod_ - a; }
    Residue mul(Residue a, Residue b) const
    {
        if (p_ == 2)
            return (a * b) & (mod_ - 1);  // wraparound mod 2^64 is harmless for a power of two
        return static_cast<Residue>(static_cast<unsigned __int128>(a) * b % mod_);
    }

    /// ν_p(x); returns K for x = 0.
    unsigned valuation(Residue x) const;
    bool is_unit(Residue x) const { return x % p_ != 0; }
    Residue inverse(Residue unit) const;
    /// p^e, or 0 when e >= K.
    Residue pow_p(unsigned e) const { return e >= K_ ? 0 : pow_[e]; }
    /// Some c with c·b = a.  Requires ν(b) <= ν(a).
    Residue divide(Residue a, Residue b) const;

    bool operator==(const Zpk& o) const { return p_ == o.p_ && K_ == o.K_; }

  private:
    unsigned p_, K_;
    std::uint64_t mod_;
    std::vector<Residue> pow_;
};

/// Dense matrix over Z/p^K.
class ModPkMatrix {
  public:
    ModPkMatrix(Zpk ring, std::size_t rows, std::size_t cols);
    static ModPkMatrix identity(Zpk ring, std::size_t n);
    static ModPkMatrix from_rows(Zpk ring, std::size_t cols, const std::vector<std::vector<std::int64_t>>& rows);

    const Zpk& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Residue at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, std::int64_t v) { data_[r * cols_ + c] = ring_.reduce(v); }
    std::span<const Residue> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<Residue> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    void append_row(std::span<const Residue> r);
    ModPkMatrix operator*(const ModPkMatrix& rhs) const;
    bool is_zero() const;
    bool operator==(const ModPkMatrix& o) const;

  private:
    Zpk ring_;
    std::size_t rows_, cols_;
    std::vector<Residue> data_;
};

/// Generators of a submodule of (Z/p^K)^n in Howell normal form.  Two
/// submodules are equal iff their bases are equal.
class SubmoduleBasis {
  public:
    SubmoduleBasis(Zpk ring, std::size_t ambient);
    explicit SubmoduleBasis(ModPkMatrix howell_rows);

    std::size_t ambient_rank() const { return gens_.cols(); }
    const ModPkMatrix& generators() const { return gens_; }
    std::size_t size() const { return gens_.rows(); }
    bool contains(std::span<const Residue> v) const;
    /// log_p of the submodule's order.
    unsigned length() const;

  private:
    ModPkMatrix gens_;
};

struct NormalForm {
    ModPkMatrix form;       ///< Howell form rows, ordered by pivot column
    ModPkMatrix transform;  ///< form = transform · M
};

/// Howell normal form of the row span.  Pivots are chosen lowest-valuation,
/// lowest-index first.
NormalForm normal_form(const ModPkMatrix& m);

/// Basis of {x : xM = 0}.
SubmoduleBasis kernel_basis(const ModPkMatrix& m);

/// Some x with xM = b, or nullopt.  Throws InvalidArgument if b.size() != cols.
std::optional<std::vector<Residue>> solve(const ModPkMatrix& m, std::span<const Residue> b);

/// Row echelon over F_p.  Each row may carry a tag so that reducing a vector
/// also reports which tagged rows it was built from.
class FpEchelon {
  public:
    explicit FpEchelon(Zpk field);

    std::size_t rank() const { return rows_.size(); }
    std::size_t tag_count() const { return ntags_; }
    /// Reduces v in place to zero on every pivot column; returns the
    /// combination of tags used.
    std::vector<Residue> reduce(std::vector<Residue>& v) const;
    /// Adds v if it is independent of the rows so far.  A tagged row gets the
    /// next unit tag.
    bool insert(std::vector<Residue> v, bool tagged);

  private:
    Zpk f_;
    std::vector<std::vector<Residue>> rows_;
    std::vector<std::size_t> piv_;
    std::vector<std::vector<Residue>> tags_;
    std::size_t ntags_ = 0;
};

/// Cyclic-factor exponents of ker(d_out)/im(d_in), sorted ascending.  Rows of
/// d_in are the elements mapped into the middle module; d_out maps it onward.
/// Throws ConsistencyError if d_in · d_out ≠ 0.
std::vector<unsigned> homology(const ModPkMatrix& d_in, const ModPkMatrix& d_out);

/// Smith diagonal exponents of m (one per nonzero diagonal entry, K for none).
std::vector<unsigned> smith_exponents(const ModPkMatrix& m);

/// Plain text dump: header "p K rows cols", then one row per line.
void write_matrix(std::ostream& os, const ModPkMatrix& m);
ModPkMatrix read_matrix(std::istream& is);

// ---------------------------------------------------------------------------
// Sparse machinery for the large cobar matrices.

struct SparseVec {
    std::vector<std::uint32_t> idx;  ///< strictly increasing
    std::vector<Residue> val;        ///< nonzero

    std::size_t size() const { return idx.size(); }
    bool empty() const { return idx.empty(); }
    Residue get(std::uint32_t i) const;
    void push(std::uint32_t i, Residue v)
    {
        idx.push_back(i);
        val.push_back(v);
    }
    bool operator==(const SparseVec&) const = default;
};

/// target += f · src over ring.
void axpy(const Zpk& ring, SparseVec& target, Residue f, const SparseVec& src);

struct SparseMatrix {
    std::uint32_t cols = 0;
    std::vector<SparseVec> rows;

    ModPkMatrix to_dense(const Zpk& ring) const;
};

/// a · b (a's rows are sources).
SparseMatrix multiply(const Zpk& ring, const SparseMatrix& a, const SparseMatrix& b);
bool is_zero(const SparseMatrix& m);

/// Length (log_p order) of the row span of m after scaling row r by
/// p^{row_shift[r]} and column c by p^{col_shift[c]}.  Empty shift spans mean
/// no scaling.
unsigned span_length(const Zpk& ring, const SparseMatrix& m, std::span<const unsigned> row_shift = {},
                     std::span<const unsigned> col_shift = {});

/// Decides whether an entry may serve as an elimination pivot.
using PivotRule = std::function<bool(std::uint32_t row, std::uint32_t col, Residue value)>;

struct EliminationOptions {
    bool keep_pivot_rows = false;  ///< record each pivot row as it was when chosen
    bool track_transform = false;  ///< record each row as a combination of input rows
};

struct Elimination {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pivots;  ///< (row, col) in elimination order
    std::vector<bool> row_alive;                                  ///< rows not used as pivots
    SparseMatrix reduced;  ///< all rows; pivot rows emptied, others fully reduced against pivot columns
    std::vector<SparseVec> pivot_rows;  ///< parallel to pivots, if requested
    /// Surviving row r equals Σ transform[r][j] · input row j, if requested.
    /// Pivot rows' entries are cleared.
    std::vector<SparseVec> transform;
};

/// Sparse Gaussian elimination with Markowitz-style pivot choice among
/// entries accepted by rule (which must only accept units).  Choice order is
/// deterministic.
Elimination eliminate(const Zpk& ring, SparseMatrix m, const PivotRule& rule, const EliminationOptions& opts = {});

/// Rank over F_p of a sparse matrix (ring must have K = 1).
std::size_t sparse_rank(const Zpk& field, SparseMatrix m);

// ---------------------------------------------------------------------------
// Bit-packed F_2 matrices.

class F2Matrix {
  public:
    F2Matrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(std::size_t r, std::size_t c, bool v);
    void flip(std::size_t r, std::size_t c) { row(r)[c >> 6] ^= std::uint64_t(1) << (c & 63); }
    std::uint64_t* row(std::size_t r) { return words_.data() + r * stride_; }
    const std::uint64_t* row(std::size_t r) const { return words_.data() + r * stride_; }
    std::size_t stride() const { return stride_; }
    void add_row(std::size_t target, std::size_t src);
    bool row_is_zero(std::size_t r) const;
    void append_zero_row();

    /// In-place reduced row echelon form; returns pivot columns (lowest index first).
    std::vector<std::size_t> rref();
    std::size_t rank() const;

  private:
    std::size_t rows_, cols_, stride_;
    std::vector<std::uint64_t> words_;
};

}  // namespace algnov
