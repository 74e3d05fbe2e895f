#pragma once

// Adams-chart view of spectral-sequence data.
//
// A class in tri-degree (s, i, t) of the algebraic Novikov spectral sequence is
// drawn at stem t - s, filtration s + i, weight t/2.  A differential with
// filtration jump r is drawn as an arrow of length r + 1, moving one stem to
// the left.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "algnov/hopf_ext.hpp"
#include "algnov/specseq.hpp"

namespace algnov {

inline constexpr const char* kEngineVersion = "algnov 1.0.0";

struct ChartPosition {
    int stem;
    unsigned filtration;
    unsigned weight;
    auto operator<=>(const ChartPosition&) const = default;
};

/// Throws InvalidArgument for odd t or t < s.
ChartPosition regrade(unsigned s, unsigned i, unsigned t);
/// Inverse of regrade: (s, i, t).  Throws InvalidArgument when out of range.
std::tuple<unsigned, unsigned, unsigned> unregrade(const ChartPosition& pos);
/// Chart length of a differential with filtration jump r >= 1.
unsigned differential_length(unsigned r);
long chow_novikov(long s_top, long w);

struct ChartDot {
    std::uint32_t id = 0;
    int stem = 0;
    unsigned filtration = 0;
    std::optional<unsigned> weight;  ///< absent on classical charts
    unsigned s = 0, i = 0, t = 0;
    std::uint32_t index = 0;  ///< position within the page basis at (s, i, t)
    std::string name;
    bool operator==(const ChartDot&) const = default;
};

struct ChartLine {
    std::string kind;  ///< h0, h1 or h2
    std::uint32_t src = 0, dst = 0;
    bool operator==(const ChartLine&) const = default;
};

struct ChartArrow {
    unsigned length = 0;
    std::uint32_t src = 0, dst = 0;
    bool operator==(const ChartArrow&) const = default;
};

struct ChartDoc {
    std::map<std::string, std::string> metadata;
    std::vector<ChartDot> dots;
    std::vector<ChartLine> lines;
    std::vector<ChartArrow> differentials;
    std::vector<std::string> warnings;  ///< not serialized
    bool operator==(const ChartDoc& o) const
    {
        return metadata == o.metadata && dots == o.dots && lines == o.lines && differentials == o.differentials;
    }
};

/// Positional names keyed by (stem, filtration, weight, disambiguator).  The
/// disambiguator picks among several dots at one key in (s, i, t, index) order.
class NameRegistry {
  public:
    struct Key {
        int stem;
        unsigned filtration;
        unsigned weight;
        std::optional<unsigned> disambiguator;
        auto operator<=>(const Key&) const = default;
    };

    void add(Key k, std::string name);
    const std::map<Key, std::string>& entries() const { return entries_; }
    /// Names read off the charts of the cofiber of τ.
    static NameRegistry cofiber_tau();
    /// TSV with columns stem, filtration, weight, disambiguator ("-" for none), name.
    static NameRegistry read_tsv(std::istream& is);
    std::string to_tsv() const;

  private:
    std::map<Key, std::string> entries_;
};

/// Attaches names where the key matches exactly one dot; ambiguous keys add a warning.
void attach_names(ChartDoc& chart, const NameRegistry& registry);

/// Chart of page r of the run (1 is the Adams E_2 chart, kInfinitePage the
/// limit).  Dots cover every nonzero page entry in the window, h0/h1/h2 lines
/// come from multiplication by p, [t_1] and [t_1^p], arrows from d_r.
ChartDoc build_chart(NovikovRun& run, unsigned r, const NameRegistry* registry = nullptr);
/// Classical Adams E_2 chart of a minimal resolution over the Steenrod algebra.
ChartDoc build_classical_chart(const MinimalResolution& res, unsigned stem_max);

/// Dot counts per (stem, filtration) after hiding the infinite h0 and h1
/// towers the way printed charts do: a dot is hidden when it is the product of
/// a class whose h0- or h1-multiples stay nonzero up to the window edge.
/// The window edges are read from the chart metadata.  p = 2 only.
std::map<std::pair<int, unsigned>, unsigned> visible_counts(const ChartDoc& chart);

/// Bottom visible dot of an h0 or h1 tower reaching the window edge.
struct TowerHead {
    std::string kind;
    int stem;
    unsigned filtration;
    auto operator<=>(const TowerHead&) const = default;
};
std::vector<TowerHead> tower_heads(const ChartDoc& chart);
/// Raw dot counts per (stem, filtration).
std::map<std::pair<int, unsigned>, unsigned> dot_counts(const ChartDoc& chart);

/// Transcribed chart: rows kind, stem, filtration, count with kind dot, h0
/// or h1.  Tower rows carry the position the tower arrow leaves from.
struct GoldenChart {
    std::map<std::pair<int, unsigned>, unsigned> dots;
    std::vector<TowerHead> towers;
};
GoldenChart read_golden(std::istream& is);
/// Disagreements with counts over stems <= stem_max and filtrations <=
/// filtration_max.  With fill_towers each tower adds one dot per filtration
/// above its row.
std::vector<std::string> golden_mismatches(const std::map<std::pair<int, unsigned>, unsigned>& counts,
                                           const GoldenChart& golden, int stem_max, unsigned filtration_max,
                                           bool fill_towers);

std::string emit_tsv(const ChartDoc& chart);
std::string emit_svg(const ChartDoc& chart);
std::string emit_json(const ChartDoc& chart);
/// Inverse of emit_json.  Throws InvalidArgument on malformed input.
ChartDoc parse_json(const std::string& text);

// ---------------------------------------------------------------------------
// Differential table

struct TableRow {
    std::string label;
    ChartPosition source;  ///< weight unused
    ChartPosition target;  ///< weight unused
    unsigned length;
    /// False for a classical differential with no algebraic Novikov
    /// counterpart; such a row passes when the rank at its coordinates is 0.
    bool algebraic = true;
};

/// The ten differentials listed for stems up to 45.
const std::vector<TableRow>& differential_table();

enum class RowStatus { Pass, Fail, OutOfWindow };
std::string to_string(RowStatus s);

struct RowReport {
    TableRow row;
    RowStatus status;
    std::size_t rank = 0;
    std::string detail;
};

/// Checks each row against the run: a d_{ℓ-1} of rank exactly one leaves the
/// source position, lands at the target position, and both dimensions drop
/// on the next page.  Rows marked non-algebraic must instead have rank 0.
std::vector<RowReport> verify_table(NovikovRun& run, const std::vector<TableRow>& rows = differential_table());

// ---------------------------------------------------------------------------
// Comparison with the classical chart

struct MillerPair {
    ChartPosition source, target;  ///< weight from the algebraic Novikov side
    std::size_t novikov_rank;
    unsigned classical_source_dim, classical_target_dim;
    bool consistent;  ///< both classical bidegrees are nonzero
};

struct MillerReport {
    std::vector<MillerPair> pairs;
    std::size_t inconsistencies = 0;
    std::string text() const;  ///< labeled ADVISORY
};

/// For every length-2 arrow of the E_2 chart, looks for classical classes at the
/// same (stem, filtration) source and target.
MillerReport compare_miller(const ChartDoc& novikov_e2, const ChartDoc& classical);

}  // namespace algnov
