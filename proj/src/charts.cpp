#include "algnov/charts.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace algnov {

using json = nlohmann::json;

ChartPosition regrade(unsigned s, unsigned i, unsigned t)
{
    if (t % 2 != 0)
        throw InvalidArgument("regrade: internal degree " + std::to_string(t) + " is odd");
    if (t < s)
        throw InvalidArgument("regrade: t < s");
    return {static_cast<int>(t - s), s + i, t / 2};
}

std::tuple<unsigned, unsigned, unsigned> unregrade(const ChartPosition& pos)
{
    const long s = 2L * pos.weight - pos.stem;
    const long i = static_cast<long>(pos.filtration) - s;
    if (s < 0 || i < 0)
        throw InvalidArgument("unregrade: position is not in the image of regrade");
    return {static_cast<unsigned>(s), static_cast<unsigned>(i), 2 * pos.weight};
}

unsigned differential_length(unsigned r)
{
    if (r == 0)
        throw InvalidArgument("differential_length: filtration jump must be positive");
    return r + 1;
}

long chow_novikov(long s_top, long w)
{
    return s_top - 2 * w;
}

// ---------------------------------------------------------------------------
// Registry

void NameRegistry::add(Key k, std::string name)
{
    entries_[k] = std::move(name);
}

NameRegistry NameRegistry::cofiber_tau()
{
    // Weights of stems <= 20 are those the engine assigns to the unique
    // labeled dot; beyond that they follow from additivity over products
    // of h_j (weight 2^{j-1}), h_0 (weight 0), P (weight 4), c_0 (5),
    // d_0 (8), e_0 (10) and g (12).
    struct Row {
        int stem;
        unsigned filtration, weight;
        const char* name;
    };
    static const Row rows[] = {
        {0, 1, 0, "h0"},         {1, 1, 1, "h1"},          {3, 1, 2, "h2"},         {5, 3, 3, "h1^4bar"},
        {7, 1, 4, "h3"},         {8, 3, 5, "c0"},          {9, 5, 5, "Ph1"},        {11, 4, 6, "h1^2c0bar"},
        {11, 5, 6, "Ph2"},       {14, 2, 8, "h3^2"},       {14, 4, 8, "d0"},        {15, 1, 8, "h4"},
        {15, 2, 8, "h0h4"},      {15, 4, 8, "h0^3h4"},     {16, 2, 9, "h1h4"},      {16, 7, 9, "Pc0"},
        {17, 4, 10, "e0"},       {18, 2, 10, "h2h4"},      {18, 4, 10, "f0"},       {19, 3, 11, "c1"},
        {20, 4, 11, "tau g"},    {20, 5, 12, "h0g"},       {22, 7, 13, "c0d0"},     {23, 4, 13, "h4c0"},
        {23, 5, 14, "h2g"},      {24, 11, 13, "P^2c0"},    {25, 13, 13, "P^3h1"},   {28, 8, 16, "d0^2"},
        {30, 2, 16, "h4^2"},     {31, 1, 16, "h5"},        {31, 4, 16, "h0^3h5"},   {31, 8, 18, "d0e0"},
        {31, 11, 16, "h0^10h5"}, {32, 2, 17, "h1h5"},      {32, 15, 17, "P^3c0"},   {34, 2, 18, "h2h5"},
        {34, 8, 20, "e0^2"},     {37, 8, 22, "e0g"},       {38, 2, 20, "h3h5"},     {38, 4, 20, "h0^2h3h5"},
        {39, 3, 21, "h1h3h5"},   {39, 4, 21, "h5c0"},      {40, 19, 21, "P^4c0"},   {45, 3, 24, "h3^2h5"},
        {45, 5, 24, "h5d0"},
    };
    NameRegistry reg;
    for (const auto& r : rows)
        reg.add({r.stem, r.filtration, r.weight, std::nullopt}, r.name);
    return reg;
}

NameRegistry NameRegistry::read_tsv(std::istream& is)
{
    NameRegistry reg;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("stem\t", 0) == 0)
            continue;
        std::istringstream ls(line);
        std::string stem, filt, weight, dis, name;
        if (!std::getline(ls, stem, '\t') || !std::getline(ls, filt, '\t') || !std::getline(ls, weight, '\t') ||
            !std::getline(ls, dis, '\t') || !std::getline(ls, name))
            throw InvalidArgument("registry: malformed line: " + line);
        try {
            Key k{std::stoi(stem), static_cast<unsigned>(std::stoul(filt)), static_cast<unsigned>(std::stoul(weight)),
                  dis == "-" ? std::nullopt : std::optional<unsigned>(static_cast<unsigned>(std::stoul(dis)))};
            reg.add(k, name);
        }
        catch (const std::logic_error&) {
            throw InvalidArgument("registry: malformed line: " + line);
        }
    }
    return reg;
}

std::string NameRegistry::to_tsv() const
{
    std::ostringstream os;
    os << "stem\tfiltration\tweight\tdisambiguator\tname\n";
    for (const auto& [k, name] : entries_)
        os << k.stem << '\t' << k.filtration << '\t' << k.weight << '\t'
           << (k.disambiguator ? std::to_string(*k.disambiguator) : "-") << '\t' << name << '\n';
    return os.str();
}

void attach_names(ChartDoc& chart, const NameRegistry& registry)
{
    for (const auto& [k, name] : registry.entries()) {
        std::vector<ChartDot*> hits;
        for (auto& d : chart.dots)
            if (d.stem == k.stem && d.filtration == k.filtration && d.weight && *d.weight == k.weight)
                hits.push_back(&d);
        // dots are stored in (s, i, t, index) order within a position
        if (k.disambiguator) {
            if (*k.disambiguator < hits.size())
                hits[*k.disambiguator]->name = name;
        } else if (hits.size() == 1) {
            hits.front()->name = name;
        } else if (hits.size() > 1) {
            chart.warnings.push_back("name " + name + " matches " + std::to_string(hits.size()) + " dots at (" +
                                     std::to_string(k.stem) + "," + std::to_string(k.filtration) + ") weight " +
                                     std::to_string(k.weight) + "; left unnamed");
        }
    }
}

// ---------------------------------------------------------------------------
// Chart construction

namespace {

std::string window_string(const NovikovWindow& w)
{
    std::ostringstream os;
    os << "p=" << w.p << " stem_max=" << w.stem_max << " s_max=" << w.s_max << " i_max=" << w.i_max
       << " r_max=" << w.r_max << " K=" << w.K << " t_max=" << w.t_max;
    return os.str();
}

void sort_and_number(ChartDoc& doc)
{
    std::sort(doc.dots.begin(), doc.dots.end(), [](const ChartDot& a, const ChartDot& b) {
        return std::tie(a.stem, a.filtration, a.s, a.i, a.t, a.index) <
               std::tie(b.stem, b.filtration, b.s, b.i, b.t, b.index);
    });
    for (std::uint32_t k = 0; k < doc.dots.size(); ++k)
        doc.dots[k].id = k;
}

using TriDegree = std::tuple<unsigned, unsigned, unsigned>;

std::map<TriDegree, std::uint32_t> first_ids(const ChartDoc& doc)
{
    std::map<TriDegree, std::uint32_t> out;
    for (const auto& d : doc.dots)
        out.emplace(TriDegree{d.s, d.i, d.t}, d.id);
    return out;
}

void add_lines(ChartDoc& doc, const std::string& kind, std::uint32_t src, std::uint32_t base,
               const std::vector<Residue>& coords)
{
    for (std::size_t m = 0; m < coords.size(); ++m)
        if (coords[m])
            doc.lines.push_back({kind, src, base + static_cast<std::uint32_t>(m)});
}

}  // namespace

ChartDoc build_chart(NovikovRun& run, unsigned r, const NameRegistry* registry)
{
    const NovikovWindow& w = run.window();
    if (r == 0 || (r != kInfinitePage && r > w.r_max))
        throw InvalidArgument("build_chart: page " + std::to_string(r) + " is outside 1.." +
                              std::to_string(w.r_max));
    ChartDoc doc;
    doc.metadata["engine"] = kEngineVersion;
    doc.metadata["source"] = "algebraic-novikov";
    doc.metadata["prime"] = std::to_string(w.p);
    doc.metadata["page"] = r == kInfinitePage ? "Einf" : "E" + std::to_string(r + 1);
    doc.metadata["window"] = window_string(w);
    doc.metadata["stem_max"] = std::to_string(w.stem_max);
    doc.metadata["s_max"] = std::to_string(w.s_max);
    doc.metadata["i_max"] = std::to_string(w.i_max);
    doc.metadata["t_max"] = std::to_string(w.t_max);

    auto valid = [&](unsigned s, unsigned i, unsigned t) {
        if (!w.contains(s, i, t) || t % (2 * (w.p - 1)) != 0)
            return false;
        return s + 1 <= run.sequence(t).complex().top();
    };
    for (unsigned t : w.degrees()) {
        SpectralSequence& ss = run.sequence(t);
        for (unsigned s = 0; s <= std::min(w.s_max, t); ++s)
            for (unsigned i = 0; i <= w.i_max; ++i) {
                if (!valid(s, i, t))
                    continue;
                const std::size_t dim = ss.dimension(s, i, r);
                const ChartPosition pos = regrade(s, i, t);
                for (std::uint32_t k = 0; k < dim; ++k)
                    doc.dots.push_back({0, pos.stem, pos.filtration, pos.weight, s, i, t, k, ""});
            }
    }
    sort_and_number(doc);
    const auto ids = first_ids(doc);
    auto base_of = [&](unsigned s, unsigned i, unsigned t) -> std::optional<std::uint32_t> {
        auto it = ids.find({s, i, t});
        if (it == ids.end())
            return std::nullopt;
        return it->second;
    };

    // structure lines
    const unsigned h1_shift = 2 * (w.p - 1), h2_shift = 2 * (w.p - 1) * w.p;
    for (const auto& d : doc.dots) {
        SpectralSequence& ss = run.sequence(d.t);
        const auto& cls = ss.page(d.s, d.i, r).classes[d.index];
        if (auto base = base_of(d.s, d.i + 1, d.t)) {
            auto y = run.times_p(d.s, d.i, d.t, cls);
            add_lines(doc, "h0", d.id, *base, ss.page_coordinates(d.s, d.i + 1, r, y));
        }
        if (w.p != 2)
            continue;  // slopes 1 and 1/3 are the p = 2 picture
        const std::pair<const char*, unsigned> hs[] = {{"h1", h1_shift}, {"h2", h2_shift}};
        for (unsigned j = 0; j < 2; ++j) {
            const unsigned t2 = d.t + hs[j].second;
            auto base = base_of(d.s + 1, d.i, t2);
            if (!base)
                continue;
            auto y = run.times_h(j, d.s, d.i, d.t, cls);
            if (!y)
                continue;
            add_lines(doc, hs[j].first, d.id, *base, run.sequence(t2).page_coordinates(d.s + 1, d.i, r, *y));
        }
    }

    // differentials
    if (r != kInfinitePage) {
        std::set<TriDegree> sources;
        for (const auto& d : doc.dots)
            sources.insert({d.s, d.i, d.t});
        for (const auto& [s, i, t] : sources) {
            auto dst = base_of(s + 1, i + r, t);
            if (!dst || !valid(s + 1, i + r, t))
                continue;
            const auto m = run.sequence(t).differential(s, i, r);
            const std::uint32_t src = *base_of(s, i, t);
            for (std::size_t a = 0; a < m.rows(); ++a)
                for (std::size_t b = 0; b < m.cols(); ++b)
                    if (m.at(a, b))
                        doc.differentials.push_back({differential_length(r), src + static_cast<std::uint32_t>(a),
                                                     *dst + static_cast<std::uint32_t>(b)});
        }
    }
    if (registry)
        attach_names(doc, *registry);
    return doc;
}

ChartDoc build_classical_chart(const MinimalResolution& res, unsigned stem_max)
{
    ChartDoc doc;
    doc.metadata["engine"] = kEngineVersion;
    doc.metadata["source"] = "classical-adams";
    doc.metadata["prime"] = std::to_string(res.algebra().prime());
    doc.metadata["page"] = "E2";
    doc.metadata["stem_max"] = std::to_string(stem_max);
    doc.metadata["s_max"] = std::to_string(res.s_max());
    doc.metadata["t_max"] = std::to_string(res.t_max());
    for (unsigned s = 0; s <= res.s_max(); ++s)
        for (unsigned t = s; t <= res.t_max() && t - s <= stem_max; ++t) {
            const auto n = res.dimension(s, t);
            for (std::uint32_t k = 0; k < n; ++k)
                doc.dots.push_back({0, static_cast<int>(t - s), s, std::nullopt, s, 0, t, k, ""});
        }
    sort_and_number(doc);
    const auto ids = first_ids(doc);
    const char* kinds[] = {"h0", "h1", "h2"};
    for (const auto& d : doc.dots)
        for (unsigned j = 0; j < 3; ++j) {
            const unsigned t2 = d.t + (1u << j);
            auto it = ids.find({d.s + 1, 0, t2});
            if (it == ids.end())
                continue;
            std::vector<Residue> x(res.dimension(d.s, d.t), 0);
            x[d.index] = 1;
            add_lines(doc, kinds[j], d.id, it->second, res.product_by_h(d.s, d.t, x, j));
        }
    return doc;
}

// ---------------------------------------------------------------------------
// Tower hiding

namespace {

struct TowerData {
    // per tri-degree and kind: rank of h^M where M counts the steps to the edge
    std::map<std::pair<TriDegree, std::string>, unsigned> rank;
    // per tri-degree: dots hidden as multiples of such towers, by kind
    std::map<std::pair<TriDegree, std::string>, unsigned> hidden;
    std::map<TriDegree, std::vector<std::uint32_t>> at;
};

TowerData tower_data(const ChartDoc& chart)
{
    if (chart.metadata.count("prime") && chart.metadata.at("prime") != "2")
        throw InvalidArgument("tower hiding is defined for p = 2 only");
    auto meta = [&](const char* key) -> long {
        auto it = chart.metadata.find(key);
        return it == chart.metadata.end() ? -1 : std::stol(it->second);
    };
    const bool classical = chart.metadata.count("source") && chart.metadata.at("source") == "classical-adams";
    const long stem_max = meta("stem_max"), s_max = meta("s_max"), i_max = meta("i_max"), t_max = meta("t_max");

    // (s, i, t) after one multiplication, or nothing when it leaves the window
    auto step = [&](const TriDegree& d, const std::string& kind) -> std::optional<TriDegree> {
        auto [s0, i0, t0] = d;
        long s = s0, i = i0, t = t0;
        if (kind == "h0") {
            if (classical)
                ++s, ++t;
            else
                ++i;
        } else {
            ++s;
            t += classical ? 1 : 2;
        }
        if ((s_max >= 0 && s > s_max) || (i_max >= 0 && i > i_max) || (t_max >= 0 && t > t_max) ||
            (stem_max >= 0 && t - s > stem_max))
            return std::nullopt;
        return TriDegree{static_cast<unsigned>(s), static_cast<unsigned>(i), static_cast<unsigned>(t)};
    };

    TowerData out;
    for (const auto& d : chart.dots)
        out.at[{d.s, d.i, d.t}].push_back(d.id);
    std::map<std::string, std::map<std::uint32_t, std::vector<std::uint32_t>>> maps;
    for (const auto& l : chart.lines)
        maps[l.kind][l.src].push_back(l.dst);

    // image of a set of dots (as an F_2 vector) under one multiplication
    auto apply = [&](const std::string& kind, const std::set<std::uint32_t>& v) {
        std::set<std::uint32_t> img;
        for (auto x : v) {
            auto it = maps[kind].find(x);
            if (it == maps[kind].end())
                continue;
            for (auto y : it->second)
                if (!img.erase(y))
                    img.insert(y);
        }
        return img;
    };

    for (const auto& [deg, members] : out.at) {
        const ChartDot& d0 = chart.dots[members.front()];
        if (d0.stem == 0 && d0.filtration == 0)
            continue;  // the unit's multiples head their own towers
        for (const std::string kind : {"h0", "h1"}) {
            auto next = step(deg, kind);
            if (!next)
                continue;
            unsigned M = 0;
            for (auto n = next; n; n = step(*n, kind))
                ++M;
            std::vector<std::set<std::uint32_t>> images;
            for (auto id : members) {
                std::set<std::uint32_t> v{id};
                for (unsigned k = 0; k < M && !v.empty(); ++k)
                    v = apply(kind, v);
                images.push_back(std::move(v));
            }
            std::set<std::uint32_t> cols;
            for (const auto& v : images)
                cols.insert(v.begin(), v.end());
            std::map<std::uint32_t, std::size_t> colidx;
            for (auto c : cols)
                colidx.emplace(c, colidx.size());
            F2Matrix m(images.size(), cols.size());
            for (std::size_t a = 0; a < images.size(); ++a)
                for (auto c : images[a])
                    m.flip(a, colidx.at(c));
            const auto rank = static_cast<unsigned>(m.rank());
            if (rank) {
                out.rank[{deg, kind}] = rank;
                out.hidden[{*next, kind}] += rank;
            }
        }
    }
    return out;
}

}  // namespace

std::map<std::pair<int, unsigned>, unsigned> visible_counts(const ChartDoc& chart)
{
    const TowerData td = tower_data(chart);
    std::map<std::pair<int, unsigned>, unsigned> out;
    for (const auto& [deg, members] : td.at) {
        const ChartDot& d = chart.dots[members.front()];
        const auto n = static_cast<unsigned>(members.size());
        unsigned hide = 0;
        for (const std::string kind : {"h0", "h1"})
            if (auto h = td.hidden.find({deg, kind}); h != td.hidden.end())
                hide += h->second;
        hide = std::min(hide, n);
        if (n > hide)
            out[{d.stem, d.filtration}] += n - hide;
    }
    return out;
}

std::vector<TowerHead> tower_heads(const ChartDoc& chart)
{
    const TowerData td = tower_data(chart);
    std::set<TowerHead> out;
    for (const auto& [key, rank] : td.rank) {
        const auto& [deg, kind] = key;
        auto h = td.hidden.find(key);
        if (rank > (h == td.hidden.end() ? 0 : h->second)) {
            const ChartDot& d = chart.dots[td.at.at(deg).front()];
            out.insert({kind, d.stem, d.filtration});
        }
    }
    return {out.begin(), out.end()};
}

std::map<std::pair<int, unsigned>, unsigned> dot_counts(const ChartDoc& chart)
{
    std::map<std::pair<int, unsigned>, unsigned> out;
    for (const auto& d : chart.dots)
        ++out[{d.stem, d.filtration}];
    return out;
}

GoldenChart read_golden(std::istream& is)
{
    GoldenChart g;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("kind\t", 0) == 0)
            continue;
        std::istringstream ls(line);
        std::string kind;
        int stem = 0;
        unsigned filt = 0, count = 0;
        if (!(ls >> kind >> stem >> filt >> count))
            throw InvalidArgument("golden: malformed line: " + line);
        if (kind == "dot")
            g.dots[{stem, filt}] += count;
        else if (kind == "h0" || kind == "h1")
            g.towers.push_back({kind, stem, filt});
        else
            throw InvalidArgument("golden: unknown kind '" + kind + "'");
    }
    std::sort(g.towers.begin(), g.towers.end());
    return g;
}

std::vector<std::string> golden_mismatches(const std::map<std::pair<int, unsigned>, unsigned>& counts,
                                           const GoldenChart& golden, int stem_max, unsigned filtration_max,
                                           bool fill_towers)
{
    std::map<std::pair<int, unsigned>, unsigned> want;
    for (const auto& [pos, n] : golden.dots)
        if (pos.first <= stem_max && pos.second <= filtration_max)
            want[pos] += n;
    if (fill_towers)
        for (const auto& t : golden.towers) {
            if (t.stem > stem_max)
                continue;
            const int dx = t.kind == "h0" ? 0 : 1;
            for (unsigned k = 1; t.filtration + k <= filtration_max && t.stem + dx * static_cast<int>(k) <= stem_max;
                 ++k)
                ++want[{t.stem + dx * static_cast<int>(k), t.filtration + k}];
        }
    std::map<std::pair<int, unsigned>, unsigned> got;
    for (const auto& [pos, n] : counts)
        if (pos.first <= stem_max && pos.second <= filtration_max)
            got[pos] = n;
    std::vector<std::string> out;
    std::set<std::pair<int, unsigned>> keys;
    for (const auto& [pos, n] : want)
        keys.insert(pos);
    for (const auto& [pos, n] : got)
        keys.insert(pos);
    for (const auto& pos : keys) {
        const unsigned a = want.count(pos) ? want.at(pos) : 0, b = got.count(pos) ? got.at(pos) : 0;
        if (a != b)
            out.push_back("(" + std::to_string(pos.first) + "," + std::to_string(pos.second) + "): expected " +
                          std::to_string(a) + ", found " + std::to_string(b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Emitters

namespace {

std::string weight_text(const ChartDot& d)
{
    return d.weight ? std::to_string(*d.weight) : "-";
}

void metadata_comments(std::ostream& os, const ChartDoc& chart)
{
    for (const auto& [k, v] : chart.metadata)
        os << "# " << k << '=' << v << '\n';
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string emit_tsv(const ChartDoc& chart)
{
    std::ostringstream os;
    metadata_comments(os, chart);
    os << "kind\tstem\tfiltration\tweight\ts\ti\tt\tname\textra\n";
    for (const auto& d : chart.dots)
        os << "dot\t" << d.stem << '\t' << d.filtration << '\t' << weight_text(d) << '\t' << d.s << '\t' << d.i
           << '\t' << d.t << '\t' << d.name << '\t' << d.id << '\n';
    auto row = [&](const std::string& kind, std::uint32_t src, const std::string& extra) {
        const ChartDot& d = chart.dots.at(src);
        os << kind << '\t' << d.stem << '\t' << d.filtration << '\t' << weight_text(d) << '\t' << d.s << '\t' << d.i
           << '\t' << d.t << '\t' << d.name << '\t' << extra << '\n';
    };
    for (const auto& l : chart.lines)
        row(l.kind, l.src, std::to_string(l.src) + ">" + std::to_string(l.dst));
    for (const auto& a : chart.differentials)
        row("diff", a.src, std::to_string(a.src) + ">" + std::to_string(a.dst) + ":" + std::to_string(a.length));
    return os.str();
}

std::string emit_svg(const ChartDoc& chart)
{
    constexpr double unit = 24, margin = 36, radius = 2.6, spread = 0.22;
    int max_stem = 0;
    unsigned max_filt = 0;
    for (const auto& d : chart.dots) {
        max_stem = std::max(max_stem, d.stem);
        max_filt = std::max(max_filt, d.filtration);
    }
    const double width = (max_stem + 1) * unit + 2 * margin;
    const double height = (max_filt + 1) * unit + 2 * margin;

    // dots sharing a position are spread horizontally
    std::map<std::pair<int, unsigned>, std::vector<std::uint32_t>> groups;
    for (const auto& d : chart.dots)
        groups[{d.stem, d.filtration}].push_back(d.id);
    std::vector<std::pair<double, double>> xy(chart.dots.size());
    for (const auto& [pos, ids] : groups)
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const double off = (static_cast<double>(k) - (ids.size() - 1) / 2.0) * spread;
            xy[ids[k]] = {margin + (pos.first + off) * unit, height - margin - pos.second * unit};
        }

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    os << "<metadata>\n";
    for (const auto& [k, v] : chart.metadata)
        os << xml_escape(k) << '=' << xml_escape(v) << '\n';
    os << "</metadata>\n";
    os << "<defs><marker id=\"arrow\" viewBox=\"0 0 6 6\" refX=\"6\" refY=\"3\" markerWidth=\"6\" "
          "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\"/></marker></defs>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // grid as a single path so that every <line> is chart content
    os << "<path stroke=\"#e0e0e0\" stroke-width=\"0.5\" fill=\"none\" d=\"";
    for (int x = 0; x <= max_stem; x += 2)
        os << 'M' << num(margin + x * unit) << ',' << num(margin) << 'V' << num(height - margin);
    for (unsigned y = 0; y <= max_filt; y += 2)
        os << 'M' << num(margin) << ',' << num(height - margin - y * unit) << 'H' << num(width - margin);
    os << "\"/>\n";
    for (int x = 0; x <= max_stem; x += 2)
        os << "<text x=\"" << num(margin + x * unit) << "\" y=\"" << num(height - margin / 3)
           << "\" font-size=\"9\" text-anchor=\"middle\">" << x << "</text>\n";
    for (unsigned y = 0; y <= max_filt; y += 2)
        os << "<text x=\"" << num(margin / 2) << "\" y=\"" << num(height - margin - y * unit + 3)
           << "\" font-size=\"9\" text-anchor=\"middle\">" << y << "</text>\n";

    for (const auto& l : chart.lines) {
        const auto [x1, y1] = xy.at(l.src);
        const auto [x2, y2] = xy.at(l.dst);
        os << "<line class=\"" << l.kind << "\" x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
           << "\" y2=\"" << num(y2) << "\" stroke=\"#404040\" stroke-width=\"0.8\"/>\n";
    }
    static const char* colors[] = {"#1f5fbf", "#c0392b", "#1e8449", "#8e44ad"};
    for (const auto& a : chart.differentials) {
        const auto [x1, y1] = xy.at(a.src);
        const auto [x2, y2] = xy.at(a.dst);
        os << "<line class=\"diff d" << a.length << "\" x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
           << num(x2) << "\" y2=\"" << num(y2) << "\" stroke=\"" << colors[(a.length - 2) % 4]
           << "\" stroke-width=\"1\" marker-end=\"url(#arrow)\"/>\n";
    }
    for (const auto& d : chart.dots) {
        const auto [x, y] = xy[d.id];
        os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(radius) << "\"/>\n";
        if (!d.name.empty())
            os << "<text x=\"" << num(x + 3) << "\" y=\"" << num(y + 9) << "\" font-size=\"7\">" << xml_escape(d.name)
               << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string emit_json(const ChartDoc& chart)
{
    json j;
    j["metadata"] = chart.metadata;
    j["dots"] = json::array();
    for (const auto& d : chart.dots)
        j["dots"].push_back({{"id", d.id},
                             {"stem", d.stem},
                             {"filtration", d.filtration},
                             {"weight", d.weight ? json(*d.weight) : json(nullptr)},
                             {"s", d.s},
                             {"i", d.i},
                             {"t", d.t},
                             {"index", d.index},
                             {"name", d.name}});
    j["lines"] = json::array();
    for (const auto& l : chart.lines)
        j["lines"].push_back({{"kind", l.kind}, {"src", l.src}, {"dst", l.dst}});
    j["differentials"] = json::array();
    for (const auto& a : chart.differentials)
        j["differentials"].push_back({{"length", a.length}, {"src", a.src}, {"dst", a.dst}});
    return j.dump(1) + "\n";
}

ChartDoc parse_json(const std::string& text)
{
    try {
        const json j = json::parse(text);
        ChartDoc doc;
        doc.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        for (const auto& d : j.at("dots")) {
            ChartDot dot;
            dot.id = d.at("id").get<std::uint32_t>();
            dot.stem = d.at("stem").get<int>();
            dot.filtration = d.at("filtration").get<unsigned>();
            if (!d.at("weight").is_null())
                dot.weight = d.at("weight").get<unsigned>();
            dot.s = d.at("s").get<unsigned>();
            dot.i = d.at("i").get<unsigned>();
            dot.t = d.at("t").get<unsigned>();
            dot.index = d.at("index").get<std::uint32_t>();
            dot.name = d.at("name").get<std::string>();
            if (dot.id != doc.dots.size())
                throw InvalidArgument("parse_json: dot ids must be consecutive");
            doc.dots.push_back(std::move(dot));
        }
        auto check = [&](std::uint32_t id) {
            if (id >= doc.dots.size())
                throw InvalidArgument("parse_json: reference to a missing dot");
            return id;
        };
        for (const auto& l : j.at("lines"))
            doc.lines.push_back({l.at("kind").get<std::string>(), check(l.at("src").get<std::uint32_t>()),
                                 check(l.at("dst").get<std::uint32_t>())});
        for (const auto& a : j.at("differentials"))
            doc.differentials.push_back({a.at("length").get<unsigned>(), check(a.at("src").get<std::uint32_t>()),
                                         check(a.at("dst").get<std::uint32_t>())});
        return doc;
    }
    catch (const json::exception& e) {
        throw InvalidArgument(std::string("parse_json: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Differential table

const std::vector<TableRow>& differential_table()
{
    static const std::vector<TableRow> rows = {
        {"d2(h4) = h0 h3^2", {15, 1, 0}, {14, 3, 0}, 2},
        {"d3(h0 h4) = h0 d0", {15, 2, 0}, {14, 5, 0}, 3},
        {"d2(e0) = h1^2 d0", {17, 4, 0}, {16, 6, 0}, 2},
        {"d2(f0) = h0^2 e0", {18, 4, 0}, {17, 6, 0}, 2},
        {"d2(h5) = h0 h4^2", {31, 1, 0}, {30, 3, 0}, 2},
        {"d3(h0^3 h5) = h0 Dh2^2", {31, 4, 0}, {30, 7, 0}, 3},
        // detected through an eta-extension on the cofiber of tau, not by a d_2 there
        {"d3(h2 h5) = h1 d1", {34, 2, 0}, {33, 5, 0}, 3, false},
        {"d4(h3 h5) = h0 x", {38, 2, 0}, {37, 6, 0}, 4},
        {"d3(e1) = h1 t", {38, 4, 0}, {37, 7, 0}, 3},
        {"d2(c2) = h0 f1", {41, 3, 0}, {40, 5, 0}, 2},
    };
    return rows;
}

std::string to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::Pass: return "PASS";
    case RowStatus::Fail: return "FAIL";
    case RowStatus::OutOfWindow: return "OUT-OF-WINDOW";
    }
    return "?";
}

std::vector<RowReport> verify_table(NovikovRun& run, const std::vector<TableRow>& rows)
{
    const NovikovWindow& w = run.window();
    const unsigned step = 2 * (w.p - 1);
    std::vector<RowReport> out;
    for (const auto& row : rows) {
        RowReport rep{row, RowStatus::Fail, 0, ""};
        const unsigned len = row.length;
        if (row.source.stem < 1 || len < 2) {
            rep.detail = "malformed row";
            out.push_back(rep);
            continue;
        }
        const unsigned r = len - 1;
        if (row.target.stem != row.source.stem - 1 || row.target.filtration != row.source.filtration + len) {
            rep.detail = "target is not at (stem - 1, filtration + length)";
            out.push_back(rep);
            continue;
        }
        if (static_cast<unsigned>(row.source.stem) > w.stem_max || r > w.r_max) {
            rep.status = RowStatus::OutOfWindow;
            rep.detail = "source stem or page outside the window";
            out.push_back(rep);
            continue;
        }
        bool partial = false;
        std::vector<std::pair<TriDegree, std::size_t>> hits;
        for (unsigned s = 0; s <= row.source.filtration; ++s) {
            const unsigned i = row.source.filtration - s;
            const unsigned t = static_cast<unsigned>(row.source.stem) + s;
            if (t % step != 0)
                continue;
            if (!w.contains(s, i, t) || !w.contains(s + 1, i + r, t)) {
                partial = true;
                continue;
            }
            if (s + 1 > run.sequence(t).complex().top())
                continue;  // the target cochains vanish
            const std::size_t rank = fp_rank(run.sequence(t).differential(s, i, r));
            if (rank)
                hits.push_back({{s, i, t}, rank});
            rep.rank += rank;
        }
        std::ostringstream det;
        for (const auto& [deg, rank] : hits) {
            const auto& [s, i, t] = deg;
            det << "d" << r << " (s,i,t)=(" << s << "," << i << "," << t << ") rank " << rank << "; ";
        }
        auto finish = [&det](const std::string& tail) {
            std::string text = det.str() + tail;
            while (!text.empty() && (text.back() == ' ' || text.back() == ';'))
                text.pop_back();
            return text;
        };
        if (!row.algebraic) {
            if (rep.rank == 0 && partial) {
                rep.status = RowStatus::OutOfWindow;
                rep.detail = finish("candidate tri-degrees fall outside the window");
            } else {
                rep.status = rep.rank == 0 ? RowStatus::Pass : RowStatus::Fail;
                rep.detail = finish(rep.rank == 0 ? "no algebraic Novikov differential, as expected"
                                                  : "expected no algebraic Novikov differential");
            }
        } else if (rep.rank == 1) {
            const auto& [s, i, t] = hits.front().first;
            SpectralSequence& ss = run.sequence(t);
            const bool src_drop = ss.dimension(s, i, r + 1) + 1 <= ss.dimension(s, i, r);
            const bool dst_drop = ss.dimension(s + 1, i + r, r + 1) + 1 <= ss.dimension(s + 1, i + r, r);
            rep.status = src_drop && dst_drop ? RowStatus::Pass : RowStatus::Fail;
            rep.detail = finish(src_drop && dst_drop ? "" : "dimensions do not drop on the next page");
        } else if (rep.rank == 0 && partial) {
            rep.status = RowStatus::OutOfWindow;
            rep.detail = finish("candidate tri-degrees fall outside the window");
        } else {
            rep.detail = finish("total rank " + std::to_string(rep.rank) + " (expected 1)");
        }
        out.push_back(rep);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classical comparison

MillerReport compare_miller(const ChartDoc& novikov_e2, const ChartDoc& classical)
{
    if (novikov_e2.metadata.count("prime") && classical.metadata.count("prime") &&
        novikov_e2.metadata.at("prime") != classical.metadata.at("prime"))
        throw InvalidArgument("compare_miller: charts are over different primes");
    std::map<std::pair<int, unsigned>, unsigned> counts;
    for (const auto& d : classical.dots)
        ++counts[{d.stem, d.filtration}];
    std::map<std::pair<ChartPosition, ChartPosition>, std::set<std::uint32_t>> groups;
    for (const auto& a : novikov_e2.differentials) {
        if (a.length != 2)
            continue;
        const auto& s = novikov_e2.dots.at(a.src);
        const auto& t = novikov_e2.dots.at(a.dst);
        groups[{{s.stem, s.filtration, s.weight.value_or(0)}, {t.stem, t.filtration, t.weight.value_or(0)}}].insert(
            a.src);
    }
    MillerReport rep;
    for (const auto& [key, srcs] : groups) {
        MillerPair p{key.first, key.second, srcs.size(), 0, 0, false};
        auto a = counts.find({key.first.stem, key.first.filtration});
        auto b = counts.find({key.second.stem, key.second.filtration});
        p.classical_source_dim = a == counts.end() ? 0 : a->second;
        p.classical_target_dim = b == counts.end() ? 0 : b->second;
        p.consistent = p.classical_source_dim > 0 && p.classical_target_dim > 0;
        if (!p.consistent)
            ++rep.inconsistencies;
        rep.pairs.push_back(p);
    }
    return rep;
}

std::string MillerReport::text() const
{
    std::ostringstream os;
    os << "ADVISORY: coordinate-level comparison of length-2 algebraic Novikov differentials with classical "
          "Adams bidegrees; no map of spectral sequences is claimed.\n";
    for (const auto& p : pairs)
        os << "(" << p.source.stem << "," << p.source.filtration << ";w=" << p.source.weight << ") -> ("
           << p.target.stem << "," << p.target.filtration << ") sources " << p.novikov_rank << "  classical dims "
           << p.classical_source_dim << "/" << p.classical_target_dim << "  "
           << (p.consistent ? "consistent" : "INCONSISTENT") << "\n";
    os << "inconsistencies: " << inconsistencies << "\n";
    return os.str();
}

}  // namespace algnov
