#include <set>
#include <sstream>

#include "algnov/charts.hpp"
#include "doctest.h"

using namespace algnov;

namespace {

NovikovRun& small_run()
{
    static NovikovRun run(NovikovWindow::make(2, 16, 3, 6, 3));
    return run;
}

const ChartDoc& small_chart(unsigned r)
{
    static std::map<unsigned, ChartDoc> cache;
    auto it = cache.find(r);
    if (it == cache.end()) {
        const auto reg = NameRegistry::cofiber_tau();
        it = cache.emplace(r, build_chart(small_run(), r, &reg)).first;
    }
    return it->second;
}

std::set<unsigned> filtrations_at(const ChartDoc& c, int stem)
{
    std::set<unsigned> out;
    for (const auto& d : c.dots)
        if (d.stem == stem)
            out.insert(d.filtration);
    return out;
}

ChartDoc two_dot_chart()
{
    ChartDoc c;
    c.metadata["prime"] = "2";
    c.dots.push_back({0, 15, 5, 8u, 1, 4, 16, 0, ""});
    c.dots.push_back({1, 15, 5, 8u, 1, 4, 16, 1, ""});
    c.lines.push_back({"h0", 0, 1});
    return c;
}

}  // namespace

TEST_CASE("regrading")
{
    CHECK(regrade(0, 1, 0) == ChartPosition{0, 1, 0});
    CHECK(regrade(1, 0, 2) == ChartPosition{1, 1, 1});
    CHECK(regrade(1, 0, 16) == ChartPosition{15, 1, 8});
    CHECK_THROWS_AS(regrade(1, 0, 3), InvalidArgument);
    CHECK_THROWS_AS(regrade(4, 0, 2), InvalidArgument);
    std::set<ChartPosition> seen;
    for (unsigned t = 0; t <= 40; t += 2)
        for (unsigned s = 0; s <= t; ++s)
            for (unsigned i = 0; i <= 8; ++i) {
                const auto pos = regrade(s, i, t);
                CHECK(seen.insert(pos).second);
                CHECK(unregrade(pos) == std::tuple{s, i, t});
                CHECK(pos.stem == static_cast<int>(2 * pos.weight) - static_cast<int>(s));
            }
    CHECK_THROWS_AS(unregrade({5, 1, 1}), InvalidArgument);
}

TEST_CASE("differential lengths and Chow-Novikov degree")
{
    CHECK(differential_length(1) == 2);
    CHECK(differential_length(2) == 3);
    CHECK(differential_length(3) == 4);
    CHECK_THROWS_AS(differential_length(0), InvalidArgument);
    CHECK(chow_novikov(2, 1) == 0);
    CHECK(chow_novikov(0, -1) == 2);
    for (long w = 0; w < 20; ++w)
        CHECK(chow_novikov(2 * w, w) == 0);
}

TEST_CASE("chart geometry")
{
    for (unsigned r : {1u, 2u, 3u, kInfinitePage}) {
        const ChartDoc& c = small_chart(r);
        INFO("page ", c.metadata.at("page"));
        REQUIRE(!c.dots.empty());
        for (std::size_t k = 0; k < c.dots.size(); ++k) {
            const auto& d = c.dots[k];
            CHECK(d.id == k);
            CHECK(d.weight == d.t / 2);
            CHECK(d.stem == static_cast<int>(2 * *d.weight) - static_cast<int>(d.s));
            CHECK(d.filtration == d.s + d.i);
        }
        for (const auto& l : c.lines) {
            const auto &a = c.dots[l.src], &b = c.dots[l.dst];
            const int dx = b.stem - a.stem;
            const int dy = static_cast<int>(b.filtration) - static_cast<int>(a.filtration);
            INFO(l.kind, " ", a.stem, ",", a.filtration);
            CHECK(dy == 1);
            CHECK(dx == (l.kind == "h0" ? 0 : l.kind == "h1" ? 1 : 3));
        }
        for (const auto& arrow : c.differentials) {
            const auto &a = c.dots[arrow.src], &b = c.dots[arrow.dst];
            CHECK(b.stem == a.stem - 1);
            CHECK(b.filtration == a.filtration + arrow.length);
            CHECK(a.weight == b.weight);
            CHECK(a.t == b.t);
        }
    }
}

TEST_CASE("chart contents around stem 15")
{
    const ChartDoc& e2 = small_chart(1);
    CHECK(e2.metadata.at("page") == "E2");
    const auto f = filtrations_at(e2, 15);
    for (unsigned y = 1; y <= 7; ++y)
        CHECK(f.count(y));
    bool arrow = false;
    for (const auto& a : e2.differentials) {
        const auto &s = e2.dots[a.src], &t = e2.dots[a.dst];
        if (s.stem == 15 && s.filtration == 1) {
            arrow = true;
            CHECK(a.length == 2);
            CHECK(t.stem == 14);
            CHECK(t.filtration == 3);
        }
    }
    CHECK(arrow);
    CHECK(filtrations_at(small_chart(kInfinitePage), 15).count(1) == 0);

    std::map<std::string, ChartPosition> named;
    for (const auto& d : e2.dots)
        if (!d.name.empty())
            named[d.name] = {d.stem, d.filtration, *d.weight};
    CHECK(named.at("h0") == ChartPosition{0, 1, 0});
    CHECK(named.at("h1") == ChartPosition{1, 1, 1});
    CHECK(named.at("h4") == ChartPosition{15, 1, 8});
    CHECK(named.at("d0") == ChartPosition{14, 4, 8});
    CHECK(named.at("c0") == ChartPosition{8, 3, 5});
}

TEST_CASE("h lines follow products")
{
    const ChartDoc& c = small_chart(1);
    auto find = [&](int stem, unsigned filt) -> const ChartDot& {
        for (const auto& d : c.dots)
            if (d.stem == stem && d.filtration == filt)
                return d;
        throw InvalidArgument("no dot");
    };
    auto has = [&](const std::string& kind, const ChartDot& a, const ChartDot& b) {
        for (const auto& l : c.lines)
            if (l.kind == kind && l.src == a.id && l.dst == b.id)
                return true;
        return false;
    };
    const auto &one = find(0, 0), &h0 = find(0, 1), &h1 = find(1, 1), &h2 = find(3, 1);
    CHECK(has("h0", one, h0));
    CHECK(has("h1", one, h1));
    CHECK(has("h2", one, h2));
    CHECK(has("h1", h1, find(2, 2)));
    CHECK(has("h0", h2, find(3, 2)));
    // h0 h1 = 0
    for (const auto& l : c.lines)
        CHECK_FALSE((l.kind == "h0" && l.src == h1.id));
}

TEST_CASE("stem 0 window")
{
    NovikovRun run(NovikovWindow::make(2, 0, 0, 3, 1));
    const ChartDoc c = build_chart(run, kInfinitePage);
    REQUIRE(c.dots.size() == 4);
    for (const auto& d : c.dots)
        CHECK(d.stem == 0);
    CHECK(c.lines.size() == 3);
    CHECK_THROWS_AS(build_chart(run, 2), InvalidArgument);
}

TEST_CASE("names attach only to unique matches")
{
    ChartDoc c = two_dot_chart();
    NameRegistry reg;
    reg.add({15, 5, 8, std::nullopt}, "x");
    attach_names(c, reg);
    CHECK(c.dots[0].name.empty());
    CHECK(c.dots[1].name.empty());
    CHECK(c.warnings.size() == 1);

    ChartDoc c2 = two_dot_chart();
    NameRegistry reg2;
    reg2.add({15, 5, 8, 1u}, "y");
    reg2.add({15, 5, 9, std::nullopt}, "z");
    attach_names(c2, reg2);
    CHECK(c2.dots[0].name.empty());
    CHECK(c2.dots[1].name == "y");
    CHECK(c2.warnings.empty());
}

TEST_CASE("registry tables")
{
    const auto reg = NameRegistry::cofiber_tau();
    std::istringstream is(reg.to_tsv());
    CHECK(NameRegistry::read_tsv(is).entries() == reg.entries());
    std::istringstream bad("1\t2\tx\t-\th1\n");
    CHECK_THROWS_AS(NameRegistry::read_tsv(bad), InvalidArgument);
    for (const auto& [k, name] : reg.entries()) {
        INFO(name);
        CHECK(chow_novikov(2 * static_cast<long>(k.weight), k.weight) == 0);
        CHECK(2 * static_cast<long>(k.weight) >= k.stem);  // s = 2w - stem is a cobar degree
        CHECK(2 * k.weight - static_cast<unsigned>(k.stem) <= k.filtration);
    }
}

TEST_CASE("emitters")
{
    const ChartDoc& c = small_chart(1);
    CHECK(emit_svg(c) == emit_svg(c));
    CHECK(emit_tsv(c) == emit_tsv(c));

    const std::string svg = emit_svg(c);
    auto count = [](const std::string& s, const std::string& needle) {
        std::size_t n = 0;
        for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1))
            ++n;
        return n;
    };
    CHECK(count(svg, "<circle") == c.dots.size());
    CHECK(count(svg, "<line") == c.lines.size() + c.differentials.size());
    CHECK(count(svg, "marker-end") == c.differentials.size());

    const std::string tsv = emit_tsv(c);
    CHECK(count(tsv, "\ndot\t") == c.dots.size());
    CHECK(count(tsv, "\ndiff\t") == c.differentials.size());
    CHECK(tsv.find("kind\tstem\tfiltration\tweight\ts\ti\tt\tname\textra\n") != std::string::npos);

    ChartDoc one;
    one.dots.push_back({0, 3, 1, 2u, 1, 0, 4, 0, "h2"});
    CHECK(count(emit_svg(one), "<circle") == 1);
    ChartDoc empty;
    empty.metadata["page"] = "E2";
    CHECK(count(emit_svg(empty), "<circle") == 0);
    CHECK(emit_tsv(empty) == "# page=E2\nkind\tstem\tfiltration\tweight\ts\ti\tt\tname\textra\n");
}

TEST_CASE("JSON round trip")
{
    for (unsigned r : {1u, kInfinitePage}) {
        const ChartDoc& c = small_chart(r);
        CHECK(parse_json(emit_json(c)) == c);
    }
    ChartDoc classical;
    classical.dots.push_back({0, 0, 0, std::nullopt, 0, 0, 0, 0, ""});
    CHECK(parse_json(emit_json(classical)) == classical);
    CHECK_THROWS_AS(parse_json("{"), InvalidArgument);
    CHECK_THROWS_AS(parse_json(R"({"metadata":{},"dots":[],"lines":[{"kind":"h0","src":0,"dst":1}],"differentials":[]})"),
                    InvalidArgument);
}

TEST_CASE("table verification")
{
    const auto reports = verify_table(small_run());
    REQUIRE(reports.size() == 10);
    CHECK(reports[0].status == RowStatus::Pass);
    CHECK(reports[0].rank == 1);
    CHECK(reports[1].status == RowStatus::Pass);
    for (std::size_t k = 2; k < 10; ++k)
        CHECK(reports[k].status == RowStatus::OutOfWindow);

    const std::vector<TableRow> wrong = {
        {"misplaced target", {15, 1, 0}, {14, 4, 0}, 2},
        {"no differential", {14, 2, 0}, {13, 4, 0}, 2},
        {"page beyond window", {15, 1, 0}, {14, 6, 0}, 5},
        {"absent and indeed zero", {14, 2, 0}, {13, 4, 0}, 2, false},
        {"absent but present", {15, 1, 0}, {14, 3, 0}, 2, false},
    };
    const auto bad = verify_table(small_run(), wrong);
    CHECK(bad[0].status == RowStatus::Fail);
    CHECK(bad[1].status == RowStatus::Fail);
    CHECK(bad[2].status == RowStatus::OutOfWindow);
    CHECK(bad[3].status == RowStatus::Pass);
    CHECK(bad[4].status == RowStatus::Fail);
    CHECK(to_string(RowStatus::OutOfWindow) == "OUT-OF-WINDOW");
}

TEST_CASE("classical comparison is advisory")
{
    auto A = std::make_shared<const DualAlgebra>(HopfPresentation::dual_steenrod(24));
    MinimalResolution res(A, 8);
    const ChartDoc classical = build_classical_chart(res, 16);
    for (const auto& l : classical.lines) {
        const auto &a = classical.dots[l.src], &b = classical.dots[l.dst];
        CHECK(b.filtration == a.filtration + 1);
        CHECK(b.stem - a.stem == (l.kind == "h0" ? 0 : l.kind == "h1" ? 1 : 3));
    }
    const MillerReport rep = compare_miller(small_chart(1), classical);
    CHECK(rep.text().rfind("ADVISORY", 0) == 0);
    CHECK(rep.inconsistencies == 0);
    bool h4 = false;
    for (const auto& p : rep.pairs)
        if (p.source.stem == 15 && p.source.filtration == 1) {
            h4 = true;
            CHECK(p.target.stem == 14);
            CHECK(p.target.filtration == 3);
            CHECK(p.consistent);
        }
    CHECK(h4);

    ChartDoc fake = two_dot_chart();
    fake.dots[1].stem = 14;
    fake.dots[1].filtration = 7;
    fake.differentials.push_back({2, 0, 1});
    ChartDoc empty_classical;
    const MillerReport bad = compare_miller(fake, empty_classical);
    CHECK(bad.inconsistencies == 1);
}

TEST_CASE("tower hiding")
{
    ChartDoc c = two_dot_chart();
    c.metadata["prime"] = "3";
    CHECK_THROWS_AS(visible_counts(c), InvalidArgument);

    // a tower that reaches the top edge hides everything above its head
    ChartDoc tower;
    tower.metadata = {{"prime", "2"}, {"i_max", "4"}, {"s_max", "1"}, {"stem_max", "10"}, {"t_max", "16"}};
    for (unsigned i = 0; i <= 4; ++i)
        tower.dots.push_back({i, 7, 1 + i, 4u, 1, i, 8, 0, ""});
    for (unsigned i = 0; i < 4; ++i)
        tower.lines.push_back({"h0", i, i + 1});
    auto v = visible_counts(tower);
    CHECK(v.size() == 1);
    CHECK(v.at({7, 1}) == 1);
    // a tower that stops below the edge stays visible
    tower.lines.pop_back();
    v = visible_counts(tower);
    CHECK(v.size() == 5);
}
