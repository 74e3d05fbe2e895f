// Acceptance run: one PASS/FAIL line per criterion, plus indented detail.
// ALGNOV_EXTENDED=1 also runs the stems <= 38 suite (about 17 minutes on one core).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "algnov/artifacts.hpp"
#include "algnov/charts.hpp"
#include "algnov/config.hpp"

#ifndef ALGNOV_DATA_DIR
#error "ALGNOV_DATA_DIR must point at the data directory"
#endif

using namespace algnov;

namespace {

int failures = 0;

void verdict(int number, bool pass, const std::string& what, double seconds)
{
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << number << ": " << what << "  [" << std::fixed
              << std::setprecision(1) << seconds << " s]" << std::endl;
    failures += pass ? 0 : 1;
}

void note(const std::string& line) { std::cout << "      " << line << "\n"; }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GoldenChart golden(const std::string& name)
{
    std::ifstream is(std::string(ALGNOV_DATA_DIR) + "/golden/" + name);
    if (!is)
        throw Error("missing golden file " + name);
    return read_golden(is);
}

std::size_t table_rows_with(const std::vector<RowReport>& reps, RowStatus st)
{
    return static_cast<std::size_t>(std::count_if(reps.begin(), reps.end(), [&](const auto& r) { return r.status == st; }));
}

void print_rows(const std::vector<RowReport>& reps)
{
    for (const auto& r : reps)
        note(to_string(r.status) + "  " + r.row.label + "  " + r.detail);
}

// Fast suite: the four low rows, and the cofiber-of-tau charts against their transcriptions.
void fast_suite(NovikovRun& run)
{
    auto t0 = std::chrono::steady_clock::now();
    const auto reps = verify_table(run);
    bool pass = true;
    for (const auto& r : reps) {
        const bool low = r.row.source.stem <= 18;
        if (low && (r.status != RowStatus::Pass || r.rank != 1))
            pass = false;
        if (!low && r.status == RowStatus::Fail)
            pass = false;
    }
    print_rows(reps);
    verdict(1, pass, "differential table rows with source stem <= 18 in the fast window", seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    bool charts_ok = true;
    const auto registry = NameRegistry::cofiber_tau();
    const std::pair<unsigned, const char*> pages[] = {{1, "ctau_e2.tsv"}, {2, "ctau_e3.tsv"}, {kInfinitePage, "ctau_einf.tsv"}};
    for (const auto& [r, file] : pages) {
        const ChartDoc chart = build_chart(run, r, &registry);
        const GoldenChart want = golden(file);
        auto diffs = golden_mismatches(visible_counts(chart), want, 20, 64, false);
        // an h1 tower leaving the last stem has no room to show itself, so that column is not compared
        std::vector<TowerHead> heads, expected;
        for (const auto& h : tower_heads(chart))
            if (h.stem < 20)
                heads.push_back(h);
        for (const auto& h : want.towers)
            if (h.stem < 20)
                expected.push_back(h);
        if (heads != expected) {
            std::ostringstream os;
            os << "tower heads differ:";
            for (const auto& h : heads)
                os << " " << h.kind << "(" << h.stem << "," << h.filtration << ")";
            diffs.push_back(os.str());
        }
        note(std::string(file) + ": " + (diffs.empty() ? "matches" : std::to_string(diffs.size()) + " mismatches"));
        for (const auto& d : diffs)
            note("  " + d);
        charts_ok = charts_ok && diffs.empty();
    }
    std::cout << (charts_ok ? "PASS" : "FAIL") << "  charts: cofiber-of-tau E2, E3, Einf dot counts for stems <= 20, tower heads below stem 20  ["
              << std::fixed << std::setprecision(1) << seconds_since(t0) << " s]" << std::endl;
    failures += charts_ok ? 0 : 1;
}

void extended_suite()
{
    auto t0 = std::chrono::steady_clock::now();
    const bool requested = std::getenv("ALGNOV_EXTENDED") && std::string(std::getenv("ALGNOV_EXTENDED")) == "1";
    std::vector<RowReport> reps;
    if (requested) {
        NovikovRun run(suite_config("extended").window(), 1);
        reps = verify_table(run);
    } else {
        // A window too small for any upper row: they must come back out of window, never failed.
        NovikovRun run(NovikovWindow::make(2, 20, 2, 4, 3));
        reps = verify_table(run);
        note("upper rows not computed; set ALGNOV_EXTENDED=1 for the stems <= 38 window");
    }
    print_rows(reps);
    bool pass = table_rows_with(reps, RowStatus::Fail) == 0;
    if (requested)
        for (const auto& r : reps)
            if (r.row.source.stem <= 38 && r.status == RowStatus::OutOfWindow)
                note("not reached in this window: " + r.row.label);
    verdict(2, pass, requested ? "extended window rows are PASS or OUT-OF-WINDOW, none FAIL"
                               : "rows outside the window report OUT-OF-WINDOW, none FAIL",
            seconds_since(t0));
}

void e1_cross_check()
{
    auto t0 = std::chrono::steady_clock::now();
    const unsigned T = 32, S = 8, I = 10;
    NovikovWindow w = NovikovWindow::make(2, T, S, I, 1);
    w.t_max = T;  // only t <= 32 is needed, not stem 32 at s = 8
    NovikovRun run(w);
    GrCobarComplex G(run.maps());
    auto P = std::make_shared<const DualAlgebra>(HopfPresentation::bp_mod_i(2, T));
    const MinimalResolution res(P, S + 1);  // Ext^s needs generators in degree s + 1
    std::size_t cells = 0, bad = 0;
    for (unsigned i = 0; i <= I; ++i) {
        const auto ext = ext_with_coefficients(res, ComodulePresentation::graded_coefficients(2, T, i));
        for (unsigned t = 0; t <= T; t += 2) {
            SpectralSequence& ss = run.sequence(t);
            for (unsigned s = 0; s <= std::min(S, ss.complex().top()); ++s) {
                const std::size_t filtered = ss.dimension(s, i, 1);
                const std::size_t graded = G.cohomology_dimension(s, i, t);
                const std::size_t resolved = s < ext.size() ? ext[s][t] : 0;
                ++cells;
                if (filtered != graded || graded != resolved) {
                    ++bad;
                    note("(s,i,t)=(" + std::to_string(s) + "," + std::to_string(i) + "," + std::to_string(t) +
                         "): filtered " + std::to_string(filtered) + ", graded " + std::to_string(graded) +
                         ", resolution " + std::to_string(resolved));
                }
            }
        }
    }
    note(std::to_string(cells) + " tri-degrees compared");
    verdict(3, bad == 0, "E1 equals graded cobar cohomology and Ext over P for t <= 32, s <= 8, i <= 10",
            seconds_since(t0));
}

void abutment_oracle()
{
    auto t0 = std::chrono::steady_clock::now();
    const unsigned T = 22, K = 8;
    auto maps = std::make_shared<const HopfStructureMaps>(TruncationWindow::make(2, T, K));
    CobarComplex C(maps);
    std::uint64_t basis = 0;
    std::size_t cells = 0, bad = 0;
    for (unsigned t = 0; t <= T; t += 2) {
        const unsigned top = t / 2 + 1;  // the whole complex: no truncation
        for (unsigned s = 0; s <= top; ++s)
            basis += C.dimension(s, t);
        const ComplexSource src = cobar_source(C, t, top);
        SpectralSequence ss(FilteredComplex(reduce(src).reduced));
        for (unsigned s = 0; s <= top; ++s) {
            const auto gr = graded_homology(src, s);
            for (unsigned i = 0; i < gr.size(); ++i) {
                ++cells;
                if (gr[i] != ss.dimension(s, i, kInfinitePage)) {
                    ++bad;
                    note("(s,i,t)=(" + std::to_string(s) + "," + std::to_string(i) + "," + std::to_string(t) + ")");
                }
            }
        }
    }
    note(std::to_string(basis) + " cobar basis elements, " + std::to_string(cells) + " tri-degrees compared");
    verdict(4, bad == 0 && basis <= 20000, "Einf equals the associated graded of cobar cohomology over Z/2^8, t <= 22",
            seconds_since(t0));
}

void koszul()
{
    auto t0 = std::chrono::steady_clock::now();
    const KoszulReport rep = koszul_check(2, 16, 4, 8);
    for (const auto& f : rep.failures)
        note(f);
    note(std::string("d1 tau_n = q_n: ") + (rep.d1_hits_generators ? "yes" : "no") +
         "; E2 in filtration 0: " + (rep.e2_in_weight_zero ? "yes" : "no") +
         "; Tor maps zero for n <= 4: " + (rep.tor_maps_vanish ? "yes" : "no"));
    verdict(5, rep.all_pass(), "Koszul complex properties through internal degree 16", seconds_since(t0));
}

void structure_axioms()
{
    auto t0 = std::chrono::steady_clock::now();
    const HopfStructureMaps maps(TruncationWindow::make(2, 32, 8));
    const AxiomReport rep = check_axioms(maps);
    for (const auto& c : rep.checks)
        if (!c.pass)
            note("failed: " + c.name + " " + c.detail);
    note(std::to_string(rep.checks.size()) + " checks");
    verdict(6, !rep.checks.empty() && rep.all_pass(), "Hopf algebroid axioms and the right unit congruence, t <= 32",
            seconds_since(t0));
}

void classical_golden()
{
    auto t0 = std::chrono::steady_clock::now();
    const unsigned stem_max = 20, s_max = 10;
    auto A = std::make_shared<const DualAlgebra>(HopfPresentation::dual_steenrod(stem_max + s_max));
    const MinimalResolution res(A, s_max);
    const ChartDoc chart = build_classical_chart(res, stem_max);
    const auto diffs = golden_mismatches(dot_counts(chart), golden("classical.tsv"), stem_max, s_max, true);
    for (const auto& d : diffs)
        note(d);
    note(std::to_string(chart.dots.size()) + " dots through filtration " + std::to_string(s_max));
    verdict(7, diffs.empty(), "classical Adams E2 dot counts match the transcribed chart for stems <= 20",
            seconds_since(t0));
}

void complex_sanity(NovikovRun& fast)
{
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    // d∘d = 0, and every differential preserves internal degree
    auto maps = std::make_shared<const HopfStructureMaps>(TruncationWindow::make(2, 24, 8));
    CobarComplex C(maps);
    GrCobarComplex G(maps);
    std::size_t pairs = 0;
    for (unsigned t = 0; t <= 24; t += 2)
        for (unsigned s = 0; s + 1 <= t / 2; ++s) {
            const SparseMatrix d0 = C.differential(s, t), d1 = C.differential(s + 1, t);
            ++pairs;
            if (!is_zero(multiply(C.ring(), d0, d1))) {
                pass = false;
                note("cobar d∘d != 0 at s=" + std::to_string(s) + " t=" + std::to_string(t));
            }
            for (const auto& row : d0.rows)
                for (std::uint32_t k : row.idx) {
                    const CobarElement& e = C.basis(s + 1, t)[k];
                    std::uint64_t deg = degree(2, e.coeff);
                    for (const auto& m : e.word)
                        deg += degree(2, m);
                    if (deg != t) {
                        pass = false;
                        note("differential leaves internal degree " + std::to_string(t));
                    }
                }
            for (unsigned i = 0; i <= 6; ++i) {
                ++pairs;
                if (!is_zero(multiply(G.field(), G.differential(s, i, t), G.differential(s + 1, i, t)))) {
                    pass = false;
                    note("graded d∘d != 0 at s=" + std::to_string(s) + " i=" + std::to_string(i));
                }
            }
        }
    note(std::to_string(pairs) + " composable pairs checked");

    // d_r from the run: all nonzero differentials lie inside one internal degree by construction
    // of the slices; check their shapes against the page bases on both ends.
    for (const auto& d : fast.differentials()) {
        SpectralSequence& ss = fast.sequence(d.t);
        if (d.matrix.rows() != ss.dimension(d.s, d.i, d.r) || d.matrix.cols() != ss.dimension(d.s + 1, d.i + d.r, d.r)) {
            pass = false;
            note("d_r shape mismatch at t=" + std::to_string(d.t));
        }
    }

    // byte-identical artifacts across thread counts
    const RunConfig cfg = suite_config("fast");
    NovikovRun other(cfg.window(), 3);
    const auto registry = NameRegistry::cofiber_tau();
    bool same = pages_json(fast, cfg.echo()) == pages_json(other, cfg.echo());
    for (unsigned r : {1u, kInfinitePage}) {
        const ChartDoc a = build_chart(fast, r, &registry), b = build_chart(other, r, &registry);
        same = same && emit_svg(a) == emit_svg(b) && emit_tsv(a) == emit_tsv(b) && emit_json(a) == emit_json(b);
    }
    note(std::string("pages and charts with 1 and 3 threads: ") + (same ? "identical" : "differ"));
    verdict(8, pass && same, "d∘d = 0, d_r within one internal degree, determinism across thread counts",
            seconds_since(t0));
}

}  // namespace

int main()
{
    try {
        std::cout << "acceptance: engine " << kEngineVersion << std::endl;
        auto t0 = std::chrono::steady_clock::now();
        NovikovRun fast(suite_config("fast").window(), 1);
        note("fast window built in " + std::to_string(static_cast<int>(seconds_since(t0))) + " s");
        fast_suite(fast);
        extended_suite();
        e1_cross_check();
        abutment_oracle();
        koszul();
        structure_axioms();
        classical_golden();
        complex_sanity(fast);
    }
    catch (const std::exception& e) {
        std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failed" : std::string("acceptance: all passed"))
              << std::endl;
    return failures ? 1 : 0;
}
