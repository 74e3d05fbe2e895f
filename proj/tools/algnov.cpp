// Command-line driver: structure maps, cobar dumps, algebraic Novikov pages
// and charts, classical Adams charts, and the consolidated verification run.
//
// Exit codes: 0 all checks pass, 2 out-of-window rows but no failures,
// 1 failure or usage error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "algnov/artifacts.hpp"
#include "algnov/charts.hpp"
#include "algnov/config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace algnov;

namespace {

constexpr int kOk = 0, kFail = 1, kSkips = 2;

std::mutex output_mutex;

void write_file(const fs::path& path, const std::string& bytes)
{
    std::lock_guard lock(output_mutex);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << bytes;
    if (!os)
        throw Error("cannot write " + path.string());
    std::cout << "wrote " << path.string() << "\n";
}

std::string read_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw InvalidArgument("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string exps_key(const Exps& e, unsigned N)
{
    std::string out;
    for (unsigned n = 0; n < N; ++n)
        out += (n ? "," : "") + std::to_string(e[n]);
    return out;
}

json exps_json(const Exps& e, unsigned N)
{
    json a = json::array();
    for (unsigned n = 0; n < N; ++n)
        a.push_back(e[n]);
    return a;
}

// Flag values as given; unset options stay empty so file values survive.
struct Flags {
    std::string config_file;
    std::optional<unsigned> prime, stem_max, s_max, i_max, r_max, precision, t_max, threads;
    std::optional<std::string> out, suite;
    std::vector<std::string> formats;
    bool force = false;
};

RunConfig resolve(const Flags& f)
{
    std::map<std::string, ConfigValue> file;
    if (!f.config_file.empty())
        file = parse_toml_subset(read_file(f.config_file));
    // A suite flag replaces any suite named in the file but stays below the file's explicit keys.
    RunConfig cfg;
    if (f.suite) {
        cfg = suite_config(*f.suite);
        file.erase("suite");
    }
    if (const char* env = std::getenv("ALGNOV_OUT"); env && *env)
        cfg.out = env;
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    apply_config(cfg, file);
    if (const char* env = std::getenv("ALGNOV_THREADS"); env && *env) {
        try {
            cfg.threads = std::max(1, std::stoi(env));
        }
        catch (const std::logic_error&) {
            throw InvalidArgument("ALGNOV_THREADS must be a positive integer");
        }
    }
    if (f.prime)
        cfg.prime = *f.prime;
    if (f.stem_max)
        cfg.stem_max = *f.stem_max, cfg.suite.clear();
    if (f.s_max)
        cfg.s_max = *f.s_max, cfg.suite.clear();
    if (f.i_max)
        cfg.i_max = *f.i_max, cfg.suite.clear();
    if (f.r_max)
        cfg.r_max = *f.r_max, cfg.suite.clear();
    if (f.precision)
        cfg.precision = *f.precision;
    if (f.t_max)
        cfg.t_max = *f.t_max;
    if (f.threads)
        cfg.threads = std::max(1u, *f.threads);
    if (f.out)
        cfg.out = *f.out;
    if (!f.formats.empty())
        cfg.formats = f.formats;
    cfg.force = cfg.force || f.force;
    for (const auto& fmt : cfg.formats)
        if (fmt != "svg" && fmt != "tsv" && fmt != "json")
            throw InvalidArgument("unknown format '" + fmt + "' (expected svg, tsv or json)");
    if (cfg.prime < 2)
        throw InvalidArgument("prime must be at least 2");
    return cfg;
}

std::string echo_line(const RunConfig& cfg)
{
    std::string out;
    for (const auto& [k, v] : cfg.echo())
        out += (out.empty() ? "" : "; ") + k + "=" + v;
    return out;
}

void write_chart(const RunConfig& cfg, ChartDoc chart, const std::string& stem)
{
    chart.metadata["config"] = echo_line(cfg);
    for (const auto& fmt : cfg.formats) {
        const std::string body = fmt == "svg" ? emit_svg(chart) : fmt == "tsv" ? emit_tsv(chart) : emit_json(chart);
        write_file(fs::path(cfg.out) / (stem + "." + fmt), body);
    }
    for (const auto& w : chart.warnings)
        std::cerr << "warning: " << w << "\n";
}

NovikovRun make_run(const RunConfig& cfg)
{
    return NovikovRun(cfg.window(), cfg.threads, cfg.force ? 0 : cfg.basis_cap);
}

unsigned parse_page(const std::string& page)
{
    if (page == "inf" || page == "Einf")
        return kInfinitePage;
    const std::string digits = page.rfind('E', 0) == 0 ? page.substr(1) : page;
    unsigned n = 0;
    try {
        n = static_cast<unsigned>(std::stoul(digits));
    }
    catch (const std::logic_error&) {
        throw InvalidArgument("page must be a number >= 2 or 'inf'");
    }
    if (n < 2)
        throw InvalidArgument("page must be a number >= 2 or 'inf'");
    return n - 1;  // Adams page E_n is filtration jump n - 1
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_structure_maps(const RunConfig& cfg)
{
    auto maps = std::make_shared<const HopfStructureMaps>(
        TruncationWindow::make(cfg.prime, cfg.t_max, cfg.precision.value_or(8)));
    const auto& w = maps->window();
    json doc;
    doc["window"] = {{"prime", w.p}, {"tmax", w.t_max}, {"precision", w.K}, {"generators", w.N},
                     {"engine", kEngineVersion}};
    for (const auto& [k, v] : cfg.echo())
        doc["config"][k] = v;
    doc["right_unit"] = json::array();
    doc["coproduct"] = json::array();
    // n = 0 records the unit: eta_R(1) = 1 and Delta(1) = 1 (x) 1
    for (unsigned n = 0; n <= w.N; ++n) {
        Exps e{};
        if (n)
            e[n - 1] = 1;
        json eta = json::array();
        for (const auto& term : maps->right_unit(e))
            eta.push_back({{"coeff", term.coeff}, {"v", exps_json(term.v, w.N)}, {"t", exps_json(term.t, w.N)}});
        doc["right_unit"].push_back({{"generator", n ? "v" + std::to_string(n) : "1"}, {"terms", eta}});
        json delta = json::array();
        for (const auto& term : maps->coproduct(e))
            delta.push_back({{"coeff", term.coeff},
                             {"v", exps_json(term.v, w.N)},
                             {"t", exps_json(term.left, w.N)},
                             {"t_right", exps_json(term.right, w.N)}});
        doc["coproduct"].push_back({{"generator", n ? "t" + std::to_string(n) : "1"}, {"terms", delta}});
    }
    const AxiomReport axioms = check_axioms(*maps);
    doc["axioms"] = json::array();
    for (const auto& c : axioms.checks)
        doc["axioms"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    write_file(fs::path(cfg.out) / "structure-maps.json", doc.dump(1) + "\n");
    for (const auto& c : axioms.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    return axioms.all_pass() ? kOk : kFail;
}

int cmd_cobar_dump(const RunConfig& cfg, unsigned s, unsigned t, std::optional<unsigned> weight)
{
    auto maps = std::make_shared<const HopfStructureMaps>(
        TruncationWindow::make(cfg.prime, std::max(cfg.t_max, t), cfg.precision.value_or(8)));
    const unsigned N = maps->window().N;
    std::ostringstream os;
    std::string name;
    if (weight) {
        GrCobarComplex G(maps);
        os << "# graded cobar complex p=" << cfg.prime << " s=" << s << " i=" << *weight << " t=" << t << "\n";
        os << "# basis of degree " << s << "\n";
        for (const auto& e : G.basis(s, *weight, t))
            os << to_string(e, N, true, *weight) << "\n";
        os << "# differential to degree " << s + 1 << "\n";
        write_matrix(os, G.differential(s, *weight, t).to_dense(G.field()));
        name = "grcobar-s" + std::to_string(s) + "-i" + std::to_string(*weight) + "-t" + std::to_string(t) + ".txt";
    } else {
        CobarComplex C(maps);
        os << "# cobar complex p=" << cfg.prime << " K=" << maps->window().K << " s=" << s << " t=" << t << "\n";
        os << "# basis of degree " << s << "\n";
        for (const auto& e : C.basis(s, t))
            os << to_string(e, N) << "\n";
        os << "# differential to degree " << s + 1 << "\n";
        write_matrix(os, C.differential(s, t).to_dense(C.ring()));
        name = "cobar-s" + std::to_string(s) + "-t" + std::to_string(t) + ".txt";
    }
    write_file(fs::path(cfg.out) / name, os.str());
    return kOk;
}

void print_table(const std::vector<RowReport>& reports)
{
    for (const auto& rep : reports)
        std::cout << to_string(rep.status) << "  " << rep.row.label << "  (" << rep.row.source.stem << ","
                  << rep.row.source.filtration << ") -> (" << rep.row.target.stem << "," << rep.row.target.filtration
                  << ") length " << rep.row.length << "  " << rep.detail << "\n";
}

// Rows whose source stem lies beyond stem_max are out of scope for the window;
// only rows inside the stem range that still could not be checked count as skips.
int table_exit(const std::vector<RowReport>& reports, unsigned stem_max)
{
    int code = kOk;
    for (const auto& rep : reports) {
        if (rep.status == RowStatus::Fail)
            return kFail;
        if (rep.status == RowStatus::OutOfWindow && rep.row.source.stem <= static_cast<int>(stem_max))
            code = kSkips;
    }
    return code;
}

int cmd_novikov(const RunConfig& cfg)
{
    NovikovRun run = make_run(cfg);
    write_file(fs::path(cfg.out) / "pages.json", pages_json(run, cfg.echo()));
    const auto registry = NameRegistry::cofiber_tau();
    write_chart(cfg, build_chart(run, 1, &registry), "chart-E2");
    write_chart(cfg, build_chart(run, kInfinitePage, &registry), "chart-Einf");
    const auto reports = verify_table(run);
    print_table(reports);
    return table_exit(reports, run.window().stem_max);
}

int cmd_chart(const RunConfig& cfg, const std::string& page)
{
    const unsigned r = parse_page(page);
    NovikovRun run = make_run(cfg);
    const auto registry = NameRegistry::cofiber_tau();
    const ChartDoc chart = build_chart(run, r, &registry);
    write_chart(cfg, chart, "chart-" + chart.metadata.at("page"));
    return kOk;
}

int cmd_adams(const RunConfig& cfg, const std::string& golden)
{
    const unsigned t_max = cfg.stem_max + cfg.s_max;
    if (t_max > 255)
        throw InvalidArgument("adams: stem_max + s_max must stay below 256");
    auto A = std::make_shared<const DualAlgebra>(HopfPresentation::dual_steenrod(t_max));
    const MinimalResolution res(A, cfg.s_max);
    ChartDoc chart = build_classical_chart(res, cfg.stem_max);
    write_chart(cfg, chart, "adams-E2");
    write_file(fs::path(cfg.out) / "generators.tsv", generators_tsv(res));
    write_file(fs::path(cfg.out) / "products.tsv", products_tsv(res, {0, 1, 2}));
    if (golden.empty())
        return kOk;
    std::istringstream is(read_file(golden));
    const auto diffs = golden_mismatches(dot_counts(chart), read_golden(is), std::min(20, static_cast<int>(cfg.stem_max)),
                                         cfg.s_max, true);
    for (const auto& d : diffs)
        std::cout << "MISMATCH " << d << "\n";
    std::cout << (diffs.empty() ? "PASS" : "FAIL") << " classical chart against " << golden << "\n";
    return diffs.empty() ? kOk : kFail;
}

int cmd_verify(const RunConfig& cfg, const std::string& pages_file)
{
    bool failed = false;
    auto report = [&](bool pass, const std::string& what) {
        std::cout << (pass ? "PASS  " : "FAIL  ") << what << "\n";
        failed = failed || !pass;
    };

    json stored;
    if (!pages_file.empty()) {
        stored = json::parse(unseal_json(read_file(pages_file)));  // throws IntegrityError
        report(true, "pages artifact checksum " + pages_file);
        const json& win = stored.at("window");
        const ConfigEcho echo = cfg.echo();
        for (const char* key : {"prime", "stem_max", "s_max", "i_max", "r_max", "precision"}) {
            const auto it = std::find_if(echo.begin(), echo.end(), [&](const auto& kv) { return kv.first == key; });
            if (!win.contains(key) || win[key] != it->second)
                throw IntegrityError(std::string("pages artifact was written for a different window (") + key + ")");
        }
        if (win.value("engine", "") != kEngineVersion)
            throw IntegrityError("pages artifact was written by a different engine");
    }

    auto maps = std::make_shared<const HopfStructureMaps>(TruncationWindow::make(cfg.prime, 32, 8));
    const AxiomReport axioms = check_axioms(*maps);
    for (const auto& c : axioms.checks)
        report(c.pass, "structure maps: " + c.name);

    const KoszulReport koszul = koszul_check(cfg.prime, cfg.prime == 2 ? 16 : 24, 4, 8);
    report(koszul.d1_hits_generators, "Koszul: d1 tau_n = q_n");
    report(koszul.e2_in_weight_zero, "Koszul: E2 concentrated in filtration 0");
    report(koszul.tor_maps_vanish, "Koszul: Tor maps vanish for n <= 4");
    for (const auto& f : koszul.failures)
        std::cout << "      " << f << "\n";

    NovikovRun run = make_run(cfg);
    if (!pages_file.empty()) {
        json fresh = json::parse(unseal_json(pages_json(run, cfg.echo())));
        fresh.erase("window");
        stored.erase("window");
        report(fresh == stored, "pages artifact matches a recomputation");
    }

    // E_1 against the associated graded cobar complex, on the low degrees
    GrCobarComplex G(run.maps());
    bool e1_ok = true;
    const NovikovWindow& w = run.window();
    for (unsigned t : w.degrees()) {
        if (t > 16)
            break;
        SpectralSequence& ss = run.sequence(t);
        for (unsigned s = 0; s < ss.complex().top() && s <= std::min(5u, w.s_max); ++s)
            for (unsigned i = 0; i <= w.i_max; ++i)
                if (ss.dimension(s, i, 1) != G.cohomology_dimension(s, i, t)) {
                    e1_ok = false;
                    std::cout << "      E1 mismatch at (s,i,t) = (" << s << "," << i << "," << t << ")\n";
                }
    }
    report(e1_ok, "E1 equals graded cobar cohomology for t <= 16, s <= 5");

    try {
        run.collapse_report();
        report(true, "page dimensions agree with differential ranks");
    }
    catch (const ConsistencyError& e) {
        report(false, e.what());
    }

    const auto reports = verify_table(run);
    print_table(reports);

    if (w.p == 2) {
        const unsigned t_max = std::min(255u, w.stem_max + w.s_max);
        auto A = std::make_shared<const DualAlgebra>(HopfPresentation::dual_steenrod(t_max));
        const MinimalResolution res(A, w.s_max);
        const MillerReport miller = compare_miller(build_chart(run, 1), build_classical_chart(res, w.stem_max));
        write_file(fs::path(cfg.out) / "miller.txt", miller.text());
        std::cout << "ADVISORY  classical comparison: " << miller.pairs.size() << " pairs, " << miller.inconsistencies
                  << " inconsistencies\n";
    }

    if (failed)
        return kFail;
    return table_exit(reports, w.stem_max);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Algebraic Novikov spectral sequence and Adams chart engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kEngineVersion);

    Flags f;
    auto add_common = [&](CLI::App* sub, bool window) {
        sub->add_option("--config", f.config_file, "TOML file with run settings; flags win");
        sub->add_option("--prime", f.prime, "prime p");
        sub->add_option("--precision", f.precision, "coefficients mod p^K");
        sub->add_option("--out", f.out, "output directory (default $ALGNOV_OUT or algnov-out)");
        sub->add_option("--threads", f.threads, "worker threads (default $ALGNOV_THREADS or all cores)");
        sub->add_option("--format", f.formats, "chart formats: svg, tsv, json")->delimiter(',');
        if (window) {
            sub->add_option("--stem-max", f.stem_max, "largest stem");
            sub->add_option("--s-max", f.s_max, "largest cobar degree");
            sub->add_option("--i-max", f.i_max, "largest extra filtration");
            sub->add_option("--r-max", f.r_max, "largest differential jump");
            sub->add_option("--suite", f.suite, "window preset: fast, extended or full");
            sub->add_flag("--force", f.force, "ignore the window size guard");
        }
    };

    auto* sm = app.add_subcommand("structure-maps", "dump right unit and coproduct tables and check the axioms");
    add_common(sm, false);
    sm->add_option("--tmax", f.t_max, "internal degree cap");

    unsigned dump_s = 1, dump_t = 2;
    std::optional<unsigned> dump_weight;
    auto* cd = app.add_subcommand("cobar-dump", "basis and differential of one cobar bidegree");
    add_common(cd, false);
    cd->add_option("--tmax", f.t_max, "internal degree cap");
    cd->add_option("--s", dump_s, "cochain degree")->required();
    cd->add_option("--t", dump_t, "internal degree")->required();
    cd->add_option("--weight", dump_weight, "dump the associated graded complex in this weight");

    auto* nv = app.add_subcommand("novikov", "pages, charts and the differential table for a window");
    add_common(nv, true);

    std::string page = "inf";
    auto* ch = app.add_subcommand("chart", "chart of one page");
    add_common(ch, true);
    ch->add_option("--page", page, "Adams page number (2, 3, ...) or inf");

    std::string golden;
    auto* ad = app.add_subcommand("adams", "classical Adams E2 chart from a minimal resolution");
    add_common(ad, true);
    ad->add_option("--golden", golden, "compare dot counts with a transcribed chart");

    std::string pages_file;
    auto* vf = app.add_subcommand("verify", "run every check and report");
    add_common(vf, true);
    vf->add_option("--pages", pages_file, "pages.json to check against a recomputation");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFail;
    }

    try {
        const RunConfig cfg = resolve(f);
        if (*sm)
            return cmd_structure_maps(cfg);
        if (*cd)
            return cmd_cobar_dump(cfg, dump_s, dump_t, dump_weight);
        if (*nv)
            return cmd_novikov(cfg);
        if (*ch)
            return cmd_chart(cfg, page);
        if (*ad)
            return cmd_adams(cfg, golden);
        if (*vf)
            return cmd_verify(cfg, pages_file);
    }
    catch (const PrecisionExhausted& e) {
        std::cerr << "error: " << e.what() << " (raise --precision)\n";
    }
    catch (const WindowTooLarge& e) {
        std::cerr << "error: " << e.what() << " (shrink the window or pass --force)\n";
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kFail;
}
