#include "algnov/artifacts.hpp"

#include <cstdio>
#include <memory>

#include <openssl/evp.h>

#include "algnov/charts.hpp"
#include "json.hpp"

namespace algnov {

using json = nlohmann::json;

std::string sha256_hex(const std::string& bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error("sha256: digest failed");
    std::string out;
    char buf[3];
    for (unsigned k = 0; k < len; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", digest[k]);
        out += buf;
    }
    return out;
}

std::string seal_json(const std::string& canonical)
{
    json doc = json::parse(canonical);
    doc["checksum"] = "sha256:" + sha256_hex(canonical);
    return doc.dump(1) + "\n";
}

std::string unseal_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::exception& e) {
        throw IntegrityError(std::string("artifact is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("checksum") || !doc["checksum"].is_string())
        throw IntegrityError("artifact has no checksum");
    const std::string recorded = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    const std::string canonical = doc.dump(1) + "\n";
    if (recorded != "sha256:" + sha256_hex(canonical))
        throw IntegrityError("artifact checksum mismatch");
    return canonical;
}

std::string pages_json(NovikovRun& run, const ConfigEcho& config)
{
    const NovikovWindow& w = run.window();
    json doc;
    json win = json::object();
    for (const auto& [k, v] : config)
        win[k] = v;
    win["engine"] = kEngineVersion;
    doc["window"] = win;

    struct Spot {
        unsigned s, i, t, top;
    };
    std::vector<Spot> spots;
    for (unsigned t : w.degrees()) {
        const unsigned top = run.sequence(t).complex().top();
        for (unsigned s = 0; s < top && s <= w.s_max; ++s)
            for (unsigned i = 0; i <= w.i_max; ++i)
                if (w.contains(s, i, t))
                    spots.push_back({s, i, t, top});
    }

    doc["pages"] = json::array();
    for (unsigned r = 1; r <= w.r_max; ++r) {
        json entries = json::array();
        for (const auto& [s, i, t, top] : spots) {
            SpectralSequence& ss = run.sequence(t);
            const std::size_t dim = ss.dimension(s, i, r);
            if (dim == 0)
                continue;
            json e = {{"s", s}, {"i", i}, {"t", t}, {"dim", dim}};
            if (s + 1 < top) {
                const std::size_t rank = fp_rank(ss.differential(s, i, r));
                e["d_rank"] = rank;
                e["d_targets"] = rank ? json::array({json::array({s + 1, i + r, t})}) : json::array();
            } else if (top <= w.s_max) {
                e["d_rank"] = 0;  // the target degree vanishes
                e["d_targets"] = json::array();
            } else {
                e["d_rank"] = nullptr;
                e["d_targets"] = json::array();
            }
            entries.push_back(std::move(e));
        }
        doc["pages"].push_back({{"r", r}, {"entries", std::move(entries)}});
    }
    json limit = json::array();
    for (const auto& [s, i, t, top] : spots) {
        const std::size_t dim = run.sequence(t).dimension(s, i, kInfinitePage);
        if (dim)
            limit.push_back({{"s", s}, {"i", i}, {"t", t}, {"dim", dim}});
    }
    doc["pages"].push_back({{"r", "inf"}, {"entries", std::move(limit)}});

    json collapse = json::array();
    for (const auto& c : run.collapse_report())
        collapse.push_back({{"s", c.s},
                            {"i", c.i},
                            {"t", c.t},
                            {"dims", c.dims},
                            {"e_infinity", c.e_infinity},
                            {"stable_page", c.stable_page},
                            {"stable", c.stable}});
    doc["collapse_report"] = std::move(collapse);
    return seal_json(doc.dump(1) + "\n");
}

}  // namespace algnov
