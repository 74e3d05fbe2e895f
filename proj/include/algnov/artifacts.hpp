#pragma once

// Checksummed JSON artifacts written by the command-line tool.

#include <string>
#include <utility>
#include <vector>

#include "algnov/specseq.hpp"

namespace algnov {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

std::string sha256_hex(const std::string& bytes);

/// Page dump of a run: window, one block per page with every nonzero entry
/// and its d_r rank and target, the limit page, and the collapse report.
/// d_rank is null where the target lies in a truncated top degree.  The
/// document carries a sha256 checksum of its own canonical form.
std::string pages_json(NovikovRun& run, const ConfigEcho& config);

/// Adds the checksum field to a canonical JSON text.
std::string seal_json(const std::string& canonical);
/// Parses a sealed document and checks its checksum; returns the canonical
/// text without the checksum.  Throws IntegrityError.
std::string unseal_json(const std::string& text);

}  // namespace algnov
