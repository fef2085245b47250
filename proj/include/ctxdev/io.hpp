#pragma once

#include "ctxdev/io_csv.hpp"
#include "ctxdev/io_xes.hpp"

#include <string>

namespace ctxdev {

/// Picks the reader by file extension: `.xes` is XES, anything else CSV.
inline EventLog load_log(const std::string& path, const CsvMapping& mapping = {}) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".xes") == 0) return parse_xes(path);
    return parse_csv(path, mapping);
}

} // namespace ctxdev
