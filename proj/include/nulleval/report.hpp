#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nulleval/metrics.hpp"
#include "nulleval/types.hpp"

namespace nulleval {

struct ReportBundle {
    std::string markdown;
    // (file name, contents); CSV companions keep full precision.
    std::vector<std::pair<std::string, std::string>> csv_files;
};

// Renders the paper-style tables from computed cells: a relative-change
// table per technique against the baseline (signed two-decimal percents,
// improvements carrying a '+' flag, undefined cells as an em dash), an
// absolute accuracy table, refusal and empty-response tables with
// "percent (count)" cells, the per-model hallucination-degree vectors, and
// empty-response reduction summaries when the paired techniques are
// present. Throws IncompleteRun when the cell set is empty or a
// (model, dataset) group lacks its baseline cell.
ReportBundle render_report(const std::vector<CellResult>& cells, Technique baseline,
                           const std::string& title = "run report");

}  // namespace nulleval
