#include "nulleval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "nulleval/errors.hpp"

namespace nulleval {

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Signed two-decimal percent with improvements flagged by '+'.
std::string signed_percent(double v) {
    const std::string body = format_percent2(v);
    if (v > 0 && body != "0.00") return "+" + body;
    return body;
}

std::string percent_count(std::size_t count, std::size_t n) {
    return format_percent2(refusal_ratio_percent(count, n)) + "% (" + std::to_string(count) + ")";
}

using CellIndex = std::map<std::string, std::map<Dataset, std::map<Technique, CellResult>>>;

void markdown_table(std::ostringstream& out, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    out << "|";
    for (const auto& h : header) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : rows) {
        out << "|";
        for (const auto& cell : row) out << " " << cell << " |";
        out << "\n";
    }
    out << "\n";
}

}  // namespace

ReportBundle render_report(const std::vector<CellResult>& cells, Technique baseline,
                           const std::string& title) {
    if (cells.empty()) throw IncompleteRun("no cells to report", {});

    CellIndex index;
    std::set<Dataset> dataset_set;
    std::set<std::string> model_set;
    std::set<Technique> technique_set;
    for (const auto& cell : cells) {
        index[cell.model][cell.dataset][cell.technique] = cell;
        dataset_set.insert(cell.dataset);
        model_set.insert(cell.model);
        technique_set.insert(cell.technique);
    }

    std::vector<std::string> missing;
    for (const auto& [model, by_dataset] : index) {
        for (const auto& [dataset, by_technique] : by_dataset) {
            const auto it = by_technique.find(baseline);
            if (it == by_technique.end() || it->second.n == 0) {
                missing.push_back(model + "/" + std::string(dataset_name(dataset)) + "/" +
                                  std::string(technique_name(baseline)));
            }
        }
    }
    if (!missing.empty()) {
        std::string what = "missing baseline cells:";
        for (const auto& m : missing) what += " " + m;
        throw IncompleteRun(what, missing);
    }

    std::vector<Dataset> datasets;
    for (Dataset d : kAllDatasets) {
        if (dataset_set.count(d)) datasets.push_back(d);
    }
    std::vector<Technique> techniques;
    for (Technique t : kAllTechniques) {
        if (technique_set.count(t)) techniques.push_back(t);
    }
    const std::vector<std::string> models(model_set.begin(), model_set.end());

    auto find_cell = [&](const std::string& model, Dataset d, Technique t) -> const CellResult* {
        const auto mit = index.find(model);
        if (mit == index.end()) return nullptr;
        const auto dit = mit->second.find(d);
        if (dit == mit->second.end()) return nullptr;
        const auto tit = dit->second.find(t);
        if (tit == dit->second.end() || tit->second.n == 0) return nullptr;
        return &tit->second;
    };

    std::ostringstream md;
    md << "# " << title << "\n\n";
    md << "Baseline technique: " << technique_name(baseline) << "\n\n";

    std::vector<std::string> header{"model", "technique"};
    for (Dataset d : datasets) header.push_back(std::string(dataset_name(d)));

    md << "## Absolute accuracy (%)\n\n";
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& model : models) {
            for (Technique t : techniques) {
                std::vector<std::string> row{model, std::string(technique_name(t))};
                bool any = false;
                for (Dataset d : datasets) {
                    if (const auto* cell = find_cell(model, d, t)) {
                        row.push_back(format_percent2(accuracy_percent(*cell)));
                        any = true;
                    } else {
                        row.push_back("—");
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
        markdown_table(md, header, rows);
    }

    for (Technique t : techniques) {
        if (t == baseline) continue;
        md << "## Relative change: " << technique_name(t) << " vs " << technique_name(baseline)
           << " (%)\n\n";
        std::vector<std::string> rel_header{"model"};
        for (Dataset d : datasets) rel_header.push_back(std::string(dataset_name(d)));
        std::vector<std::vector<std::string>> rows;
        for (const auto& model : models) {
            std::vector<std::string> row{model};
            bool any = false;
            for (Dataset d : datasets) {
                const auto* treat = find_cell(model, d, t);
                const auto* base = find_cell(model, d, baseline);
                if (!treat || !base) {
                    row.push_back("—");
                    continue;
                }
                const double base_acc = accuracy_percent(*base);
                if (base_acc <= 0.0) {
                    row.push_back("—");  // undefined, zero baseline
                    any = true;
                    continue;
                }
                row.push_back(signed_percent(
                    relative_change_percent(accuracy_percent(*treat), base_acc)));
                any = true;
            }
            if (any) rows.push_back(std::move(row));
        }
        markdown_table(md, rel_header, rows);
    }

    if (technique_set.count(Technique::NullShot) && baseline != Technique::NullShot) {
        md << "## Hallucination degree (per model, across datasets)\n\n";
        std::vector<std::string> deg_header{"model"};
        for (Dataset d : datasets) deg_header.push_back(std::string(dataset_name(d)));
        std::vector<std::vector<std::string>> rows;
        for (const auto& model : models) {
            std::vector<std::string> row{model};
            bool any = false;
            for (Dataset d : datasets) {
                const auto mit = index.find(model);
                const auto dit = mit->second.find(d);
                if (dit == mit->second.end() || !dit->second.count(Technique::NullShot)) {
                    row.push_back("—");
                    continue;
                }
                try {
                    row.push_back(signed_percent(hallucination_degree(dit->second, baseline)));
                    any = true;
                } catch (const Error&) {
                    row.push_back("—");
                }
            }
            if (any) rows.push_back(std::move(row));
        }
        markdown_table(md, deg_header, rows);
    }

    md << "## Refusals\n\n";
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& model : models) {
            for (Technique t : techniques) {
                std::vector<std::string> row{model, std::string(technique_name(t))};
                bool any = false;
                for (Dataset d : datasets) {
                    if (const auto* cell = find_cell(model, d, t)) {
                        row.push_back(percent_count(cell->refusals, cell->n));
                        any = true;
                    } else {
                        row.push_back("—");
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
        markdown_table(md, header, rows);
    }

    md << "## Empty responses\n\n";
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& model : models) {
            for (Technique t : techniques) {
                std::vector<std::string> row{model, std::string(technique_name(t))};
                bool any = false;
                for (Dataset d : datasets) {
                    if (const auto* cell = find_cell(model, d, t)) {
                        row.push_back(percent_count(cell->empty, cell->n));
                        any = true;
                    } else {
                        row.push_back("—");
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
        markdown_table(md, header, rows);
    }

    const std::pair<Technique, Technique> reduction_pairs[] = {
        {Technique::ZeroShot, Technique::NullShot},
        {Technique::ZeroCot, Technique::NullCot},
    };
    std::ostringstream reductions;
    for (const auto& [base_t, treat_t] : reduction_pairs) {
        if (!technique_set.count(base_t) || !technique_set.count(treat_t)) continue;
        std::vector<std::pair<CellResult, CellResult>> pairs;
        for (const auto& model : models) {
            for (Dataset d : datasets) {
                const auto* b = find_cell(model, d, base_t);
                const auto* t = find_cell(model, d, treat_t);
                if (b && t) pairs.emplace_back(*b, *t);
            }
        }
        if (pairs.empty()) continue;
        const auto summary = empty_reduction_summary(pairs, ReductionPopulation::AllPairs,
                                                     ZeroBaselinePolicy::CountAsZero);
        reductions << "- " << technique_name(treat_t) << " vs " << technique_name(base_t)
                   << ": mean per-pair empty-response reduction "
                   << format_percent2(summary.mean_percent) << "% over " << summary.pairs_used
                   << " pairs\n";
    }
    if (const std::string body = reductions.str(); !body.empty()) {
        md << "## Empty-response reduction\n\n" << body << "\n";
    }

    ReportBundle bundle;
    bundle.markdown = md.str();

    std::ostringstream cells_csv;
    cells_csv << "model,dataset,technique,n,correct,accuracy,relative_change,no_answer,refusals,"
                 "empty\n";
    for (const auto& model : models) {
        for (Dataset d : datasets) {
            for (Technique t : techniques) {
                const auto* cell = find_cell(model, d, t);
                if (!cell) continue;
                const double acc = accuracy_percent(*cell);
                std::string rel;
                if (const auto* base = find_cell(model, d, baseline)) {
                    const double base_acc = accuracy_percent(*base);
                    if (base_acc > 0.0) rel = full_precision(relative_change_percent(acc, base_acc));
                }
                cells_csv << csv_field(model) << ',' << dataset_name(d) << ','
                          << technique_name(t) << ',' << cell->n << ',' << cell->correct << ','
                          << full_precision(acc) << ',' << rel << ',' << cell->no_answer << ','
                          << cell->refusals << ',' << cell->empty << '\n';
            }
        }
    }
    bundle.csv_files.emplace_back("cells.csv", cells_csv.str());

    std::ostringstream ratio_csv;
    ratio_csv << "model,dataset,technique,kind,count,n,percent\n";
    for (const auto& model : models) {
        for (Dataset d : datasets) {
            for (Technique t : techniques) {
                const auto* cell = find_cell(model, d, t);
                if (!cell) continue;
                ratio_csv << csv_field(model) << ',' << dataset_name(d) << ','
                          << technique_name(t) << ",refusal," << cell->refusals << ',' << cell->n
                          << ',' << full_precision(refusal_ratio_percent(cell->refusals, cell->n))
                          << '\n';
                ratio_csv << csv_field(model) << ',' << dataset_name(d) << ','
                          << technique_name(t) << ",empty," << cell->empty << ',' << cell->n << ','
                          << full_precision(empty_ratio_percent(*cell)) << '\n';
            }
        }
    }
    bundle.csv_files.emplace_back("response_ratios.csv", ratio_csv.str());

    return bundle;
}

}  // namespace nulleval
