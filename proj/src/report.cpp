#include "har/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

namespace har {

namespace {

const char* kDash = "—";  // em dash for missing cells

struct CellKey {
    std::string dataset;
    SplitMode split;
    std::string sim_kind;  // empty for DL

    bool operator<(const CellKey& other) const {
        return std::tie(dataset, split, sim_kind) <
               std::tie(other.dataset, other.split, other.sim_kind);
    }
};

std::string percent(double accuracy) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << accuracy * 100.0;
    return out.str();
}

// Display width counted in code points (the em dash is 3 UTF-8 bytes but
// one column).
std::size_t display_width(const std::string& text) {
    std::size_t width = 0;
    for (std::size_t i = 0; i < text.size();) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        i += c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
        ++width;
    }
    return width;
}

std::string pad(const std::string& text, std::size_t width) {
    std::string out = text;
    for (std::size_t display = display_width(text); display < width; ++display) {
        out.push_back(' ');
    }
    return out;
}

}  // namespace

ReportTable report_table(const std::vector<RunResult>& results) {
    // Datasets in order of first appearance.
    std::vector<std::string> datasets;
    for (const auto& r : results) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end())
            datasets.push_back(r.dataset);
    }

    std::map<std::pair<CellKey, Method>, double> cells;
    if (!results.empty()) {
        for (const auto& row :
             macro_accuracy(results, {"dataset", "method", "sim_kind", "split"})) {
            CellKey key{row.group.at("dataset"), split_mode_from_string(row.group.at("split")),
                        row.group.at("sim_kind")};
            cells[{key, method_from_string(row.group.at("method"))}] = row.accuracy;
        }
    }

    const std::vector<SplitMode> splits = {SplitMode::SI, SplitMode::HYB};
    const std::vector<std::string> kinds = {"physical", "sensor", "physical_sensor"};

    auto lookup = [&](const std::string& dataset, SplitMode split, const std::string& kind,
                      Method method) -> std::optional<double> {
        auto it = cells.find({CellKey{dataset, split, kind}, method});
        if (it == cells.end()) return std::nullopt;
        return it->second;
    };

    std::ostringstream csv;
    csv << "dataset,split,sim_kind,pdl,pml,dl\n";

    std::vector<std::vector<std::string>> text_rows;
    for (SplitMode split : splits) {
        bool first_in_block = true;
        for (const auto& kind : kinds) {
            std::string kind_label = kind;
            std::replace(kind_label.begin(), kind_label.end(), '_', ' ');
            std::vector<std::string> row;
            row.push_back(to_string(split) + "-" + kind_label);
            for (const auto& dataset : datasets) {
                const auto pdl = lookup(dataset, split, kind, Method::PDL);
                const auto pml = lookup(dataset, split, kind, Method::PML);
                const auto dl = lookup(dataset, split, "", Method::DL);
                row.push_back((pdl ? percent(*pdl) : kDash) + std::string(" - ") +
                              (pml ? percent(*pml) : kDash));
                if (first_in_block) {
                    row.push_back(dl ? percent(*dl) : kDash);
                } else {
                    row.push_back("");  // DL spans the split block
                }
                csv << dataset << ',' << to_string(split) << ',' << kind << ','
                    << (pdl ? percent(*pdl) : "") << ',' << (pml ? percent(*pml) : "") << ','
                    << (dl ? percent(*dl) : "") << '\n';
            }
            text_rows.push_back(std::move(row));
            first_in_block = false;
        }
    }

    // Render with aligned columns: label, then per dataset "PDL - PML" and "DL".
    const std::size_t n_cols = 1 + datasets.size() * 2;
    std::vector<std::size_t> widths(n_cols, 0);
    for (const auto& row : text_rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], display_width(row[i]));
    }
    std::vector<std::string> header2(n_cols);
    header2[0] = "";
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        header2[1 + d * 2] = "PDL - PML";
        header2[2 + d * 2] = "DL";
    }
    for (std::size_t i = 0; i < n_cols; ++i) widths[i] = std::max(widths[i], header2[i].size());

    std::ostringstream text;
    text << pad("", widths[0]);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const std::size_t group_width = widths[1 + d * 2] + 2 + widths[2 + d * 2];
        text << "  " << pad(datasets[d], group_width);
    }
    text << '\n' << pad("", widths[0]);
    for (std::size_t i = 1; i < n_cols; ++i) text << "  " << pad(header2[i], widths[i]);
    text << '\n';
    for (const auto& row : text_rows) {
        for (std::size_t i = 0; i < n_cols; ++i) {
            if (i) text << "  ";
            text << pad(row[i], widths[i]);
        }
        text << '\n';
    }

    return ReportTable{text.str(), csv.str()};
}

}  // namespace har
