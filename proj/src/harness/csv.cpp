#include "glcoef/harness/csv.hpp"

#include "glcoef/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace glcoef::harness {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) throw Error("failed to format a double");
    return std::string(buf, p);
}

std::string quote_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), header_(std::move(header)) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    write_line(header_);
}

void CsvWriter::write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote_field(cells[i]);
    }
    out_ << "\r\n";
    if (!out_) throw Error("write to '" + path_.string() + "' failed");
}

void CsvWriter::row(const std::vector<CsvField>& fields) {
    if (fields.size() != header_.size())
        throw Error("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                    std::to_string(header_.size()));
    std::vector<std::string> cells;
    cells.reserve(fields.size());
    for (const auto& f : fields) {
        cells.push_back(std::visit(
            [](const auto& v) -> std::string {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>)
                    return v;
                else if constexpr (std::is_same_v<T, double>)
                    return format_double(v);
                else if constexpr (std::is_same_v<T, bool>)
                    return v ? "1" : "0";
                else
                    return std::to_string(v);
            },
            f));
    }
    write_line(cells);
    ++rows_;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw Error("write to '" + path_.string() + "' failed");
    out_.close();
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            rec.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            rec.push_back(std::move(cell));
            cell.clear();
            records.push_back(std::move(rec));
            rec.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    if (any || !cell.empty()) {
        rec.push_back(std::move(cell));
        records.push_back(std::move(rec));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

} // namespace glcoef::harness
