#include "copasbias/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace copasbias::io {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, const std::string& name, long line) {
    const std::string t = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw data_error("line " + std::to_string(line) + ": cannot parse " + name + " value '" +
                         field + "'");
    if (!std::isfinite(value))
        throw data_error("line " + std::to_string(line) + ": " + name + " must be finite");
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<StudyRecord> read_study_csv(std::istream& in) {
    std::vector<StudyRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        if (!header_seen) {
            if (stripped != "study_id,y,s")
                throw data_error("line " + std::to_string(line_no) +
                                 ": expected header 'study_id,y,s', got '" + stripped + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw data_error("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        StudyRecord rec;
        rec.study_id = trim(fields[0]);
        if (rec.study_id.empty())
            throw data_error("line " + std::to_string(line_no) + ": empty study_id");
        if (!seen_ids.insert(rec.study_id).second)
            throw data_error("line " + std::to_string(line_no) + ": duplicate study_id '" +
                             rec.study_id + "'");
        rec.y = parse_double(fields[1], "y", line_no);
        rec.s = parse_double(fields[2], "s", line_no);
        if (!(rec.s > 0.0))
            throw data_error("line " + std::to_string(line_no) + ": s must be > 0");
        records.push_back(std::move(rec));
    }
    if (!header_seen) throw data_error("line 1: missing header 'study_id,y,s'");
    return records;
}

std::vector<StudyRecord> read_study_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path);
    return read_study_csv(in);
}

Dataset to_dataset(const std::vector<StudyRecord>& records) {
    std::vector<Study> studies;
    studies.reserve(records.size());
    for (const auto& rec : records) studies.push_back({rec.y, rec.s});
    return Dataset(std::move(studies));
}

}  // namespace copasbias::io
