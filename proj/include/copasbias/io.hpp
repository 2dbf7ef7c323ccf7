#pragma once

#include <istream>
#include <string>
#include <vector>

#include "copasbias/data.hpp"

namespace copasbias::io {

// One row of the input contract: header `study_id,y,s`, UTF-8, `.` decimal
// separator, `#` comment lines and blank lines ignored.
struct StudyRecord {
    std::string study_id;
    double y = 0.0;
    double s = 1.0;
};

// Parses the study CSV. Every data_error message starts with the offending
// line number. study_id values must be unique.
std::vector<StudyRecord> read_study_csv(std::istream& in);
std::vector<StudyRecord> read_study_csv_file(const std::string& path);

Dataset to_dataset(const std::vector<StudyRecord>& records);

}  // namespace copasbias::io
