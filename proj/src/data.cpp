#include "copasbias/data.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace copasbias {

Dataset::Dataset(std::vector<Study> studies) : studies_(std::move(studies)) { validate(); }

Dataset::Dataset(const std::vector<double>& y, const std::vector<double>& s) {
    if (y.size() != s.size()) throw data_error("y and s must have the same length");
    studies_.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) studies_.push_back({y[i], s[i]});
    validate();
}

void Dataset::validate() const {
    if (studies_.size() < 3)
        throw data_error("a meta-analysis needs at least 3 studies, got " +
                         std::to_string(studies_.size()));
    for (std::size_t i = 0; i < studies_.size(); ++i) {
        if (!std::isfinite(studies_[i].y))
            throw data_error("study " + std::to_string(i) + ": effect size is not finite");
        if (!(studies_[i].s > 0.0) || !std::isfinite(studies_[i].s))
            throw data_error("study " + std::to_string(i) +
                             ": standard error must be positive and finite");
    }
}

double Dataset::min_s() const {
    double m = studies_.front().s;
    for (const auto& st : studies_) m = std::min(m, st.s);
    return m;
}

double Dataset::max_s() const {
    double m = studies_.front().s;
    for (const auto& st : studies_) m = std::max(m, st.s);
    return m;
}

std::vector<double> Dataset::y_values() const {
    std::vector<double> out;
    out.reserve(studies_.size());
    for (const auto& st : studies_) out.push_back(st.y);
    return out;
}

std::vector<double> Dataset::s_values() const {
    std::vector<double> out;
    out.reserve(studies_.size());
    for (const auto& st : studies_) out.push_back(st.s);
    return out;
}

}  // namespace copasbias
