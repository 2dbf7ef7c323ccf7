#pragma once

#include <cstddef>
#include <vector>

#include "copasbias/errors.hpp"

namespace copasbias {

// One published study: effect estimate on an additive scale and its
// within-study standard error. The reported s^2 stands in for the true
// sampling variance everywhere in this library.
struct Study {
    double y = 0.0;
    double s = 1.0;
};

// Observed collection of studies entering a meta-analysis.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Study> studies);
    Dataset(const std::vector<double>& y, const std::vector<double>& s);

    std::size_t n() const { return studies_.size(); }
    const Study& operator[](std::size_t i) const { return studies_[i]; }
    const std::vector<Study>& studies() const { return studies_; }

    double min_s() const;
    double max_s() const;
    std::vector<double> y_values() const;
    std::vector<double> s_values() const;

private:
    void validate() const;
    std::vector<Study> studies_;
};

}  // namespace copasbias
