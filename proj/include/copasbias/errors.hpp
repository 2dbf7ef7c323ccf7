#pragma once

#include <stdexcept>
#include <string>

namespace copasbias {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: violated invariants, malformed files, out-of-domain arguments.
struct data_error : error {
    using error::error;
};

// Non-finite intermediate in a likelihood/score evaluation. study_index is
// 0-based, or -1 when the failure is not attributable to a single study.
struct numeric_error : error {
    int study_index = -1;
    explicit numeric_error(const std::string& msg, int index = -1)
        : error(msg), study_index(index) {}
};

// The (mu, tau2) information block is singular (tau2 at the boundary or n
// too small to separate the nuisance directions).
struct degenerate_information_error : error {
    using error::error;
};

// An ML fit failed on every start.
struct fit_error : error {
    using error::error;
};

// Collinear regression design (e.g. all standard errors identical).
struct singular_design_error : error {
    using error::error;
};

// Rejection sampler could not produce enough accepted studies.
struct generation_error : error {
    using error::error;
};

// Score test could not be completed (all grid points failed, or too many
// bootstrap replicates dropped).
struct test_error : error {
    using error::error;
};

// Monte-Carlo harness failure rate exceeded its budget, or an iterative
// comparator did not converge.
struct convergence_error : error {
    using error::error;
};

}  // namespace copasbias
