#ifndef NSPLAN_ERRORS_HPP
#define NSPLAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nsplan {

// Syntax-level failure in a PDDL input. Carries the 1-based source position.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};

// A PDDL feature outside the supported STRIPS+typing subset.
struct UnsupportedError : std::runtime_error {
    std::string feature;
    explicit UnsupportedError(const std::string& feature_)
        : std::runtime_error("unsupported feature: " + feature_), feature(feature_) {}
};

// Tensor shape incompatibility; message names both shapes.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Semantic errors on tasks, models and configs (precondition violated,
// signature mismatch, empty instance set, ...).
struct TaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nsplan

#endif
