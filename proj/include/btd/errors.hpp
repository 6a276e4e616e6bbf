#ifndef BTD_ERRORS_HPP
#define BTD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace btd {

// Bad caller-supplied argument (shape mismatch, out-of-range crop, ...).
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input is structurally valid but carries no usable information
// (constant brain, zero-mass histogram, ...).
class DegenerateInput : public std::runtime_error {
public:
    explicit DegenerateInput(const std::string& msg) : std::runtime_error(msg) {}
};

// A prediction stage found nothing to act on; callers usually treat this
// as "leave the data untouched".
class NoSignal : public std::runtime_error {
public:
    explicit NoSignal(const std::string& msg) : std::runtime_error(msg) {}
};

// File-format level failure, with byte-offset context where available.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Wraps a failure inside the multi-stage pipeline with the stage name.
class PipelineError : public std::runtime_error {
public:
    PipelineError(const std::string& stage, const std::string& msg)
        : std::runtime_error(stage + ": " + msg), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace btd

#endif
