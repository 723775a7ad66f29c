#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfwm {

// Common base so callers can catch any library failure and still read a
// stable machine-checkable name.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Material/model domain violations.
class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& w) : Error("OutOfRange", w) {}
};
class InvalidModel : public Error {
public:
    explicit InvalidModel(const std::string& w) : Error("InvalidModel", w) {}
};

// Root finding and iteration failures.
class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& w) : Error("NumericalFailure", w) {}
};
class BracketError : public Error {
public:
    explicit BracketError(const std::string& w) : Error("BracketError", w) {}
};
class BoundaryMaximum : public Error {
public:
    explicit BoundaryMaximum(const std::string& w) : Error("BoundaryMaximum", w) {}
};

// Mode solving.
class ModeCutoff : public Error {
public:
    explicit ModeCutoff(const std::string& w) : Error("ModeCutoff", w) {}
};
class AmbiguousSupermodes : public Error {
public:
    explicit AmbiguousSupermodes(const std::string& w) : Error("AmbiguousSupermodes", w) {}
};

// Propagation.
class StepTooLarge : public Error {
public:
    explicit StepTooLarge(const std::string& w) : Error("StepTooLarge", w) {}
};
class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& w) : Error("IndexOutOfRange", w) {}
};

// Spectral grids.
class OutOfWindow : public Error {
public:
    explicit OutOfWindow(const std::string& w) : Error("OutOfWindow", w) {}
};
class DegenerateGrid : public Error {
public:
    explicit DegenerateGrid(const std::string& w) : Error("DegenerateGrid", w) {}
};
class DegenerateFlat : public Error {
public:
    explicit DegenerateFlat(const std::string& w) : Error("DegenerateFlat", w) {}
};
class NoPhasematch : public Error {
public:
    explicit NoPhasematch(const std::string& w) : Error("NoPhasematch", w) {}
};

// Configuration and file handling.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& w) : Error("ParseError", w) {}
};
class IoError : public Error {
public:
    explicit IoError(const std::string& w) : Error("IoError", w) {}
};

// Carries every violation found in one validation pass, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error("ValidationError", join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

}  // namespace sfwm
