#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chambereff {

// Broad failure classes. The CLI maps Input -> exit 1, Numerical -> exit 2.
enum class ErrorClass { Input, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorClass::Input, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorClass::Numerical, what) {}
};

class InvalidArgument : public InputError {
public:
    using InputError::InputError;
};

class SweepMismatch : public InputError {
public:
    explicit SweepMismatch(std::size_t index, const std::string& context = {})
        : InputError("frequency sweeps differ at index " + std::to_string(index) +
                     (context.empty() ? std::string{} : " (" + context + ")")),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class GridMismatch : public InputError {
public:
    explicit GridMismatch(const std::string& what) : InputError(what) {}
};

class InvalidPattern : public InputError {
public:
    using InputError::InputError;
};

class PassivityViolation : public InputError {
public:
    using InputError::InputError;
};

class NoOverlap : public InputError {
public:
    using InputError::InputError;
};

class ZeroPattern : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MismatchSaturated : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroTransmission : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Parse failures carry the source name and 1-based line (0 when not line-bound).
class ParseError : public InputError {
public:
    enum class Kind {
        MalformedOptionLine,
        DuplicateOptionLine,
        UnsupportedPortCount,
        UnsupportedVersion,
        NonNumeric,
        NonFinite,
        TruncatedRow,
        ExtraValues,
        NonMonotonicFrequency,
        NonPositiveFrequency,
        EmptyData,
        BadHeader,
        MissingSample,
        DuplicateSample,
        IrregularGrid,
        BadValue,
        UnknownKey,
        MissingKey,
        BadManifest,
    };

    ParseError(Kind kind, std::string source, std::size_t line, const std::string& detail)
        : InputError(format(source, line, detail)), kind_(kind), source_(std::move(source)), line_(line) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& detail) {
        std::string out = source.empty() ? std::string("<input>") : source;
        if (line > 0) out += ":" + std::to_string(line);
        return out + ": " + detail;
    }

    Kind kind_;
    std::string source_;
    std::size_t line_;
};

}  // namespace chambereff
