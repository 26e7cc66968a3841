#pragma once

#include <stdexcept>
#include <string>

namespace pobandit {

// Every failure raised by the library derives from Error. The CLI maps
// ValidationFailure subclasses to exit code 1 and everything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationFailure : public Error {
public:
    using Error::Error;
};

#define POBANDIT_ERROR(Name, Base)   \
    class Name : public Base {       \
    public:                          \
        using Base::Base;            \
    }

POBANDIT_ERROR(NotPositiveDefinite, Error);
POBANDIT_ERROR(DimensionMismatch, Error);
POBANDIT_ERROR(ZeroMatrix, Error);
POBANDIT_ERROR(RankDeficient, Error);
POBANDIT_ERROR(ArmOutOfRange, Error);
POBANDIT_ERROR(EmptyArmSet, Error);
POBANDIT_ERROR(InfeasibleTarget, Error);
POBANDIT_ERROR(UndefinedAtT1, Error);
POBANDIT_ERROR(InconsistentConfigs, Error);
POBANDIT_ERROR(IoFailure, Error);

POBANDIT_ERROR(UnknownPreset, ValidationFailure);
POBANDIT_ERROR(ValidationError, ValidationFailure);

#undef POBANDIT_ERROR

// Config-file syntax error carrying the offending line and field.
class ParseError : public ValidationFailure {
public:
    ParseError(int line, std::string field, const std::string& what)
        : ValidationFailure("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line),
          field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace pobandit
