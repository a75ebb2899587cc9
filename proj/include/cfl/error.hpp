#pragma once

#include <stdexcept>
#include <string>

namespace cfl {

// Base class of every error raised by the library.  The name() tag matches
// the error names used in reports, so callers can dispatch on strings.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what)
        : std::runtime_error(tag + ": " + what), tag_(std::move(tag)) {}
    const std::string& name() const noexcept { return tag_; }

private:
    std::string tag_;
};

#define CFL_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

CFL_DEFINE_ERROR(Singular);
CFL_DEFINE_ERROR(DimensionMismatch);
CFL_DEFINE_ERROR(SizeLimitExceeded);
CFL_DEFINE_ERROR(NotPrime);
CFL_DEFINE_ERROR(FieldMismatch);
CFL_DEFINE_ERROR(NotInvertible);
CFL_DEFINE_ERROR(GradingViolation);
CFL_DEFINE_ERROR(ResultNotAComplex);
CFL_DEFINE_ERROR(CountMismatch);
CFL_DEFINE_ERROR(PatternMismatch);
CFL_DEFINE_ERROR(StrandsDiverge);
CFL_DEFINE_ERROR(WrongOrientation);
CFL_DEFINE_ERROR(Parallel);
CFL_DEFINE_ERROR(BoundExceeded);
CFL_DEFINE_ERROR(BadPeriod);
CFL_DEFINE_ERROR(InvalidDescriptor);
CFL_DEFINE_ERROR(BudgetExceeded);
CFL_DEFINE_ERROR(SyntaxError);
CFL_DEFINE_ERROR(ValidationError);
CFL_DEFINE_ERROR(InternalError);

#undef CFL_DEFINE_ERROR

}  // namespace cfl
