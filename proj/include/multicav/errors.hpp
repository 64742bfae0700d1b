#pragma once

#include <stdexcept>
#include <string>

namespace multicav {

/// Base of every error raised by the library. `name()` is the stable
/// identifier reported by the command-line front end.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* name() const noexcept = 0;
};

#define MULTICAV_DEFINE_ERROR(Type, Name)                                     \
    class Type : public Error                                                 \
    {                                                                         \
    public:                                                                   \
        using Error::Error;                                                   \
        [[nodiscard]] const char* name() const noexcept override              \
        {                                                                     \
            return Name;                                                      \
        }                                                                     \
    }

MULTICAV_DEFINE_ERROR(InvalidInput, "invalid-input");
MULTICAV_DEFINE_ERROR(DegenerateResonance, "degenerate-resonance");
MULTICAV_DEFINE_ERROR(OverlappingResonance, "overlapping-resonance");
MULTICAV_DEFINE_ERROR(BranchJump, "branch-jump");
MULTICAV_DEFINE_ERROR(DomainError, "domain-error");
MULTICAV_DEFINE_ERROR(OutsideValidity, "outside-validity");
MULTICAV_DEFINE_ERROR(DesignFailure, "design-failure");

#undef MULTICAV_DEFINE_ERROR

} // namespace multicav
