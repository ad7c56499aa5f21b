#pragma once

#include <stdexcept>
#include <string>

namespace fvtr
{

// Base class for every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Errors signalling that an internal invariant of the recursion failed
// (NotInSpan, NotDivisible and friends). The CLI maps these to exit code 3.
class invariant_violation : public error
{
public:
    using error::error;
};

#define FVTR_DEFINE_ERROR(name, base)                                                                                  \
    class name : public base                                                                                           \
    {                                                                                                                  \
    public:                                                                                                            \
        explicit name(const std::string &what) : base(#name ": " + what) {}                                            \
    }

FVTR_DEFINE_ERROR(division_by_zero, error);
FVTR_DEFINE_ERROR(pole_at_framing, error);
FVTR_DEFINE_ERROR(parse_error, error);
FVTR_DEFINE_ERROR(arity_mismatch, error);
FVTR_DEFINE_ERROR(index_out_of_range, error);
FVTR_DEFINE_ERROR(zero_divisor, error);
FVTR_DEFINE_ERROR(insufficient_truncation, error);
FVTR_DEFINE_ERROR(not_a_unit, error);
FVTR_DEFINE_ERROR(invalid_composition, error);
FVTR_DEFINE_ERROR(not_invertible, error);
FVTR_DEFINE_ERROR(missing_dependency, error);
FVTR_DEFINE_ERROR(unstable_dependency, error);
FVTR_DEFINE_ERROR(outside_verifiable_set, error);

FVTR_DEFINE_ERROR(not_divisible, invariant_violation);
FVTR_DEFINE_ERROR(not_in_span, invariant_violation);
FVTR_DEFINE_ERROR(degree_cap_exceeded, invariant_violation);
FVTR_DEFINE_ERROR(symmetry_violation, invariant_violation);
FVTR_DEFINE_ERROR(support_violation, invariant_violation);

#undef FVTR_DEFINE_ERROR

} // namespace fvtr
