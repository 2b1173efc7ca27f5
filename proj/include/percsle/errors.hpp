#pragma once

#include <stdexcept>
#include <string>

namespace percsle {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PERCSLE_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

// lattice
PERCSLE_DEFINE_ERROR(MeshTooCoarse);
PERCSLE_DEFINE_ERROR(SameVertex);
PERCSLE_DEFINE_ERROR(InvalidDomain);

// exploration
PERCSLE_DEFINE_ERROR(StepBudgetExceeded);
PERCSLE_DEFINE_ERROR(IncompleteColoring);
PERCSLE_DEFINE_ERROR(TargetUnreachable);

// conformal
PERCSLE_DEFINE_ERROR(DegenerateMarks);
PERCSLE_DEFINE_ERROR(MapNotConverged);
PERCSLE_DEFINE_ERROR(UnsupportedDomain);

// sle
PERCSLE_DEFINE_ERROR(NumericOverflow);
PERCSLE_DEFINE_ERROR(ResolutionTooCoarse);

// metrics / statistics
PERCSLE_DEFINE_ERROR(EmptySet);
PERCSLE_DEFINE_ERROR(EmptySamples);

// harness
PERCSLE_DEFINE_ERROR(ConfigInvalid);

#undef PERCSLE_DEFINE_ERROR

} // namespace percsle
