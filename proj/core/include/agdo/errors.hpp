#pragma once

#include <stdexcept>
#include <string>

namespace agdo {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AGDO_DECLARE_ERROR(Name)                 \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

AGDO_DECLARE_ERROR(InvalidArgument);
AGDO_DECLARE_ERROR(NonConvergent);
AGDO_DECLARE_ERROR(DimensionMismatch);
AGDO_DECLARE_ERROR(PoleOnPath);
AGDO_DECLARE_ERROR(ConsistencyFailure);
AGDO_DECLARE_ERROR(SchemaError);
AGDO_DECLARE_ERROR(NotTabulated);
AGDO_DECLARE_ERROR(InvalidSite);
AGDO_DECLARE_ERROR(SingularEvaluation);
AGDO_DECLARE_ERROR(ArityMismatch);
AGDO_DECLARE_ERROR(RankDeficient);
AGDO_DECLARE_ERROR(MissingGauge);
AGDO_DECLARE_ERROR(SeparationFailure);
AGDO_DECLARE_ERROR(IoError);

#undef AGDO_DECLARE_ERROR

} // namespace agdo
