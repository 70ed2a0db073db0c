#pragma once

#include <stdexcept>
#include <string>

namespace lgt {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define LGT_ERROR_TYPE(Name)          \
    struct Name final : Error {       \
        using Error::Error;           \
    }

// lattice
LGT_ERROR_TYPE(ZeroExtent);
LGT_ERROR_TYPE(PeriodicTooSmall);
// hilbert
LGT_ERROR_TYPE(DimOverflow);
// linop
LGT_ERROR_TYPE(DimMismatch);
LGT_ERROR_TYPE(SpaceMismatch);
LGT_ERROR_TYPE(NonIntegerControl);
LGT_ERROR_TYPE(NonUnitaryBase);
// models
LGT_ERROR_TYPE(MissingLink);
LGT_ERROR_TYPE(MissingXi);
// transforms
LGT_ERROR_TYPE(HeadroomViolation);
// non-Abelian
LGT_ERROR_TYPE(UnsupportedTruncation);
LGT_ERROR_TYPE(EvenN);
LGT_ERROR_TYPE(PeriodicBoundary);
// solver
LGT_ERROR_TYPE(NotHermitian);
LGT_ERROR_TYPE(TooLarge);
LGT_ERROR_TYPE(NoConvergence);
// cli
LGT_ERROR_TYPE(ConfigInvalid);

#undef LGT_ERROR_TYPE

} // namespace lgt
