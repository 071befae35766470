#pragma once

#include <stdexcept>

namespace quadspec {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed config, bad dimensions, out-of-range parameters.
/// The command line tool maps these to exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

/// A numerical precondition failed or a computation left its domain of
/// validity. The command line tool maps these to exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

#define QUADSPEC_ERROR(NAME, BASE) \
  struct NAME : BASE {             \
    using BASE::BASE;              \
  }

QUADSPEC_ERROR(DimensionMismatch, ConfigError);
QUADSPEC_ERROR(BasisTooLarge, ConfigError);

QUADSPEC_ERROR(NoRotationFound, NumericalError);
QUADSPEC_ERROR(NotNormalized, NumericalError);
QUADSPEC_ERROR(RealEigenvalue, NumericalError);
QUADSPEC_ERROR(PairingFailure, NumericalError);
QUADSPEC_ERROR(UnboundedEnumeration, NumericalError);
QUADSPEC_ERROR(EmptySpectrum, NumericalError);
QUADSPEC_ERROR(OutOfRadius, NumericalError);
QUADSPEC_ERROR(SchurReorderFailure, NumericalError);
QUADSPEC_ERROR(VerticalPlane, NumericalError);
QUADSPEC_ERROR(NotNegativeDefinite, NumericalError);
QUADSPEC_ERROR(SingularCayley, NumericalError);
QUADSPEC_ERROR(NotConvex, NumericalError);
QUADSPEC_ERROR(NotNormalForm, NumericalError);
QUADSPEC_ERROR(DefectiveNotSupplied, NumericalError);
QUADSPEC_ERROR(EllipticityViolated, NumericalError);
QUADSPEC_ERROR(StructureViolation, NumericalError);
QUADSPEC_ERROR(NotNilpotent, NumericalError);
QUADSPEC_ERROR(SpectralPointHit, NumericalError);
QUADSPEC_ERROR(IllConditionedGram, NumericalError);
QUADSPEC_ERROR(ContourHitsSpectrum, NumericalError);
QUADSPEC_ERROR(NotSeparated, NumericalError);
QUADSPEC_ERROR(InsufficientData, NumericalError);

#undef QUADSPEC_ERROR

}  // namespace quadspec
