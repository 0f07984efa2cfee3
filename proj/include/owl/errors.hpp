#pragma once

#include <stdexcept>
#include <string>

namespace owl {

// Base class for every domain error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVector : Error { using Error::Error; };
struct ZeroQuaternion : Error { using Error::Error; };
struct NotUnitQuaternion : Error { using Error::Error; };
struct PolarSingularity : Error { using Error::Error; };
struct RangeTooSmall : Error { using Error::Error; };
struct NotPlanar : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct ZeroMagnitude : Error { using Error::Error; };
struct ZeroVelocitySample : Error { using Error::Error; };
struct NonPositiveParameter : Error { using Error::Error; };
struct DegenerateGeometry : Error { using Error::Error; };
struct InsufficientPoints : Error { using Error::Error; };
struct InsufficientCorrespondence : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct TimeOutOfRange : Error { using Error::Error; };

// Filesystem-level failure (unreadable input, unwritable output).
struct IoError : Error { using Error::Error; };

} // namespace owl
