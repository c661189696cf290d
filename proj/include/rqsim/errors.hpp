#pragma once

#include <stdexcept>
#include <string>

namespace rqsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRange : Error {
    using Error::Error;
};
struct KindMismatch : Error {
    using Error::Error;
};
struct NotHermitian : Error {
    using Error::Error;
};
struct InvalidArgument : Error {
    using Error::Error;
};
struct FrameMismatch : Error {
    using Error::Error;
};
struct IncompleteParams : Error {
    using Error::Error;
};
struct UnsupportedTerm : Error {
    using Error::Error;
};
struct IntegrationFailure : Error {
    using Error::Error;
};
struct ZeroBroadening : Error {
    using Error::Error;
};
struct InsufficientTruncation : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rqsim
