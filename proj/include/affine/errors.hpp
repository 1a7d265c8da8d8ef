#pragma once

#include <stdexcept>
#include <string>

namespace affine {

// Error taxonomy shared by all modules. Every failure mode that callers are
// expected to handle gets its own type so tests and the CLI can map them to
// exit codes without string matching.

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct SingularConfiguration : Error {
    using Error::Error;
};
struct OrientationError : Error {
    using Error::Error;
};
struct InvalidModel : Error {
    using Error::Error;
};
struct InvalidLabel : Error {
    using Error::Error;
};
struct DegenerateLegendre : Error {
    using Error::Error;
};
struct NumericalFailure : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct Unconverged : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct IOFailure : Error {
    using Error::Error;
};

}  // namespace affine
