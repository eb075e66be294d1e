#pragma once

#include <stdexcept>
#include <string>

namespace geovag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or inconsistent geometry (zero extents, flat sub-tetrahedra, missing edges).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Mesh file content that parses but violates a mesh invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class TreeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the range where a property law is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

class FlashError : public Error {
public:
    using Error::Error;
};

class WellModelError : public Error {
public:
    using Error::Error;
};

class CrossFlowError : public WellModelError {
public:
    using WellModelError::WellModelError;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class ActiveSetError : public Error {
public:
    using Error::Error;
};

class LinearSolveError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace geovag
