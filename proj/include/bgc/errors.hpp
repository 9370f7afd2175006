#pragma once

#include <stdexcept>
#include <string>

namespace bgc {

// Every failure raised by the library derives from Error so callers can
// catch broadly, or pick out the kind they can act on.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// A column of B lost all of its members: the cluster is empty and the
// support constraint on A has nothing to live on.
class DegenerateCluster : public Error {
public:
    using Error::Error;
};

class InitializationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

} // namespace bgc
