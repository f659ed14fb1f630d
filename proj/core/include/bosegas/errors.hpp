#pragma once

#include <stdexcept>
#include <string>

namespace bosegas {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// argument outside the admissible range (negative time, kappa0 <= 0, ...)
class DomainError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class UnsupportedModeError : public Error { using Error::Error; };
class PotentialError : public Error { using Error::Error; };
class SingularError : public Error { using Error::Error; };
class RootNotFound : public Error { using Error::Error; };
class UnreachableEndpoint : public Error { using Error::Error; };
class MergeError : public Error { using Error::Error; };

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line = -1, int column = -1)
        : Error(msg), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class ValidationError : public Error { using Error::Error; };

}  // namespace bosegas
