#pragma once

#include <stdexcept>
#include <string>

namespace kernsel {

// Base class for all library errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error { public: using Error::Error; };
class NonPsd : public Error { public: using Error::Error; };
class InvalidInterval : public Error { public: using Error::Error; };
class NotPositiveDefinite : public Error { public: using Error::Error; };
class InvalidBandwidth : public Error { public: using Error::Error; };
class DegenerateData : public Error { public: using Error::Error; };
class Overflow : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };
class InvalidLabel : public Error { public: using Error::Error; };
class EmptySupport : public Error { public: using Error::Error; };
class InvalidDimension : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class LabelError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class SchemaError : public Error { public: using Error::Error; };

} // namespace kernsel
