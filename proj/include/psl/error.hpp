#pragma once

#include <stdexcept>
#include <string>

namespace psl {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (edge lists, embeddings, models, configs).
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that cannot be processed (empty graph,
// impossible sample sizes, mismatched dimensions).
struct DataError : Error {
  using Error::Error;
};

// Non-finite values or optimization breakdown.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace psl
