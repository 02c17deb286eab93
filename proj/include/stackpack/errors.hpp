#pragma once

#include <stdexcept>
#include <string>

namespace stackpack {

/// Malformed input file. The message carries the path and line (or byte offset).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coplanar or collinear input where a volumetric result is required.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A heightmap window or index falls outside its grid.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The top surface of an object could not be located for grasping.
class NoGraspError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stackpack
