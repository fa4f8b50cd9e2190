#pragma once

#include <stdexcept>
#include <string>

namespace bira {

/// Invalid or inconsistent geometry (bad mesh file, degenerate element,
/// flipped normals, open mesh where a closed one is required).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Scene-level invariant violation (source on the boundary, receiver
/// outside the domain, insufficient clearance).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A kernel was evaluated at a singular configuration (coincident points).
class SingularEvaluation : public std::runtime_error {
 public:
  explicit SingularEvaluation(const std::string& what) : std::runtime_error(what) {}
};

/// Linear-solve or series failure (divergent Neumann iteration, per-bin
/// solve failure inside a sweep).
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken conjugate symmetry detected when synthesizing a real signal.
class SymmetryError : public std::runtime_error {
 public:
  explicit SymmetryError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched scenes or options in a comparison run.
class ComparisonError : public std::runtime_error {
 public:
  explicit ComparisonError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bira
