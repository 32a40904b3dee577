#pragma once
// Shared aliases, error types and the six 2x3x3 class labels.
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace timps {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline const char* kVersion = "1.0.0";

// e^{2 pi i/3}
inline const cplx omega{-0.5, 0.8660254037844386467637231707529362};
inline const cplx omega2{-0.5, -0.8660254037844386467637231707529362};

// point at infinity on the Riemann sphere (for pencil eigenvalues / Mobius maps)
inline const cplx kInf{std::numeric_limits<double>::infinity(), 0.0};
inline bool is_inf(const cplx& z) {
  return std::isinf(z.real()) || std::isinf(z.imag());
}

// bad input (wrong shapes, singular where invertible is required, ...) -> CLI exit 2
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};
// structurally sound input outside the supported scope (biseparable classes, ...) -> CLI exit 3
struct OutOfScopeError : std::runtime_error {
  explicit OutOfScopeError(const std::string& m) : std::runtime_error(m) {}
};

// SLOCC classes of 2x3x3 tensors handled by this library. Named by pencil structure:
//  Momega              three distinct eigenvalues          (rep pencil diag(mu+la, w mu+la, w^2 mu+la))
//  DiagDegenerate      double eigenvalue, geometric mult 2 (rep diag(la, la, mu))
//  Jordan3             triple eigenvalue, geometric mult 1 (rep [[la,mu,0],[0,la,mu],[0,0,la]])
//  Jordan2plus1        triple eigenvalue, geometric mult 2 (rep [[la,mu,0],[0,la,0],[0,0,la]])
//  Jordan2plus1Variant double eigenvalue, geometric mult 1 (rep [[la,mu,0],[0,la,0],[0,0,mu]])
//  LLT                 singular pencil, no eigenvalues     (rep [[la,mu,0],[0,0,la],[0,0,mu]])
enum class ClassLabel {
  Momega,
  DiagDegenerate,
  Jordan3,
  Jordan2plus1,
  Jordan2plus1Variant,
  LLT,
};

inline const char* to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::Momega: return "Momega";
    case ClassLabel::DiagDegenerate: return "DiagDegenerate";
    case ClassLabel::Jordan3: return "Jordan3";
    case ClassLabel::Jordan2plus1: return "Jordan2plus1";
    case ClassLabel::Jordan2plus1Variant: return "Jordan2plus1Variant";
    case ClassLabel::LLT: return "LLT";
  }
  return "?";
}

}  // namespace timps
