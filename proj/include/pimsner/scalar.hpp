#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace pimsner {

/// Gaussian rational re + i*im with arbitrary-precision parts.
class ExactComplex {
 public:
  ExactComplex() = default;
  ExactComplex(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(mpq_class re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  ExactComplex conj() const { return {re_, -im_}; }
  mpq_class norm_squared() const { return re_ * re_ + im_ * im_; }

  ExactComplex& operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    return *this;
  }
  /// Precondition: divisor nonzero.
  ExactComplex& operator/=(const ExactComplex& o) {
    mpq_class d = o.norm_squared();
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / d;
    im_ = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(re);
    return *this;
  }

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  ExactComplex operator-() const { return {-re_, -im_}; }

  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// "p/q" or "p/q+r/si" style; only used for diagnostics.
  std::string to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    return re_.get_str() + (sgn(im_) < 0 ? "" : "+") + im_.get_str() + "i";
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Parses "3", "-7/2" into a canonical rational; throws std::invalid_argument.
mpq_class parse_rational(const std::string& text);

}  // namespace pimsner
