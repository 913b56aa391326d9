#pragma once

#include "transflow/common.hpp"

namespace transflow {

// Matrix-free linear operator.
class LinOp {
 public:
  virtual ~LinOp() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual void apply(const Vec& x, Vec& out) const = 0;

  Vec apply(const Vec& x) const {
    Vec out;
    apply(x, out);
    return out;
  }
};

// Approximate inverse applied within a Krylov method.
class PrecondOp {
 public:
  virtual ~PrecondOp() = default;
  virtual void apply(const Vec& v, Vec& out) const = 0;

  Vec apply(const Vec& v) const {
    Vec out;
    apply(v, out);
    return out;
  }
};

class IdentityPrecond final : public PrecondOp {
 public:
  void apply(const Vec& v, Vec& out) const override { out = v; }
};

// Dense materialisation by application to unit vectors (tests, dense paths).
Mat materialize(const LinOp& op);

class DenseOp final : public LinOp {
 public:
  explicit DenseOp(Mat a) : a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  void apply(const Vec& x, Vec& out) const override { out = a_ * x; }
  const Mat& matrix() const { return a_; }

 private:
  Mat a_;
};

}  // namespace transflow
