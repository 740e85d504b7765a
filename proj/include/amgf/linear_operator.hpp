#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace amgf {

using Vector = std::vector<double>;

/// Square linear map y = Op(x). Implementations must be safe to apply
/// concurrently on distinct vectors.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;

  /// Overwrites y with Op(x). x and y must not alias.
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;

  Vector operator()(std::span<const double> x) const {
    Vector y(size());
    apply(x, y);
    return y;
  }
};

/// Identity operator of a given size.
class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n) : n_(n) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  std::size_t n_;
};

}  // namespace amgf
