#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlspec/coefficient.hpp"
#include "nlspec/grid.hpp"
#include "nlspec/kernel.hpp"

namespace nlspec {

enum class OperatorVariant { L_plus_a, M_plus_a };

std::string_view to_string(OperatorVariant v);
std::optional<OperatorVariant> operator_variant_from_string(std::string_view s);

/// Largest node count the dense assembly accepts.
inline constexpr std::size_t kMaxDenseNodes = 4096;

struct OperatorMetadata {
  OperatorVariant variant = OperatorVariant::L_plus_a;
  double sigma = 1.0;
  double m = 0.0;
  /// Grid spacing; zero for raw matrices.
  double h = 0.0;
  /// Hölder exponent of the zeroth-order term.
  double holder = 1.0;
  std::string kernel_id;
  std::string coefficient_id;
};

/// Dense matrix A with A_ij = w_j K(x_i, x_j) + delta_ij (a_i + shift).
///
/// For the M variant the integral part carries the prefactor sigma^-m and
/// shift = -sigma^-m. Immutable after construction.
class DiscreteOperator {
 public:
  /// Wraps an explicit matrix. Off-diagonal entries must be nonnegative.
  /// `zero_order` defaults to zero and `weights` to ones.
  static DiscreteOperator from_matrix(Eigen::MatrixXd a, std::vector<double> zero_order = {},
                                      std::vector<double> weights = {}, double shift = 0.0);

  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::span<const double> weights() const { return weights_; }
  /// a_i, without the shift.
  std::span<const double> zero_order() const { return zero_order_; }
  /// Integral part of row i, p_i = sum_j A_ij - a_i - shift (prefactor included).
  std::span<const double> row_mass() const { return row_mass_; }
  double shift() const { return shift_; }

  /// w_i A_ij is symmetric to 1e-14 relative to its largest entry.
  bool symmetric() const { return symmetric_; }
  /// Connected components of the off-diagonal support graph.
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }
  bool connected() const { return components_.size() <= 1; }

  /// Null for raw matrices.
  const std::shared_ptr<const Grid>& grid() const { return grid_; }
  const std::optional<KernelSpec>& kernel() const { return kernel_; }
  const std::optional<Coefficient>& coefficient() const { return coefficient_; }
  const OperatorMetadata& metadata() const { return metadata_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// The operator restricted to a subset of nodes (principal submatrix).
  DiscreteOperator restricted(std::span<const std::size_t> nodes) const;

 private:
  friend DiscreteOperator assemble(const Grid&, const KernelSpec&, const Coefficient&,
                                   OperatorVariant, unsigned);
  DiscreteOperator() = default;
  void finish();

  Eigen::MatrixXd matrix_;
  std::vector<double> weights_;
  std::vector<double> zero_order_;
  std::vector<double> row_mass_;
  double shift_ = 0.0;
  bool symmetric_ = false;
  std::vector<std::vector<std::size_t>> components_;
  std::shared_ptr<const Grid> grid_;
  std::optional<KernelSpec> kernel_;
  std::optional<Coefficient> coefficient_;
  OperatorMetadata metadata_;
  std::vector<std::string> warnings_;
};

/// Throws ResolutionError unless the grid resolves the kernel:
/// h <= sigma r / 8 for convolution kernels, h <= r min(g) min(h) / 8 for the
/// general variant. Slow-decay kernels have no support scale and always pass.
void check_resolution(const Grid& grid, const KernelSpec& k);

/// Largest spacing a grid may have for the kernel; +inf when unconstrained.
double max_spacing(const KernelSpec& k, const Grid& grid);

/// Dense assembly, parallel over rows. `threads` = 0 uses the hardware count.
/// Only convolution kernels admit the M variant.
DiscreteOperator assemble(const Grid& grid, const KernelSpec& k, const Coefficient& a,
                          OperatorVariant variant, unsigned threads = 0);

/// Same operator on the grid scaled by `factor`, with kernel
/// factor^-N K(x / factor, y / factor) and coefficient a(x / factor).
DiscreteOperator assemble_scaled(const DiscreteOperator& op, double factor, unsigned threads = 0);

/// max_i a_i + shift.
double effective_sup(const DiscreteOperator& op);

/// sigma^-m for the M variant, 1 otherwise.
double prefactor(OperatorVariant v, double sigma, double m);

}  // namespace nlspec
