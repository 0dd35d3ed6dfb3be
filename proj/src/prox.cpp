#include "pdprox/prox.hpp"

#include <cmath>

namespace pdprox {

Index SeparableSum::total_dim(const std::vector<ProxPtr>& parts) {
  if (parts.empty()) {
    throw DimensionError("SeparableSum: need at least one block");
  }
  Index total = 0;
  for (const auto& p : parts) total += p->dim();
  return total;
}

SeparableSum::SeparableSum(std::vector<ProxPtr> parts)
    : ProxFunction(total_dim(parts)), parts_(std::move(parts)) {
  Index offset = 0;
  gamma_ = kInf;
  for (const auto& p : parts_) {
    offsets_.push_back(offset);
    offset += p->dim();
    gamma_ = std::min(gamma_, p->strong_convexity());
  }
}

double SeparableSum::do_value(const VectorXd& x) const {
  double total = 0.0;
  for (size_t i = 0; i < parts_.size(); ++i) {
    total += parts_[i]->value(x.segment(offsets_[i], parts_[i]->dim()));
    if (std::isinf(total)) return kInf;
  }
  return total;
}

VectorXd SeparableSum::do_prox(double step, const VectorXd& z) const {
  VectorXd out(dim());
  for (size_t i = 0; i < parts_.size(); ++i) {
    out.segment(offsets_[i], parts_[i]->dim()) =
        parts_[i]->prox(step, z.segment(offsets_[i], parts_[i]->dim()));
  }
  return out;
}

std::optional<QuadraticForm> SeparableSum::quadratic_form() const {
  QuadraticForm q{MatrixXd::Zero(dim(), dim()), VectorXd::Zero(dim()), 0.0};
  for (size_t i = 0; i < parts_.size(); ++i) {
    auto part = parts_[i]->quadratic_form();
    if (!part) return std::nullopt;
    const Index d = parts_[i]->dim();
    q.quadratic.block(offsets_[i], offsets_[i], d, d) = part->quadratic;
    q.linear.segment(offsets_[i], d) = part->linear;
    q.constant += part->constant;
  }
  return q;
}

std::optional<VectorXd> SeparableSum::subgradient(const VectorXd& x) const {
  VectorXd v(dim());
  for (size_t i = 0; i < parts_.size(); ++i) {
    auto part = parts_[i]->subgradient(x.segment(offsets_[i], parts_[i]->dim()));
    if (!part) return std::nullopt;
    v.segment(offsets_[i], parts_[i]->dim()) = *part;
  }
  return v;
}

bool check_prox_inequality(const ProxFunction& g, double step, const VectorXd& z,
                           const std::vector<VectorXd>& probes, double tol) {
  const VectorXd xb = g.prox(step, z);
  const double g_xb = g.value(xb);
  const double gamma = g.strong_convexity();
  const double curvature = std::isinf(gamma) ? 0.0 : 0.5 * step * gamma;
  for (const auto& x : probes) {
    const double g_x = g.value(x);
    if (std::isinf(g_x)) continue;
    const double lhs = (xb - z).dot(x - xb);
    const double rhs = step * (g_xb - g_x) + curvature * (xb - x).squaredNorm();
    if (lhs < rhs - tol) return false;
  }
  return true;
}

}  // namespace pdprox
