#include "hears/nn.h"

#include <cmath>

#include "hears/types.h"

namespace hears {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mlp::Mlp(std::vector<int> sizes, Activation hidden, Activation output)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw ModelError("Mlp: need at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw ModelError("Mlp: layer sizes must be positive");
  }
  size_t off = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<size_t>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
  }
  params_.assign(off, 0.0);
}

void Mlp::InitRandom(Rng& rng, double last_layer_scale) {
  const size_t layers = sizes_.size() - 1;
  for (size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    double s = std::sqrt(6.0 / (in + out));
    if (l + 1 == layers) s *= last_layer_scale;
    double* w = params_.data() + offsets_[l];
    for (int i = 0; i < out * in; ++i) w[i] = rng.Uniform(-s, s);
    for (int i = 0; i < out; ++i) w[out * in + i] = 0.0;
  }
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& x, Cache* cache) const {
  if (x.size() != sizes_.front()) throw ModelError("Mlp::Forward: input has wrong size");
  const size_t layers = sizes_.size() - 1;
  if (cache) {
    cache->act.resize(layers + 1);
    cache->act[0] = x;
  }
  Eigen::VectorXd h = x;
  for (size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + offsets_[l] + out * in, out);
    Eigen::VectorXd z = w * h + b;
    const Activation act = l + 1 == layers ? output_ : hidden_;
    if (act == Activation::kTanh) z = z.array().tanh();
    h = std::move(z);
    if (cache) cache->act[l + 1] = h;
  }
  return h;
}

Eigen::VectorXd Mlp::Backward(const Cache& cache, const Eigen::VectorXd& grad_out,
                              std::vector<double>& grad) const {
  const size_t layers = sizes_.size() - 1;
  if (cache.act.size() != layers + 1) throw ModelError("Mlp::Backward: stale cache");
  if (grad_out.size() != sizes_.back()) throw ModelError("Mlp::Backward: grad has wrong size");
  if (grad.size() != params_.size()) throw ModelError("Mlp::Backward: grad buffer size");
  Eigen::VectorXd delta = grad_out;
  for (size_t li = layers; li-- > 0;) {
    const int in = sizes_[li], out = sizes_[li + 1];
    const Activation act = li + 1 == layers ? output_ : hidden_;
    if (act == Activation::kTanh) {
      delta = delta.array() * (1.0 - cache.act[li + 1].array().square());
    }
    Eigen::Map<RowMat> gw(grad.data() + offsets_[li], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[li] + out * in, out);
    gw.noalias() += delta * cache.act[li].transpose();
    gb += delta;
    Eigen::Map<const RowMat> w(params_.data() + offsets_[li], out, in);
    delta = w.transpose() * delta;
  }
  return delta;
}

double ClipGradNorm(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

void PolyakUpdate(const std::vector<double>& source, std::vector<double>& target, double tau) {
  if (source.size() != target.size()) throw ModelError("PolyakUpdate: size mismatch");
  for (size_t i = 0; i < source.size(); ++i) {
    target[i] = tau * source[i] + (1.0 - tau) * target[i];
  }
}

}  // namespace hears
