#ifndef HEARS_NN_H_
#define HEARS_NN_H_

#include <vector>

#include <Eigen/Dense>

#include "hears/rng.h"

namespace hears {

enum class Activation { kTanh, kIdentity };

// Fully connected network with a flat parameter vector. Layer l stores its
// weights (out x in, row-major) followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation hidden = Activation::kTanh,
      Activation output = Activation::kIdentity);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  size_t n_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  // uniform(-s, s) weights with s = sqrt(6 / (fan_in + fan_out)) times
  // `scale` on the last layer; zero biases
  void InitRandom(Rng& rng, double last_layer_scale = 1.0);

  struct Cache {
    std::vector<Eigen::VectorXd> act;  // act[0] input, act[l+1] post-activation
  };

  Eigen::VectorXd Forward(const Eigen::VectorXd& x, Cache* cache = nullptr) const;

  // Adds d loss / d params to grad (size n_params) given d loss / d output,
  // and returns d loss / d input.
  Eigen::VectorXd Backward(const Cache& cache, const Eigen::VectorXd& grad_out,
                           std::vector<double>& grad) const;

 private:
  size_t WeightOffset(size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  Activation hidden_ = Activation::kTanh;
  Activation output_ = Activation::kIdentity;
  std::vector<double> params_;
  std::vector<size_t> offsets_;
};

// Scales grad in place so its Euclidean norm is at most max_norm. Returns the
// norm before clipping.
double ClipGradNorm(std::vector<double>& grad, double max_norm);

// target <- tau * source + (1 - tau) * target
void PolyakUpdate(const std::vector<double>& source, std::vector<double>& target, double tau);

}  // namespace hears

#endif  // HEARS_NN_H_
