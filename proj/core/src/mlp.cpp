#include "surrogate/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "surrogate/error.hpp"

namespace surrogate {

nlohmann::json MlpParams::to_json() const {
  return {{"hidden_sizes", hidden_sizes}, {"alpha", alpha},       {"max_iter", max_iter},
          {"lbfgs_memory", lbfgs_memory}, {"grad_tol", grad_tol}, {"seed", seed}};
}

MlpParams MlpParams::from_json(const nlohmann::json& j) {
  MlpParams p;
  p.hidden_sizes = j.value("hidden_sizes", p.hidden_sizes);
  p.alpha = j.value("alpha", p.alpha);
  p.max_iter = j.value("max_iter", p.max_iter);
  p.lbfgs_memory = j.value("lbfgs_memory", p.lbfgs_memory);
  p.grad_tol = j.value("grad_tol", p.grad_tol);
  p.seed = j.value("seed", p.seed);
  return p;
}

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Shape {
  std::vector<std::size_t> widths;  // input, hidden..., 1

  std::size_t layers() const { return widths.size() - 1; }
  std::size_t count() const {
    std::size_t c = 0;
    for (std::size_t l = 0; l < layers(); ++l) c += widths[l] * widths[l + 1] + widths[l + 1];
    return c;
  }
};

// Loss and gradient over a flat parameter vector laid out as in flat_parameters().
double evaluate(const Shape& shape, std::span<const double> theta, const Matrix& X, std::span<const int> y,
                double alpha, std::span<double> grad) {
  const std::size_t L = shape.layers();
  std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<std::size_t> w_off(L);
  std::vector<std::size_t> b_off(L);
  std::size_t off = 0;
  for (std::size_t l = 0; l < L; ++l) {
    w_off[l] = off;
    off += shape.widths[l] * shape.widths[l + 1];
    b_off[l] = off;
    off += shape.widths[l + 1];
  }

  std::vector<std::vector<double>> act(L + 1);
  std::vector<std::vector<double>> delta(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    act[l].resize(shape.widths[l]);
    delta[l].resize(shape.widths[l]);
  }

  const double inv_n = 1.0 / static_cast<double>(X.rows());
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto x = X.row(r);
    std::copy(x.begin(), x.end(), act[0].begin());
    double z_out = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t in = shape.widths[l];
      const std::size_t out = shape.widths[l + 1];
      const double* W = theta.data() + w_off[l];
      const double* b = theta.data() + b_off[l];
      auto& next = act[l + 1];
      std::copy(b, b + out, next.begin());
      for (std::size_t i = 0; i < in; ++i) {
        const double a = act[l][i];
        if (a == 0.0) continue;
        const double* Wi = W + i * out;
        for (std::size_t j = 0; j < out; ++j) next[j] += a * Wi[j];
      }
      if (l + 1 < L) {
        for (auto& v : next) v = std::tanh(v);
      } else {
        z_out = next[0];
      }
    }
    const double target = y[r] == 1 ? 1.0 : 0.0;
    loss += softplus(z_out) - target * z_out;

    delta[L][0] = (sigmoid(z_out) - target) * inv_n;
    for (std::size_t l = L; l-- > 0;) {
      const std::size_t in = shape.widths[l];
      const std::size_t out = shape.widths[l + 1];
      const double* W = theta.data() + w_off[l];
      double* gW = grad.data() + w_off[l];
      double* gb = grad.data() + b_off[l];
      const auto& d = delta[l + 1];
      for (std::size_t j = 0; j < out; ++j) gb[j] += d[j];
      for (std::size_t i = 0; i < in; ++i) {
        const double a = act[l][i];
        double back = 0.0;
        const double* Wi = W + i * out;
        double* gWi = gW + i * out;
        for (std::size_t j = 0; j < out; ++j) {
          gWi[j] += a * d[j];
          back += Wi[j] * d[j];
        }
        if (l > 0) delta[l][i] = back * (1.0 - a * a);  // tanh'
      }
    }
  }
  loss *= inv_n;

  if (alpha > 0.0) {
    double sq = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t count = shape.widths[l] * shape.widths[l + 1];
      for (std::size_t k = 0; k < count; ++k) {
        const double w = theta[w_off[l] + k];
        sq += w * w;
        grad[w_off[l] + k] += alpha * w;
      }
    }
    loss += 0.5 * alpha * sq;
  }
  return loss;
}

Shape shape_of(const std::vector<DenseLayer>& layers) {
  Shape s;
  s.widths.push_back(layers.front().in);
  for (const auto& l : layers) s.widths.push_back(l.out);
  return s;
}

}  // namespace

MlpModel::MlpModel(std::vector<DenseLayer> layers, MlpParams params)
    : layers_(std::move(layers)), params_(std::move(params)) {
  if (layers_.empty()) throw Error(ErrorCode::DimensionMismatch, "network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.in == 0 || layer.out == 0 || layer.weights.size() != layer.in * layer.out ||
        layer.bias.size() != layer.out || (l > 0 && layers_[l - 1].out != layer.in)) {
      throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " shape does not chain");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw Error(ErrorCode::NonFiniteWeights, "layer " + std::to_string(l) + " holds non-finite values");
    }
  }
  if (layers_.back().out != 1) throw Error(ErrorCode::DimensionMismatch, "output layer must have one unit");
}

MlpModel MlpModel::zeros(std::span<const std::size_t> widths) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers.push_back({widths[l], widths[l + 1], std::vector<double>(widths[l] * widths[l + 1], 0.0),
                      std::vector<double>(widths[l + 1], 0.0)});
  }
  return MlpModel(std::move(layers));
}

std::size_t MlpModel::parameter_count() const { return shape_of(layers_).count(); }

std::vector<double> MlpModel::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void MlpModel::set_flat_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "flat parameter length");
  std::size_t off = 0;
  for (auto& l : layers_) {
    std::copy_n(flat.begin() + off, l.weights.size(), l.weights.begin());
    off += l.weights.size();
    std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
    off += l.bias.size();
  }
}

double MlpModel::predict_proba(std::span<const double> x) const {
  check_dimension(x, input_dim());
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t i = 0; i < layer.in; ++i) {
      for (std::size_t j = 0; j < layer.out; ++j) next[j] += a[i] * layer.weights[i * layer.out + j];
    }
    if (l + 1 < layers_.size()) {
      for (auto& v : next) v = std::tanh(v);
    }
    a.swap(next);
  }
  const double p = sigmoid(a[0]);
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

std::pair<double, std::vector<double>> MlpModel::loss_and_grad(const Matrix& X, std::span<const int> y,
                                                               double alpha) const {
  if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "X and y row counts differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyData, "loss over an empty batch");
  if (X.cols() != input_dim()) check_dimension(X.row(0), input_dim());
  const auto shape = shape_of(layers_);
  const auto theta = flat_parameters();
  std::vector<double> grad(theta.size());
  const double loss = evaluate(shape, theta, X, y, alpha, grad);
  return {loss, std::move(grad)};
}

MlpModel MlpModel::train(const Matrix& X, std::span<const int> y, const MlpParams& params, LbfgsResult* report) {
  if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "X and y row counts differ");
  if (X.rows() < 2) throw Error(ErrorCode::SingleSample, "MLP needs at least two samples");
  if (params.alpha < 0.0 || params.max_iter < 1 ||
      std::any_of(params.hidden_sizes.begin(), params.hidden_sizes.end(), [](std::size_t h) { return h < 1; })) {
    throw Error(ErrorCode::InvalidParams, "MLP requires hidden sizes >= 1, alpha >= 0, max_iter >= 1");
  }

  Shape shape;
  shape.widths.push_back(X.cols());
  shape.widths.insert(shape.widths.end(), params.hidden_sizes.begin(), params.hidden_sizes.end());
  shape.widths.push_back(1);

  std::mt19937_64 rng(params.seed);
  std::vector<double> theta;
  theta.reserve(shape.count());
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    const double fan_in = static_cast<double>(shape.widths[l]);
    const double fan_out = static_cast<double>(shape.widths[l + 1]);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> init(-bound, bound);
    const std::size_t count = shape.widths[l] * shape.widths[l + 1] + shape.widths[l + 1];
    for (std::size_t k = 0; k < count; ++k) theta.push_back(init(rng));
  }

  LbfgsOptions opts;
  opts.memory = params.lbfgs_memory;
  opts.max_iter = params.max_iter;
  opts.grad_tol = params.grad_tol;
  auto result = lbfgs_minimize(
      [&](std::span<const double> t, std::span<double> g) { return evaluate(shape, t, X, y, params.alpha, g); },
      std::move(theta), opts);

  std::vector<DenseLayer> layers;
  std::size_t off = 0;
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    DenseLayer layer{shape.widths[l], shape.widths[l + 1], {}, {}};
    layer.weights.assign(result.x.begin() + off, result.x.begin() + off + layer.in * layer.out);
    off += layer.in * layer.out;
    layer.bias.assign(result.x.begin() + off, result.x.begin() + off + layer.out);
    off += layer.out;
    layers.push_back(std::move(layer));
  }
  if (report) *report = result;
  return MlpModel(std::move(layers), params);
}

nlohmann::json MlpModel::body_to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < l.in; ++i) {
      rows.push_back(std::vector<double>(l.weights.begin() + i * l.out, l.weights.begin() + (i + 1) * l.out));
    }
    layers.push_back({{"shape", {l.in, l.out}}, {"weights", std::move(rows)}, {"bias", l.bias}});
  }
  return {{"params", params_.to_json()},
          {"hidden_activation", "tanh"},
          {"output_activation", "logistic"},
          {"layers", std::move(layers)}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& lj : j.at("layers")) {
    DenseLayer l;
    l.in = lj.at("shape").at(0).get<std::size_t>();
    l.out = lj.at("shape").at(1).get<std::size_t>();
    for (const auto& row : lj.at("weights")) {
      auto r = row.get<std::vector<double>>();
      if (r.size() != l.out) throw Error(ErrorCode::DimensionMismatch, "weight row width differs from shape");
      l.weights.insert(l.weights.end(), r.begin(), r.end());
    }
    l.bias = lj.at("bias").get<std::vector<double>>();
    layers.push_back(std::move(l));
  }
  return MlpModel(std::move(layers), MlpParams::from_json(j.at("params")));
}

}  // namespace surrogate
