#include "chemorl/policy.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chemorl {

namespace {

constexpr double kLeakySlope = 0.1;

double leaky(double x) { return x >= 0.0 ? x : kLeakySlope * x; }
double dleaky(double x) { return x >= 0.0 ? 1.0 : kLeakySlope; }

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double softplus_inverse(double y) {
  return y > 30.0 ? y : std::log(std::expm1(y));
}

std::string double_bits_hex(double v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

double double_from_bits_hex(const std::string& s) {
  return std::bit_cast<double>(
      static_cast<std::uint64_t>(std::stoull(s, nullptr, 16)));
}

}  // namespace

std::size_t PolicyLayout::parameter_count() const {
  std::size_t n = 0;
  int in = obs_dim;
  for (int l = 0; l < hidden_depth; ++l) {
    n += static_cast<std::size_t>(hidden_width) * in + hidden_width;
    in = hidden_width;
  }
  n += 2 * (static_cast<std::size_t>(action_dim) * in + action_dim);
  return n;
}

bool Observation::finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Observation build_observation(std::span<const SystemState> states,
                              std::span<const ControlInput> applied_inputs,
                              int t, int n_steps) {
  if (t < 0 || t > n_steps - 1)
    throw std::invalid_argument("observation step outside [0, N_s-1]");
  if (states.size() < static_cast<size_t>(t) + 1)
    throw std::invalid_argument("state history too short for step");
  if (applied_inputs.size() < static_cast<size_t>(t))
    throw std::invalid_argument("input history too short for step");

  Observation obs;
  if (t >= 1) {
    const auto prev = states[t - 1].to_array();
    for (int i = 0; i < 5; ++i) obs.v[i] = prev[i];
  }
  if (t >= 2) {
    obs.v[5] = applied_inputs[t - 2].I1;
    obs.v[6] = applied_inputs[t - 2].I2;
  }
  const auto cur = states[t].to_array();
  for (int i = 0; i < 5; ++i) obs.v[7 + i] = cur[i];
  if (t >= 1) {
    obs.v[12] = applied_inputs[t - 1].I1;
    obs.v[13] = applied_inputs[t - 1].I2;
  }
  obs.v[14] = 2.0 * t / n_steps - 1.0;
  return obs;
}

SampledAction sample_action(const ActionDistribution& dist,
                            const InputBounds& bounds, RandomStream& rng) {
  SampledAction s;
  for (int i = 0; i < 2; ++i)
    s.raw[i] = rng.next_gaussian(dist.mean[i], dist.stddev[i]);
  s.applied.I1 = std::clamp(s.raw[0], 0.0, bounds.i_max_1);
  s.applied.I2 = std::clamp(s.raw[1], 0.0, bounds.i_max_2);
  return s;
}

double log_prob(const ActionDistribution& dist,
                const std::array<double, 2>& raw_action) {
  double lp = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double z = (raw_action[i] - dist.mean[i]) / dist.stddev[i];
    lp += -0.5 * z * z - std::log(dist.stddev[i]) -
          0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

namespace detail {

NetParams NetParams::zeros(const PolicyLayout& layout) {
  NetParams p;
  int in = layout.obs_dim;
  for (int l = 0; l < layout.hidden_depth; ++l) {
    p.W.emplace_back(Eigen::MatrixXd::Zero(layout.hidden_width, in));
    p.b.emplace_back(Eigen::VectorXd::Zero(layout.hidden_width));
    in = layout.hidden_width;
  }
  p.Wm = Eigen::MatrixXd::Zero(layout.action_dim, in);
  p.bm = Eigen::VectorXd::Zero(layout.action_dim);
  p.Ws = Eigen::MatrixXd::Zero(layout.action_dim, in);
  p.bs = Eigen::VectorXd::Zero(layout.action_dim);
  return p;
}

namespace {

void append_matrix_rowmajor(const Eigen::MatrixXd& m, Eigen::VectorXd& flat,
                            Eigen::Index& pos) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat[pos++] = m(r, c);
}

void read_matrix_rowmajor(Eigen::MatrixXd& m, const Eigen::VectorXd& flat,
                          Eigen::Index& pos) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[pos++];
}

}  // namespace

Eigen::VectorXd NetParams::to_flat() const {
  Eigen::Index n = 0;
  for (size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
  n += Wm.size() + bm.size() + Ws.size() + bs.size();
  Eigen::VectorXd flat(n);
  Eigen::Index pos = 0;
  for (size_t l = 0; l < W.size(); ++l) {
    append_matrix_rowmajor(W[l], flat, pos);
    flat.segment(pos, b[l].size()) = b[l];
    pos += b[l].size();
  }
  append_matrix_rowmajor(Wm, flat, pos);
  flat.segment(pos, bm.size()) = bm;
  pos += bm.size();
  append_matrix_rowmajor(Ws, flat, pos);
  flat.segment(pos, bs.size()) = bs;
  pos += bs.size();
  return flat;
}

void NetParams::from_flat(const PolicyLayout& layout,
                          const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(layout.parameter_count()))
    throw std::invalid_argument("flat parameter vector has wrong length");
  *this = zeros(layout);
  Eigen::Index pos = 0;
  for (size_t l = 0; l < W.size(); ++l) {
    read_matrix_rowmajor(W[l], flat, pos);
    b[l] = flat.segment(pos, b[l].size());
    pos += b[l].size();
  }
  read_matrix_rowmajor(Wm, flat, pos);
  bm = flat.segment(pos, bm.size());
  pos += bm.size();
  read_matrix_rowmajor(Ws, flat, pos);
  bs = flat.segment(pos, bs.size());
  pos += bs.size();
}

}  // namespace detail

GaussianPolicy::GaussianPolicy(const PolicyLayout& layout, double sigma_floor)
    : layout_(layout),
      sigma_floor_(sigma_floor),
      params_(detail::NetParams::zeros(layout)) {
  if (!(sigma_floor > 0.0))
    throw std::invalid_argument("sigma_floor must be strictly positive");
}

GaussianPolicy GaussianPolicy::initialize(const PolicyLayout& layout,
                                          double sigma_floor,
                                          const InputBounds& bounds,
                                          RandomStream& rng) {
  GaussianPolicy policy(layout, sigma_floor);
  auto fill_uniform = [&rng](Eigen::MatrixXd& m) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = scale * (2.0 * rng.next_double() - 1.0);
  };
  for (auto& W : policy.params_.W) fill_uniform(W);
  fill_uniform(policy.params_.Wm);
  fill_uniform(policy.params_.Ws);
  // Start exploration at ~20% of each action range.
  for (int i = 0; i < layout.action_dim; ++i) {
    const double target = 0.2 * bounds.max(i) - sigma_floor;
    policy.params_.bs[i] = softplus_inverse(std::max(target, 1e-6));
  }
  return policy;
}

struct GaussianPolicy::ForwardCache {
  Eigen::VectorXd obs;
  std::vector<Eigen::VectorXd> z;  // pre-activations per hidden layer
  std::vector<Eigen::VectorXd> a;  // activations per hidden layer
  Eigen::VectorXd mean, pre_std, sigma;
};

ActionDistribution GaussianPolicy::forward_cached(const Observation& obs,
                                                  ForwardCache& cache) const {
  if (!obs.finite())
    throw std::invalid_argument("policy forward: non-finite observation");

  cache.obs = Eigen::Map<const Eigen::VectorXd>(obs.v.data(), obs.v.size());
  cache.z.resize(layout_.hidden_depth);
  cache.a.resize(layout_.hidden_depth);
  const Eigen::VectorXd* input = &cache.obs;
  for (int l = 0; l < layout_.hidden_depth; ++l) {
    cache.z[l] = params_.W[l] * (*input) + params_.b[l];
    cache.a[l] = cache.z[l].unaryExpr([](double x) { return leaky(x); });
    input = &cache.a[l];
  }
  cache.mean = params_.Wm * (*input) + params_.bm;
  cache.pre_std = params_.Ws * (*input) + params_.bs;
  cache.sigma = cache.pre_std.unaryExpr(
      [this](double p) { return softplus(p) + sigma_floor_; });

  ActionDistribution dist;
  for (int i = 0; i < layout_.action_dim; ++i) {
    dist.mean[i] = cache.mean[i];
    dist.stddev[i] = cache.sigma[i];
  }
  return dist;
}

ActionDistribution GaussianPolicy::forward(const Observation& obs) const {
  ForwardCache cache;
  return forward_cached(obs, cache);
}

Eigen::VectorXd GaussianPolicy::grad_log_prob_sum(
    std::span<const Observation> observations,
    std::span<const std::array<double, 2>> raw_actions) const {
  if (observations.empty())
    throw std::invalid_argument("grad_log_prob_sum: empty episode");
  if (observations.size() != raw_actions.size())
    throw std::invalid_argument("observations/actions length mismatch");

  detail::NetParams grads = detail::NetParams::zeros(layout_);
  ForwardCache cache;
  for (size_t step = 0; step < observations.size(); ++step) {
    forward_cached(observations[step], cache);

    // d log N(u; m, sigma) / dm and /dsigma, then through softplus.
    Eigen::VectorXd gm(layout_.action_dim), gp(layout_.action_dim);
    for (int i = 0; i < layout_.action_dim; ++i) {
      const double diff = raw_actions[step][i] - cache.mean[i];
      const double s = cache.sigma[i];
      gm[i] = diff / (s * s);
      const double gsigma = diff * diff / (s * s * s) - 1.0 / s;
      gp[i] = gsigma * sigmoid(cache.pre_std[i]);
    }

    const Eigen::VectorXd& trunk_out = cache.a[layout_.hidden_depth - 1];
    grads.Wm.noalias() += gm * trunk_out.transpose();
    grads.bm += gm;
    grads.Ws.noalias() += gp * trunk_out.transpose();
    grads.bs += gp;

    Eigen::VectorXd delta =
        params_.Wm.transpose() * gm + params_.Ws.transpose() * gp;
    for (int l = layout_.hidden_depth - 1; l >= 0; --l) {
      delta.array() *=
          cache.z[l].unaryExpr([](double x) { return dleaky(x); }).array();
      const Eigen::VectorXd& layer_in = (l == 0) ? cache.obs : cache.a[l - 1];
      grads.W[l].noalias() += delta * layer_in.transpose();
      grads.b[l] += delta;
      if (l > 0) delta = params_.W[l].transpose() * delta;
    }
  }

  Eigen::VectorXd flat = grads.to_flat();
  if (!flat.allFinite())
    throw std::runtime_error("gradient-failure: non-finite log-prob gradient");
  return flat;
}

void GaussianPolicy::save(const std::string& path, std::uint64_t seed) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  const Eigen::VectorXd flat = to_flat();
  out << "chemorl-policy v1\n";
  out << "layout " << layout_.obs_dim << ' ' << layout_.hidden_width << ' '
      << layout_.hidden_depth << ' ' << layout_.action_dim << '\n';
  out << "sigma_floor " << double_bits_hex(sigma_floor_) << '\n';
  out << "seed " << seed << '\n';
  out << "params " << flat.size() << '\n';
  for (Eigen::Index i = 0; i < flat.size(); ++i)
    out << double_bits_hex(flat[i]) << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

GaussianPolicy GaussianPolicy::load(const std::string& path,
                                    std::uint64_t* seed_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  std::string line;
  if (!std::getline(in, line) || line != "chemorl-policy v1")
    throw std::runtime_error("unrecognized checkpoint header in " + path);

  PolicyLayout layout;
  std::string tag, value;
  in >> tag >> layout.obs_dim >> layout.hidden_width >> layout.hidden_depth >>
      layout.action_dim;
  if (tag != "layout" || layout.obs_dim < 1 || layout.hidden_width < 1 ||
      layout.hidden_depth < 1 || layout.action_dim < 1)
    throw std::runtime_error("invalid checkpoint layout in " + path);

  in >> tag >> value;
  if (tag != "sigma_floor")
    throw std::runtime_error("invalid checkpoint sigma_floor in " + path);
  const double sigma_floor = double_from_bits_hex(value);

  std::uint64_t seed = 0;
  in >> tag >> seed;
  if (tag != "seed") throw std::runtime_error("invalid checkpoint seed in " + path);
  if (seed_out) *seed_out = seed;

  Eigen::Index count = 0;
  in >> tag >> count;
  if (tag != "params" ||
      count != static_cast<Eigen::Index>(layout.parameter_count()))
    throw std::runtime_error("checkpoint parameter count does not match layout");

  Eigen::VectorXd flat(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> value))
      throw std::runtime_error("truncated checkpoint " + path);
    flat[i] = double_from_bits_hex(value);
  }
  GaussianPolicy policy(layout, sigma_floor);
  policy.from_flat(flat);
  return policy;
}

std::string GaussianPolicy::content_hash() const {
  const Eigen::VectorXd flat = to_flat();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(flat[i]);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffull;
      h *= 0x100000001b3ull;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chemorl
