#include "wisig/svm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kernel_matrix.hpp"
#include "wisig/error.hpp"

namespace wisig {

namespace {

constexpr double kTau = 1e-12;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) {
    throw InvalidInput("rbf_kernel: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  }
  if (!positive_finite(gamma)) throw InvalidInput("rbf_kernel: gamma must be positive");
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma) {
  return rbf_kernel(a.values(), b.values(), gamma);
}

void SvmConfig::validate() const {
  if (!positive_finite(gamma)) throw InvalidInput("svm: gamma must be a positive finite value");
  if (!positive_finite(c)) throw InvalidInput("svm: c must be a positive finite value");
  if (!positive_finite(tolerance)) {
    throw InvalidInput("svm: tolerance must be a positive finite value");
  }
}

void TrainingSet::add(std::span<const double> x, int label) {
  if (label != 1 && label != -1) throw InvalidInput("training label must be +1 or -1");
  if (labels.empty() && dim == 0) dim = x.size();
  if (x.size() != dim || dim == 0) {
    throw InvalidInput("training set: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                       std::to_string(dim) + ")");
  }
  rows.insert(rows.end(), x.begin(), x.end());
  labels.push_back(label);
}

TrainingSet make_training_set(std::span<const DissimilarityVector> learning_set) {
  TrainingSet set;
  if (!learning_set.empty()) {
    set.dim = learning_set.front().values.dim();
    set.rows.reserve(learning_set.size() * set.dim);
    set.labels.reserve(learning_set.size());
  }
  for (const auto& v : learning_set) {
    set.add(v.values.values(), v.klass == PairClass::within ? 1 : -1);
  }
  return set;
}

SvmModel::SvmModel(std::size_t dim, std::vector<float> support_vectors,
                   std::vector<double> dual_coefficients, double bias, double gamma, double c)
    : dim_(dim),
      support_vectors_(std::move(support_vectors)),
      dual_coefficients_(std::move(dual_coefficients)),
      bias_(bias),
      gamma_(gamma),
      c_(c) {
  if (dim_ == 0) throw InvalidInput("svm model: dim must be >= 1");
  if (dual_coefficients_.empty()) throw InvalidInput("svm model: no support vectors");
  if (support_vectors_.size() != dual_coefficients_.size() * dim_) {
    throw InvalidInput("svm model: support vector storage does not match n_sv * dim");
  }
  if (!positive_finite(gamma_) || !positive_finite(c_)) {
    throw InvalidInput("svm model: gamma and c must be positive");
  }
  if (!std::isfinite(bias_)) throw InvalidInput("svm model: non-finite bias");
  for (double a : dual_coefficients_) {
    if (!std::isfinite(a) || std::fabs(a) > c_) {
      throw InvalidInput("svm model: dual coefficient outside [-c, c]");
    }
  }
  for (float v : support_vectors_) {
    if (!std::isfinite(v)) throw InvalidInput("svm model: non-finite support vector value");
  }
}

double SvmModel::decision_score(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw InvalidInput("decision_score: dimension mismatch (" + std::to_string(x.size()) +
                       " vs model " + std::to_string(dim_) + ")");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < dual_coefficients_.size(); ++i) {
    const float* sv = support_vectors_.data() + i * dim_;
    double sq = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = static_cast<double>(sv[k]) - x[k];
      sq += d * d;
    }
    score += dual_coefficients_[i] * std::exp(-gamma_ * sq);
  }
  return score + bias_;
}

TrainResult train(const TrainingSet& data, const SvmConfig& config) {
  config.validate();
  const std::size_t n = data.size();
  if (n == 0) throw InvalidInput("train: empty learning set");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : data.labels) (y > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw InvalidInput("train: learning set contains a single class");

  const double c = config.c;
  const auto& y = data.labels;
  std::uint64_t cap = config.max_iterations;
  if (cap == 0) cap = std::max<std::uint64_t>(10ull * n * n, 1000);

  auto kernel = detail::make_kernel_rows(data, config);

  // G is the gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  std::vector<double> diag(n, 1.0);  // K_ii = 1 for the RBF kernel

  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c; };
  auto dual_objective = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
    return -0.5 * f;
  };

  std::vector<double> trace;
  double gap = 0.0;
  std::uint64_t iter = 0;
  double last_objective = 0.0;

  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (gap <= config.tolerance) break;
    if (iter >= cap) {
      throw TrainingFailure("train: no convergence after " + std::to_string(iter) +
                                " iterations (KKT gap " + std::to_string(gap) + ")",
                            iter, gap);
    }
    ++iter;

    const auto ki = kernel->row(i);
    const auto kj = kernel->row(j);
    const double qij = y[i] * y[j] * ki[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];

    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
    }

    if (config.trace) {
      const double obj = dual_objective();
      const double slack = 1e-9 * std::max(1.0, std::fabs(last_objective));
      if (obj < last_objective - slack) {
        throw TrainingFailure("train: dual objective decreased at iteration " +
                                  std::to_string(iter),
                              iter, gap);
      }
      trace.push_back(obj);
      last_objective = obj;
    }
  }

  // Bias: average over free vectors, else the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  std::size_t correct = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double f = y[t] * (grad[t] + 1.0) - rho;
    if ((f >= 0.0) == (y[t] > 0)) ++correct;
  }

  std::vector<float> svs;
  std::vector<double> coefs;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    for (double v : data.row(t)) svs.push_back(static_cast<float>(v));
    coefs.push_back(alpha[t] * y[t]);
  }

  if (coefs.empty()) throw TrainingFailure("train: solution has no support vectors", iter, gap);
  SvmModel model(data.dim, std::move(svs), std::move(coefs), -rho, config.gamma, c);
  return TrainResult{std::move(model), iter, gap,
                     static_cast<double>(correct) / static_cast<double>(n), std::move(alpha),
                     std::move(trace)};
}

TrainResult train(std::span<const DissimilarityVector> learning_set, const SvmConfig& config) {
  return train(make_training_set(learning_set), config);
}

}  // namespace wisig
