#include "mvsvm/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace mvsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot_augmented(const std::vector<double>& w, const SparseVector& x) {
  double s = w.back();  // constant bias feature
  for (size_t k = 0; k < x.indices.size(); ++k)
    s += w[static_cast<size_t>(x.indices[k])] * x.values[k];
  return s;
}

// Dual coordinate descent for the L2-regularized hinge loss,
//
//   min_w 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)
//
// via its dual  min_a 0.5 a'Qa - e'a, 0 <= a_i <= C, Q_ij = y_i y_j
// x_i.x_j, with projected-gradient shrinking and stopping when the
// projected gradient spread falls below tol. x_i here carries the
// implicit constant bias feature.
struct DualCdResult {
  std::vector<double> w;  // size dim+1, last entry is the bias
  bool converged = false;
  std::vector<double> objective;  // dual objective per outer pass
};

DualCdResult solve_l2r_hinge_dual(std::span<const SparseVector> X,
                                  const std::vector<int8_t>& y, double C,
                                  double tol, int max_iter, uint64_t seed) {
  const size_t l = X.size();
  const size_t w_size = static_cast<size_t>(X[0].dim) + 1;

  DualCdResult res;
  res.w.assign(w_size, 0.0);
  std::vector<double> alpha(l, 0.0);
  std::vector<double> qd(l);
  std::vector<size_t> index(l);
  for (size_t i = 0; i < l; ++i) {
    double sq = 1.0;  // bias feature
    for (const double v : X[i].values) sq += v * v;
    qd[i] = sq;
    index[i] = i;
  }

  std::mt19937_64 rng(seed);
  size_t active_size = l;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;

  int iter = 0;
  while (iter < max_iter) {
    double pg_max_new = -kInf;
    double pg_min_new = kInf;

    // explicit modulo keeps the permutation identical across platforms
    for (size_t i = 0; i < active_size; ++i)
      std::swap(index[i], index[i + rng() % (active_size - i)]);

    for (size_t s = 0; s < active_size; ++s) {
      const size_t i = index[s];
      const double yi = y[i];
      double g = yi * dot_augmented(res.w, X[i]) - 1.0;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active_size;
          std::swap(index[s], index[active_size]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == C) {
        if (g < pg_min_old) {
          --active_size;
          std::swap(index[s], index[active_size]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }

      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::fabs(pg) > 1e-12) {
        const double alpha_old = alpha[i];
        alpha[i] = std::min(std::max(alpha[i] - g / qd[i], 0.0), C);
        const double d = (alpha[i] - alpha_old) * yi;
        res.w[w_size - 1] += d;
        const auto& x = X[i];
        for (size_t k = 0; k < x.indices.size(); ++k)
          res.w[static_cast<size_t>(x.indices[k])] += d * x.values[k];
      }
    }

    ++iter;
    double wsq = 0.0;
    for (const double v : res.w) wsq += v * v;
    const double asum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    res.objective.push_back(0.5 * wsq - asum);

    if (pg_max_new - pg_min_new <= tol) {
      if (active_size == l) {
        res.converged = true;
        break;
      }
      active_size = l;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? kInf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -kInf : pg_min_new;
  }
  return res;
}

// Column view of the augmented design matrix for the primal solver.
struct Columns {
  std::vector<std::vector<std::pair<size_t, double>>> cols;  // (row, value)
};

Columns transpose(std::span<const SparseVector> X) {
  Columns t;
  const size_t w_size = static_cast<size_t>(X[0].dim) + 1;
  t.cols.resize(w_size);
  for (size_t i = 0; i < X.size(); ++i) {
    const auto& x = X[i];
    for (size_t k = 0; k < x.indices.size(); ++k)
      t.cols[static_cast<size_t>(x.indices[k])].emplace_back(i, x.values[k]);
    t.cols[w_size - 1].emplace_back(i, 1.0);  // bias feature
  }
  return t;
}

// Cyclic coordinate descent with Newton steps and line search for the
// L1-regularized squared hinge loss,
//
//   min_w ||w||_1 + C sum_i max(0, 1 - y_i w.x_i)^2
//
// following the standard shrinking formulation. b_i tracks
// 1 - y_i w.x_i; columns store y_i * x_ij so updates stay one pass.
DualCdResult solve_l1r_sqhinge_primal(std::span<const SparseVector> X,
                                      const std::vector<int8_t>& y, double C,
                                      double tol, int max_iter,
                                      uint64_t seed) {
  const size_t l = X.size();
  Columns t = transpose(X);
  const size_t w_size = t.cols.size();
  for (auto& col : t.cols)
    for (auto& [row, val] : col) val *= y[row];

  DualCdResult res;
  res.w.assign(w_size, 0.0);
  std::vector<double> b(l, 1.0);
  std::vector<double> xj_sq(w_size, 0.0);
  std::vector<size_t> index(w_size);
  for (size_t j = 0; j < w_size; ++j) {
    index[j] = j;
    for (const auto& [row, val] : t.cols[j]) xj_sq[j] += C * val * val;
  }

  const double sigma = 0.01;
  const int max_linesearch = 20;
  std::mt19937_64 rng(seed);
  size_t active_size = w_size;
  double g_max_old = kInf;
  double g_norm1_init = -1.0;
  bool converged = false;

  int iter = 0;
  while (iter < max_iter) {
    double g_max_new = 0.0;
    double g_norm1_new = 0.0;

    for (size_t j = 0; j < active_size; ++j)
      std::swap(index[j], index[j + rng() % (active_size - j)]);

    for (size_t s = 0; s < active_size; ++s) {
      const size_t j = index[s];
      double g_loss = 0.0;
      double h = 0.0;
      for (const auto& [row, val] : t.cols[j]) {
        if (b[row] > 0.0) {
          const double tmp = C * val;
          g_loss -= tmp * b[row];
          h += tmp * val;
        }
      }
      g_loss *= 2.0;
      h = std::max(2.0 * h, 1e-12);

      const double gp = g_loss + 1.0;
      const double gn = g_loss - 1.0;
      double violation = 0.0;
      if (res.w[j] == 0.0) {
        if (gp < 0.0) {
          violation = -gp;
        } else if (gn > 0.0) {
          violation = gn;
        } else if (gp > g_max_old / double(l) && gn < -g_max_old / double(l)) {
          --active_size;
          std::swap(index[s], index[active_size]);
          --s;
          continue;
        }
      } else if (res.w[j] > 0.0) {
        violation = std::fabs(gp);
      } else {
        violation = std::fabs(gn);
      }
      g_max_new = std::max(g_max_new, violation);
      g_norm1_new += violation;

      double d;
      if (gp < h * res.w[j])
        d = -gp / h;
      else if (gn > h * res.w[j])
        d = -gn / h;
      else
        d = -res.w[j];
      if (std::fabs(d) < 1e-12) continue;

      double delta = std::fabs(res.w[j] + d) - std::fabs(res.w[j]) + g_loss * d;
      double d_old = 0.0;
      double loss_old = 0.0;
      int ls = 0;
      for (; ls < max_linesearch; ++ls) {
        const double d_diff = d_old - d;
        const double cond =
            std::fabs(res.w[j] + d) - std::fabs(res.w[j]) - sigma * delta;
        const double appxcond = xj_sq[j] * d * d + g_loss * d + cond;
        if (appxcond <= 0.0) {
          for (const auto& [row, val] : t.cols[j]) b[row] += d_diff * val;
          break;
        }
        double loss_new = 0.0;
        if (ls == 0) {
          loss_old = 0.0;
          for (const auto& [row, val] : t.cols[j]) {
            if (b[row] > 0.0) loss_old += C * b[row] * b[row];
            b[row] += d_diff * val;
            if (b[row] > 0.0) loss_new += C * b[row] * b[row];
          }
        } else {
          for (const auto& [row, val] : t.cols[j]) {
            b[row] += d_diff * val;
            if (b[row] > 0.0) loss_new += C * b[row] * b[row];
          }
        }
        if (cond + loss_new - loss_old <= 0.0) break;
        d_old = d;
        d *= 0.5;
        delta *= 0.5;
      }

      res.w[j] += d;

      if (ls >= max_linesearch) {
        std::fill(b.begin(), b.end(), 1.0);
        for (size_t jj = 0; jj < w_size; ++jj) {
          if (res.w[jj] == 0.0) continue;
          for (const auto& [row, val] : t.cols[jj]) b[row] -= res.w[jj] * val;
        }
      }
    }

    if (iter == 0) g_norm1_init = g_norm1_new;
    ++iter;

    double obj = 0.0;
    for (const double wj : res.w) obj += std::fabs(wj);
    for (const double bi : b)
      if (bi > 0.0) obj += C * bi * bi;
    res.objective.push_back(obj);

    if (g_norm1_new <= tol * g_norm1_init) {
      if (active_size == w_size) {
        converged = true;
        break;
      }
      active_size = w_size;
      g_max_old = kInf;
      continue;
    }
    g_max_old = g_max_new;
  }
  res.converged = converged;
  return res;
}

std::vector<std::string> sorted_classes(std::span<const std::string> y) {
  std::set<std::string> s(y.begin(), y.end());
  return {s.begin(), s.end()};
}

}  // namespace

std::string reg_name(Reg reg) { return reg == Reg::L1 ? "L1" : "L2"; }

Reg reg_from_name(const std::string& name) {
  if (name == "L1" || name == "l1") return Reg::L1;
  if (name == "L2" || name == "l2") return Reg::L2;
  throw Error("unknown regularization: " + name);
}

LinearModel train(std::span<const SparseVector> X,
                  std::span<const std::string> y, const TrainOptions& opts) {
  if (X.size() != y.size()) throw Error("train: |X| != |y|");
  if (X.size() < 2) throw Error("train: need at least two instances");
  const int32_t dim = X[0].dim;
  for (const auto& x : X)
    if (x.dim != dim) throw Error("train: inconsistent feature dimensions");

  LinearModel model;
  model.classes_ = sorted_classes(y);
  if (model.classes_.size() < 2) throw Error("train: single-class input");
  model.dim_ = dim;
  model.reg_ = opts.reg;
  model.C_ = opts.C;

  const size_t n_problems =
      model.classes_.size() == 2 ? 1 : model.classes_.size();
  model.converged_ = true;
  for (size_t p = 0; p < n_problems; ++p) {
    // Binary: positive side is classes[1]; one-vs-rest: classes[p].
    const std::string& pos =
        n_problems == 1 ? model.classes_[1] : model.classes_[p];
    std::vector<int8_t> yy(X.size());
    for (size_t i = 0; i < X.size(); ++i) yy[i] = y[i] == pos ? 1 : -1;

    DualCdResult r = opts.reg == Reg::L2
                         ? solve_l2r_hinge_dual(X, yy, opts.C, opts.tol,
                                                opts.max_iter, opts.seed)
                         : solve_l1r_sqhinge_primal(X, yy, opts.C, opts.tol,
                                                    opts.max_iter, opts.seed);
    model.bias_.push_back(r.w.back());
    r.w.pop_back();
    model.weights_.push_back(std::move(r.w));
    model.objective_trace_.push_back(std::move(r.objective));
    model.converged_ = model.converged_ && r.converged;
  }
  return model;
}

std::vector<double> LinearModel::decision_values(const SparseVector& x) const {
  if (x.dim != dim_)
    throw Error("decision: dimension mismatch (" + std::to_string(x.dim) +
                " vs " + std::to_string(dim_) + ")");
  std::vector<double> out(weights_.size());
  for (size_t p = 0; p < weights_.size(); ++p) {
    double s = bias_[p];
    const auto& w = weights_[p];
    for (size_t k = 0; k < x.indices.size(); ++k)
      s += w[static_cast<size_t>(x.indices[k])] * x.values[k];
    out[p] = s;
  }
  return out;
}

const std::string& LinearModel::predict(const SparseVector& x) const {
  const std::vector<double> d = decision_values(x);
  if (d.size() == 1) return d[0] > 0.0 ? classes_[1] : classes_[0];
  size_t best = 0;
  for (size_t p = 1; p < d.size(); ++p)
    if (d[p] > d[best]) best = p;  // first max wins: lexicographic tie-break
  return classes_[best];
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void LinearModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model: " + path);
  out << "linsvm v1 " << reg_name(reg_) << ' ' << fmt_double(C_) << ' ' << dim_;
  for (const auto& c : classes_) out << ' ' << c;
  out << '\n';
  for (size_t p = 0; p < weights_.size(); ++p) {
    out << "bias " << fmt_double(bias_[p]) << '\n';
    const auto& w = weights_[p];
    for (size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0.0) out << j << ':' << fmt_double(w[j]) << '\n';
  }
  if (!out) throw Error("error writing model: " + path);
}

LinearModel LinearModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model: " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error("empty model file: " + path);
  std::istringstream hs(header);
  std::string magic, version, reg;
  hs >> magic >> version;
  if (magic != "linsvm" || version != "v1")
    throw Error("bad model header in " + path);
  LinearModel model;
  double c = 0.0;
  hs >> reg >> c >> model.dim_;
  if (hs.fail()) throw Error("bad model header in " + path);
  model.reg_ = reg_from_name(reg);
  model.C_ = c;
  std::string cls;
  while (hs >> cls) model.classes_.push_back(cls);
  if (model.classes_.size() < 2) throw Error("model missing classes: " + path);

  const size_t n_problems =
      model.classes_.size() == 2 ? 1 : model.classes_.size();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("bias ", 0) == 0) {
      model.bias_.push_back(std::stod(line.substr(5)));
      model.weights_.emplace_back(static_cast<size_t>(model.dim_), 0.0);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos || model.weights_.empty())
      throw Error("malformed model line in " + path);
    const auto j = static_cast<size_t>(std::stol(line.substr(0, colon)));
    if (j >= static_cast<size_t>(model.dim_))
      throw Error("weight index out of range in " + path);
    model.weights_.back()[j] = std::stod(line.substr(colon + 1));
  }
  if (model.weights_.size() != n_problems)
    throw Error("model section count mismatch in " + path);
  return model;
}

PlattCalibrator::PlattCalibrator(std::vector<std::pair<double, double>> ab)
    : ab_(std::move(ab)) {}

double PlattCalibrator::transform(double decision, size_t problem) const {
  const auto [a, b] = ab_[problem];
  const double z = a * decision + b;
  double p;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    p = e / (1.0 + e);
  } else {
    p = 1.0 / (1.0 + std::exp(z));
  }
  // keep the output strictly inside (0, 1)
  const double hi = std::nextafter(1.0, 0.0);
  return std::min(std::max(p, std::numeric_limits<double>::min()), hi);
}

std::pair<double, double> fit_platt(std::span<const double> decisions,
                                    std::span<const int> labels,
                                    int max_iter) {
  if (decisions.size() != labels.size())
    throw Error("fit_platt: size mismatch");
  double prior1 = 0.0, prior0 = 0.0;
  for (const int lab : labels) (lab > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0.0 || prior0 == 0.0)
    throw Error("fit_platt: both classes must be present");

  const double b_prior = std::log((prior0 + 1.0) / (prior1 + 1.0));

  double dmin = kInf, dmax = -kInf;
  for (const double d : decisions) {
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax - dmin < 1e-12) return {0.0, b_prior};

  // Newton fit with prior-adjusted targets (Platt scaling in the
  // numerically robust formulation).
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  const size_t l = decisions.size();
  std::vector<double> t(l);
  for (size_t i = 0; i < l; ++i)
    t[i] = labels[i] > 0 ? hi_target : lo_target;

  double a = 0.0;
  double b = b_prior;
  auto nll = [&](double aa, double bb) {
    double f = 0.0;
    for (size_t i = 0; i < l; ++i) {
      const double z = decisions[i] * aa + bb;
      if (z >= 0.0)
        f += t[i] * z + std::log1p(std::exp(-z));
      else
        f += (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double fval = nll(a, b);

  const double min_step = 1e-10;
  const double sigma = 1e-12;
  const double eps = 1e-5;
  for (int it = 0; it < max_iter; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (size_t i = 0; i < l; ++i) {
      const double z = decisions[i] * a + b;
      double p, q;
      if (z >= 0.0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += decisions[i] * decisions[i] * d2;
      h22 += d2;
      h21 += decisions[i] * d2;
      const double d1 = t[i] - p;
      g1 += decisions[i] * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < eps && std::fabs(g2) < eps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= min_step) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = nll(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;  // line search failed
  }
  return {a, b};
}

PlattCalibrator fit_platt_for_model(
    const LinearModel& model, const std::vector<std::vector<double>>& decisions,
    std::span<const std::string> labels) {
  if (decisions.size() != labels.size())
    throw Error("fit_platt_for_model: size mismatch");
  std::vector<std::pair<double, double>> ab;
  for (size_t p = 0; p < model.n_problems(); ++p) {
    const std::string& pos =
        model.n_problems() == 1 ? model.classes()[1] : model.classes()[p];
    std::vector<double> d(labels.size());
    std::vector<int> y(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
      d[i] = decisions[i][p];
      y[i] = labels[i] == pos ? 1 : 0;
    }
    ab.push_back(fit_platt(d, y));
  }
  return PlattCalibrator(std::move(ab));
}

std::vector<double> predict_proba(const LinearModel& model,
                                  const PlattCalibrator& calib,
                                  const SparseVector& x) {
  if (calib.n_problems() != model.n_problems())
    throw Error("predict_proba: calibrator does not match model");
  const std::vector<double> d = model.decision_values(x);
  if (d.size() == 1) {
    const double p = calib.transform(d[0], 0);
    return {1.0 - p, p};
  }
  std::vector<double> out(d.size());
  double sum = 0.0;
  for (size_t p = 0; p < d.size(); ++p) {
    out[p] = calib.transform(d[p], p);
    sum += out[p];
  }
  for (double& v : out) v /= sum;
  return out;
}

void PlattCalibrator::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write calibrator: " + path);
  out << "platt v1 " << ab_.size() << '\n';
  for (const auto& [a, b] : ab_)
    out << fmt_double(a) << ' ' << fmt_double(b) << '\n';
  if (!out) throw Error("error writing calibrator: " + path);
}

PlattCalibrator PlattCalibrator::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open calibrator: " + path);
  std::string magic, version;
  size_t n = 0;
  in >> magic >> version >> n;
  if (magic != "platt" || version != "v1" || in.fail())
    throw Error("bad calibrator header in " + path);
  std::vector<std::pair<double, double>> ab(n);
  for (auto& [a, b] : ab) {
    in >> a >> b;
    if (in.fail()) throw Error("malformed calibrator in " + path);
  }
  return PlattCalibrator(std::move(ab));
}

}  // namespace mvsvm
