#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvsvm/features.hpp"
#include "mvsvm/types.hpp"

namespace mvsvm {

enum class Reg { L1, L2 };

std::string reg_name(Reg reg);
Reg reg_from_name(const std::string& name);

struct TrainOptions {
  Reg reg = Reg::L2;
  double C = 1e-5;
  double tol = 1e-4;
  int max_iter = 1000;
  uint64_t seed = 0;
};

// A trained linear classifier. Binary problems keep a single weight
// vector whose positive side is classes[1]; multiclass trains
// one-vs-rest with one weight vector and bias per class. The bias is
// realized as a regularized constant feature during training.
class LinearModel {
public:
  const std::vector<std::string>& classes() const { return classes_; }
  int32_t dim() const { return dim_; }
  Reg reg() const { return reg_; }
  double C() const { return C_; }
  bool converged() const { return converged_; }
  size_t n_problems() const { return weights_.size(); }
  const std::vector<double>& weights(size_t problem = 0) const {
    return weights_[problem];
  }
  double bias(size_t problem = 0) const { return bias_[problem]; }

  // Objective values recorded after each outer pass of the solver, one
  // trace per binary subproblem.
  const std::vector<std::vector<double>>& objective_trace() const {
    return objective_trace_;
  }

  // w.x + b per binary subproblem (length 1 for binary models).
  std::vector<double> decision_values(const SparseVector& x) const;

  // Argmax decision; ties resolve to the lexicographically smallest
  // class (classes are stored sorted).
  const std::string& predict(const SparseVector& x) const;

  void save(const std::string& path) const;
  static LinearModel load(const std::string& path);

  friend LinearModel train(std::span<const SparseVector> X,
                           std::span<const std::string> y,
                           const TrainOptions& opts);

private:
  std::vector<std::string> classes_;
  int32_t dim_ = 0;
  Reg reg_ = Reg::L2;
  double C_ = 1.0;
  bool converged_ = true;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  std::vector<std::vector<double>> objective_trace_;
};

// Trains with dual coordinate descent on the hinge loss for L2
// regularization, or primal coordinate descent on the squared hinge
// for L1 regularization. Deterministic for a fixed seed.
LinearModel train(std::span<const SparseVector> X,
                  std::span<const std::string> y, const TrainOptions& opts);

// Sigmoid map from decision values to probabilities,
// P(pos | d) = 1 / (1 + exp(a*d + b)), one (a, b) pair per binary
// subproblem. Outputs are clamped to the open interval (0, 1).
class PlattCalibrator {
public:
  PlattCalibrator() = default;
  explicit PlattCalibrator(std::vector<std::pair<double, double>> ab);

  size_t n_problems() const { return ab_.size(); }
  double a(size_t problem = 0) const { return ab_[problem].first; }
  double b(size_t problem = 0) const { return ab_[problem].second; }

  double transform(double decision, size_t problem = 0) const;

  void save(const std::string& path) const;
  static PlattCalibrator load(const std::string& path);

private:
  std::vector<std::pair<double, double>> ab_;
};

// Fits one sigmoid by regularized maximum likelihood (Newton with
// backtracking, prior-adjusted targets). labels are 0/1. Degenerate
// inputs with constant decisions yield a = 0 and b at the adjusted
// prior log-odds.
std::pair<double, double> fit_platt(std::span<const double> decisions,
                                    std::span<const int> labels,
                                    int max_iter = 100);

// Calibrator for every subproblem of a trained model, fit on the given
// decision rows (decisions[i] = model.decision_values(x_i) or an
// out-of-fold equivalent).
PlattCalibrator fit_platt_for_model(
    const LinearModel& model, const std::vector<std::vector<double>>& decisions,
    std::span<const std::string> labels);

// Calibrated class probabilities, summing to one. Binary models return
// (1-p, p); multiclass renormalizes the per-class sigmoid outputs.
std::vector<double> predict_proba(const LinearModel& model,
                                  const PlattCalibrator& calib,
                                  const SparseVector& x);

}  // namespace mvsvm
