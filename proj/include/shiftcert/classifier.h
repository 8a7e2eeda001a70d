// Copyright 2026 The shiftcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHIFTCERT_CLASSIFIER_H_
#define SHIFTCERT_CLASSIFIER_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftcert/dataset.h"
#include "shiftcert/image.h"
#include "shiftcert/smoothing.h"

namespace shiftcert {

// Scoring interface h(x, y) in [0, 1]. Built-in models return the 0/1
// correctness indicator; argmax ties go to the lowest class index so h is
// defined everywhere.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int num_classes() const = 0;
  virtual double Score(const Image& img, int label) const = 0;
  virtual nlohmann::json ToJson() const = 0;
};

class NearestCentroid final : public Classifier {
 public:
  // centroids: one flattened H*W*3 mean image per class.
  NearestCentroid(std::vector<std::vector<double>> centroids);

  int num_classes() const override {
    return static_cast<int>(centroids_.size());
  }
  double Score(const Image& img, int label) const override;
  nlohmann::json ToJson() const override;

  int Predict(const Image& img) const;
  const std::vector<std::vector<double>>& centroids() const {
    return centroids_;
  }

 private:
  std::vector<std::vector<double>> centroids_;
};

struct LossAndGradient {
  std::vector<double> logits;
  double loss = 0.0;
  // d loss / d x, laid out like the flattened image.
  std::vector<double> gradient;
};

// Multinomial logistic regression: logits = W x + b with W of shape
// classes x features (row-major).
class LogisticModel final : public Classifier {
 public:
  LogisticModel(int num_classes, std::size_t features);
  LogisticModel(int num_classes, std::size_t features,
                std::vector<double> weights, std::vector<double> bias);

  int num_classes() const override { return num_classes_; }
  double Score(const Image& img, int label) const override;
  nlohmann::json ToJson() const override;

  std::size_t features() const { return features_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> mutable_bias() { return bias_; }

  std::vector<double> Logits(std::span<const double> x) const;
  int Predict(std::span<const double> x) const;
  int Predict(const Image& img) const;
  // Softmax cross-entropy and its gradient W^T (softmax - onehot).
  LossAndGradient LogitsAndGrad(std::span<const double> x, int label) const;
  LossAndGradient LogitsAndGrad(const Image& img, int label) const;
  double Loss(std::span<const double> x, int label) const;

  // One averaged gradient step on the cross-entropy over a batch.
  void GradientStep(std::span<const std::vector<double>> inputs,
                    std::span<const int> labels, double learning_rate);

 private:
  void CheckInput(std::size_t size) const;

  int num_classes_;
  std::size_t features_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Requires a LogisticModel; throws Error(kUnsupportedKind) otherwise.
LossAndGradient LogitsAndGrad(const Classifier& handle, const Image& img,
                              int label);

// Forwards to another classifier and counts invocations.
class CountingClassifier final : public Classifier {
 public:
  explicit CountingClassifier(const Classifier& inner) : inner_(inner) {}

  int num_classes() const override { return inner_.num_classes(); }
  double Score(const Image& img, int label) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.Score(img, label);
  }
  nlohmann::json ToJson() const override { return inner_.ToJson(); }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  const Classifier& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

enum class ClassifierKind { kNearestCentroid, kLogistic };

ClassifierKind ParseClassifierKind(const std::string& name);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.5;
  int batch_size = 64;
  // When set, every training input is independently randomized each epoch.
  std::optional<SmoothingSpec> noise;
  std::uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
};

std::vector<double> ToFeatures(const Image& img);

// Throws Error(kDegenerateClass) if some class has no samples.
LogisticModel TrainLogistic(const Dataset& data, const TrainConfig& config);
NearestCentroid TrainNearestCentroid(const Dataset& data,
                                     const TrainConfig& config);
std::unique_ptr<Classifier> Train(const Dataset& data,
                                  const TrainConfig& config,
                                  ClassifierKind kind);

// Fraction of samples scored correct, without smoothing.
double Accuracy(const Classifier& model, const Dataset& data);

// JSON model files. "external" entries start the scorer subprocess.
void SaveClassifier(const Classifier& model, const std::string& path);
std::unique_ptr<Classifier> ClassifierFromJson(const nlohmann::json& j);
std::unique_ptr<Classifier> LoadClassifier(const std::string& path);

}  // namespace shiftcert

#endif  // SHIFTCERT_CLASSIFIER_H_
