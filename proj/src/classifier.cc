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

#include "shiftcert/classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shiftcert/error.h"
#include "shiftcert/external_scorer.h"
#include "shiftcert/io.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

void Softmax(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : z) v /= total;
}

double LogSumExp(const std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - mx);
  return mx + std::log(total);
}

void CheckTrainingData(const Dataset& data) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgs, "training set is empty");
  }
  data.Validate();
  std::vector<int> counts(static_cast<std::size_t>(data.num_classes), 0);
  for (const Sample& s : data.samples) ++counts[s.label];
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorCode::kDegenerateClass,
                  "class " + std::to_string(k) + " has no samples");
    }
  }
}

Image TrainingInput(const Sample& s, const TrainConfig& config, int epoch) {
  if (!config.noise) return s.image;
  const SeedPolicy seeds{config.seed};
  return RandomizeInput(s.image, *config.noise,
                        seeds.ForSample(s.id, SeedStream::kTraining,
                                        static_cast<std::uint64_t>(epoch)))
      .image;
}

}  // namespace

std::vector<double> ToFeatures(const Image& img) {
  const auto px = img.pixels();
  return {px.begin(), px.end()};
}

NearestCentroid::NearestCentroid(std::vector<std::vector<double>> centroids)
    : centroids_(std::move(centroids)) {
  if (centroids_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgs, "need at least two classes");
  }
  for (const auto& c : centroids_) {
    if (c.size() != centroids_.front().size()) {
      throw Error(ErrorCode::kShapeMismatch, "centroid sizes differ");
    }
  }
}

int NearestCentroid::Predict(const Image& img) const {
  const auto px = img.pixels();
  if (px.size() != centroids_.front().size()) {
    throw Error(ErrorCode::kShapeMismatch, "image does not match the model");
  }
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids_.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double diff = px[i] - centroids_[k][i];
      d += diff * diff;
    }
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double NearestCentroid::Score(const Image& img, int label) const {
  return Predict(img) == label ? 1.0 : 0.0;
}

nlohmann::json NearestCentroid::ToJson() const {
  return {{"kind", "nearest_centroid"},
          {"classes", num_classes()},
          {"centroids", centroids_}};
}

LogisticModel::LogisticModel(int num_classes, std::size_t features)
    : LogisticModel(num_classes, features,
                    std::vector<double>(
                        static_cast<std::size_t>(num_classes) * features, 0.0),
                    std::vector<double>(static_cast<std::size_t>(num_classes),
                                        0.0)) {}

LogisticModel::LogisticModel(int num_classes, std::size_t features,
                             std::vector<double> weights,
                             std::vector<double> bias)
    : num_classes_(num_classes),
      features_(features),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (num_classes_ < 2 || features_ == 0) {
    throw Error(ErrorCode::kInvalidArgs,
                "logistic model needs >= 2 classes and >= 1 feature");
  }
  if (weights_.size() != static_cast<std::size_t>(num_classes_) * features_ ||
      bias_.size() != static_cast<std::size_t>(num_classes_)) {
    throw Error(ErrorCode::kShapeMismatch, "logistic weight shapes");
  }
}

void LogisticModel::CheckInput(std::size_t size) const {
  if (size != features_) {
    throw Error(ErrorCode::kShapeMismatch,
                "input has " + std::to_string(size) + " features, model " +
                    std::to_string(features_));
  }
}

std::vector<double> LogisticModel::Logits(std::span<const double> x) const {
  CheckInput(x.size());
  std::vector<double> z(bias_.begin(), bias_.end());
  for (int k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + static_cast<std::size_t>(k) * features_;
    z[k] += std::inner_product(x.begin(), x.end(), w, 0.0);
  }
  return z;
}

int LogisticModel::Predict(std::span<const double> x) const {
  const auto z = Logits(x);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

int LogisticModel::Predict(const Image& img) const {
  return Predict(ToFeatures(img));
}

double LogisticModel::Score(const Image& img, int label) const {
  return Predict(img) == label ? 1.0 : 0.0;
}

LossAndGradient LogisticModel::LogitsAndGrad(std::span<const double> x,
                                             int label) const {
  if (label < 0 || label >= num_classes_) {
    throw Error(ErrorCode::kInvalidArgs, "label out of range");
  }
  LossAndGradient out;
  out.logits = Logits(x);
  out.loss = LogSumExp(out.logits) - out.logits[label];
  std::vector<double> p = out.logits;
  Softmax(p);
  p[label] -= 1.0;
  out.gradient.assign(features_, 0.0);
  for (int k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + static_cast<std::size_t>(k) * features_;
    for (std::size_t i = 0; i < features_; ++i) out.gradient[i] += p[k] * w[i];
  }
  return out;
}

LossAndGradient LogisticModel::LogitsAndGrad(const Image& img,
                                             int label) const {
  return LogitsAndGrad(ToFeatures(img), label);
}

double LogisticModel::Loss(std::span<const double> x, int label) const {
  const auto z = Logits(x);
  return LogSumExp(z) - z.at(static_cast<std::size_t>(label));
}

void LogisticModel::GradientStep(std::span<const std::vector<double>> inputs,
                                 std::span<const int> labels,
                                 double learning_rate) {
  if (inputs.empty() || inputs.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgs, "batch inputs and labels differ");
  }
  std::vector<double> grad_w(weights_.size(), 0.0);
  std::vector<double> grad_b(bias_.size(), 0.0);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    std::vector<double> p = Logits(inputs[n]);
    Softmax(p);
    p[labels[n]] -= 1.0;
    for (int k = 0; k < num_classes_; ++k) {
      grad_b[k] += p[k];
      double* g = grad_w.data() + static_cast<std::size_t>(k) * features_;
      for (std::size_t i = 0; i < features_; ++i) g[i] += p[k] * inputs[n][i];
    }
  }
  const double scale = learning_rate / static_cast<double>(inputs.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] -= scale * grad_w[i];
  }
  for (std::size_t k = 0; k < bias_.size(); ++k) bias_[k] -= scale * grad_b[k];
}

nlohmann::json LogisticModel::ToJson() const {
  return {{"kind", "logistic"},
          {"classes", num_classes_},
          {"features", features_},
          {"weights", weights_},
          {"bias", bias_}};
}

LossAndGradient LogitsAndGrad(const Classifier& handle, const Image& img,
                              int label) {
  const auto* logistic = dynamic_cast<const LogisticModel*>(&handle);
  if (logistic == nullptr) {
    throw Error(ErrorCode::kUnsupportedKind,
                "gradients need a logistic model");
  }
  return logistic->LogitsAndGrad(img, label);
}

ClassifierKind ParseClassifierKind(const std::string& name) {
  if (name == "logistic") return ClassifierKind::kLogistic;
  if (name == "centroid" || name == "nearest_centroid") {
    return ClassifierKind::kNearestCentroid;
  }
  throw Error(ErrorCode::kInvalidArgs, "unknown classifier '" + name + "'");
}

void TrainConfig::Validate() const {
  if (epochs <= 0 || batch_size <= 0 || !(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgs,
                "epochs, batch size and learning rate must be positive");
  }
  if (noise) noise->Validate();
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"epochs", epochs},
          {"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"noise", noise ? noise->ToJson() : nlohmann::json(nullptr)},
          {"seed", seed}};
}

LogisticModel TrainLogistic(const Dataset& data, const TrainConfig& config) {
  config.Validate();
  CheckTrainingData(data);
  LogisticModel model(data.num_classes, data.feature_count());
  const SeedPolicy seeds{config.seed};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> batch;
  std::vector<int> labels;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(seeds.ForSample(static_cast<std::uint64_t>(epoch),
                            SeedStream::kTraining));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.UniformInt(i)]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      labels.clear();
      for (std::size_t j = start; j < end; ++j) {
        const Sample& s = data.samples[order[j]];
        batch.push_back(ToFeatures(TrainingInput(s, config, epoch)));
        labels.push_back(s.label);
      }
      model.GradientStep(batch, labels, config.learning_rate);
    }
  }
  return model;
}

NearestCentroid TrainNearestCentroid(const Dataset& data,
                                     const TrainConfig& config) {
  if (config.noise) config.noise->Validate();
  CheckTrainingData(data);
  const std::size_t features = data.feature_count();
  std::vector<std::vector<double>> sums(
      static_cast<std::size_t>(data.num_classes),
      std::vector<double>(features, 0.0));
  std::vector<double> counts(sums.size(), 0.0);
  for (const Sample& s : data.samples) {
    const Image input = TrainingInput(s, config, 0);
    const auto px = input.pixels();
    for (std::size_t i = 0; i < features; ++i) sums[s.label][i] += px[i];
    counts[s.label] += 1.0;
  }
  for (std::size_t k = 0; k < sums.size(); ++k) {
    for (double& v : sums[k]) v /= counts[k];
  }
  return NearestCentroid(std::move(sums));
}

std::unique_ptr<Classifier> Train(const Dataset& data,
                                  const TrainConfig& config,
                                  ClassifierKind kind) {
  if (kind == ClassifierKind::kLogistic) {
    return std::make_unique<LogisticModel>(TrainLogistic(data, config));
  }
  return std::make_unique<NearestCentroid>(TrainNearestCentroid(data, config));
}

double Accuracy(const Classifier& model, const Dataset& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const Sample& s : data.samples) total += model.Score(s.image, s.label);
  return total / static_cast<double>(data.size());
}

void SaveClassifier(const Classifier& model, const std::string& path) {
  AtomicWriteFile(path, model.ToJson().dump() + "\n");
}

std::unique_ptr<Classifier> ClassifierFromJson(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "logistic") {
      return std::make_unique<LogisticModel>(
          j.at("classes").get<int>(), j.at("features").get<std::size_t>(),
          j.at("weights").get<std::vector<double>>(),
          j.at("bias").get<std::vector<double>>());
    }
    if (kind == "nearest_centroid") {
      return std::make_unique<NearestCentroid>(
          j.at("centroids").get<std::vector<std::vector<double>>>());
    }
    if (kind == "external") {
      return std::make_unique<ExternalScorer>(
          j.at("command").get<std::string>(), j.at("classes").get<int>(),
          j.value("instances", 1));
    }
    throw Error(ErrorCode::kUnsupportedKind, "unknown model kind " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, e.what());
  }
}

std::unique_ptr<Classifier> LoadClassifier(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, path + ": " + e.what());
  }
  return ClassifierFromJson(j);
}

}  // namespace shiftcert
