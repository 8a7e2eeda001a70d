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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shiftcert/adversary.h"
#include "shiftcert/certifier.h"
#include "shiftcert/classifier.h"
#include "shiftcert/dataset.h"
#include "shiftcert/error.h"
#include "shiftcert/io.h"
#include "shiftcert/psi.h"
#include "shiftcert/random.h"
#include "shiftcert/smoothing.h"
#include "shiftcert/unlearnable.h"

namespace shiftcert {
namespace {

using nlohmann::json;

// Raised while validating options, before any work is done.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Row(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + "\n";
}

// Every option of `sub` with its effective value. The thread count is left
// out because it cannot change results.
json EffectiveConfig(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help" || name == "threads") continue;
    const auto& res = o->results();
    if (res.empty()) {
      j[name] = o->get_default_str();
    } else if (res.size() == 1) {
      j[name] = res[0];
    } else {
      j[name] = res;
    }
  }
  return j;
}

void WriteWithSidecar(const std::string& path, const std::string& body,
                      const json& meta) {
  AtomicWriteFile(path, body);
  AtomicWriteFile(path + ".json", meta.dump(2) + "\n");
}

struct Common {
  std::uint64_t seed = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--threads", c.threads, "Worker threads");
}

void CheckCommon(const Common& c) {
  if (c.threads < 1) throw ConfigError("--threads must be >= 1");
}

struct SmoothingOpts {
  std::string name;
  double scale = 0.5;
  std::string psi;
};

void AddSmoothing(CLI::App* sub, SmoothingOpts& s, const std::string& dflt) {
  s.name = dflt;
  sub->add_option("--smoothing", s.name,
                  "gaussian-cs|gaussian-hue|uniform-sv|uniform-hue|"
                  "channel-select|pixel-gaussian");
  sub->add_option("--scale", s.scale, "Smoothing sigma or a");
  // Present only to give a clear error: psi always follows the smoothing.
  sub->add_option("--psi", s.psi, "Rejected; psi is paired automatically");
}

std::optional<SmoothingSpec> ParseSpec(const SmoothingOpts& s) {
  if (!s.psi.empty()) {
    throw ConfigError("--psi is not configurable; it is paired with --smoothing");
  }
  if (s.name.empty() || s.name == "none") return std::nullopt;
  try {
    SmoothingSpec spec = SmoothingSpec::FromName(s.name, s.scale);
    spec.Validate();
    return spec;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

SmoothingSpec RequireSpec(const SmoothingOpts& s) {
  auto spec = ParseSpec(s);
  if (!spec) throw ConfigError("--smoothing is required");
  return *spec;
}

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("--alpha must lie in (0, 1)");
  }
}

void CheckNonNegative(const std::vector<double>& v, const char* flag) {
  if (v.empty()) throw ConfigError(std::string(flag) + " needs values");
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError(std::string(flag) + " values must be >= 0");
    }
  }
}

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> validate;
  std::function<int()> run;
};

// ---------------------------------------------------------------------------

Command AddGenData(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::size_t n = 2000;
    int classes = 4;
    int size = 8;
    std::string cifar;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand("gen-data", "Generate or ingest a dataset");
  c.app->add_option("--n", o->n, "Number of samples");
  c.app->add_option("--classes", o->classes, "Number of classes");
  c.app->add_option("--size", o->size, "Image side length");
  c.app->add_option("--cifar", o->cifar,
                    "Ingest a CIFAR-10 binary batch instead of generating");
  c.app->add_option("--out", o->out, "Output dataset path")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    if (o->cifar.empty() &&
        (o->classes < 2 || o->n < static_cast<std::size_t>(o->classes) ||
         o->size < 2)) {
      throw ConfigError("need n >= classes >= 2 and size >= 2");
    }
  };
  c.run = [o, app = c.app, &out] {
    Dataset ds = o->cifar.empty()
                     ? GenerateSynthetic(o->n, o->classes, o->size,
                                         o->common.seed)
                     : ReadCifar10Binary(o->cifar);
    ds.manifest["run"] = RunManifest(o->common.seed, EffectiveConfig(*app));
    WriteDataset(ds, o->out);
    out << "wrote " << ds.size() << " samples to " << o->out << "\n";
    return kExitOk;
  };
  return c;
}

Command AddTrain(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::string data;
    std::string kind = "logistic";
    TrainConfig config;
    SmoothingOpts noise;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand("train", "Train a built-in classifier");
  c.app->add_option("--data", o->data, "Training dataset")->required();
  c.app->add_option("--kind", o->kind, "logistic | nearest_centroid");
  c.app->add_option("--epochs", o->config.epochs);
  c.app->add_option("--lr", o->config.learning_rate);
  c.app->add_option("--batch", o->config.batch_size);
  AddSmoothing(c.app, o->noise, "none");
  c.app->add_option("--out", o->out, "Output model JSON")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    o->config.noise = ParseSpec(o->noise);
    o->config.seed = o->common.seed;
    try {
      ParseClassifierKind(o->kind);
      o->config.Validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  };
  c.run = [o, app = c.app, &out] {
    const Dataset ds = ReadDataset(o->data);
    auto model = Train(ds, o->config, ParseClassifierKind(o->kind));
    json j = model->ToJson();
    j["manifest"] = RunManifest(o->common.seed, EffectiveConfig(*app));
    AtomicWriteFile(o->out, j.dump() + "\n");
    out << "training accuracy " << Accuracy(*model, ds) << "\n";
    return kExitOk;
  };
  return c;
}

Command AddCertify(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::string data;
    std::string model;
    SmoothingOpts smoothing;
    double alpha = kDefaultAlpha;
    std::size_t grid_points = 64;
    std::string out;
    SmoothingSpec spec;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand("certify", "Certified accuracy curve");
  c.app->add_option("--data", o->data, "Evaluation dataset")->required();
  c.app->add_option("--model", o->model, "Model JSON")->required();
  AddSmoothing(c.app, o->smoothing, "gaussian-cs");
  c.app->add_option("--alpha", o->alpha, "Confidence level");
  c.app->add_option("--grid-points", o->grid_points, "Epsilon grid size");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    CheckAlpha(o->alpha);
    o->spec = RequireSpec(o->smoothing);
    if (o->grid_points < 2) throw ConfigError("--grid-points must be >= 2");
  };
  c.run = [o, app = c.app, &out] {
    const Dataset ds = ReadDataset(o->data);
    const auto model = LoadClassifier(o->model);
    const auto records = EvaluateSmoothed(ds, *model, o->spec,
                                          SeedPolicy{o->common.seed},
                                          o->common.threads);
    const PsiFn psi = PairPsi(o->spec);
    CertificateCurve curve =
        Certify(records, psi, o->alpha, DefaultEpsilonGrid(psi, o->grid_points));
    const json manifest = RunManifest(o->common.seed, EffectiveConfig(*app));
    curve.smoothing = o->spec.ToJson();
    curve.manifest_hash = ManifestHash(manifest);
    json meta = curve.Metadata();
    meta["manifest"] = manifest;
    WriteWithSidecar(o->out, curve.ToCsv(), meta);
    out << "p_lower " << curve.p_lower << " (n=" << curve.n << ", "
        << BoundKindName(curve.bound_kind) << ")\n";
    return kExitOk;
  };
  return c;
}

Command AddShiftEval(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::string data;
    std::string model;
    SmoothingOpts smoothing;
    std::vector<double> eps{0.25, 0.5, 1.0};
    double alpha = kDefaultAlpha;
    std::string out;
    SmoothingSpec spec;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand(
      "shift-eval", "Evaluate transform shifts against the certificate");
  c.app->add_option("--data", o->data, "Clean dataset")->required();
  c.app->add_option("--model", o->model, "Model JSON")->required();
  AddSmoothing(c.app, o->smoothing, "gaussian-cs");
  c.app->add_option("--eps", o->eps, "Mean shift sizes")->delimiter(',');
  c.app->add_option("--alpha", o->alpha, "Confidence level");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    CheckAlpha(o->alpha);
    CheckNonNegative(o->eps, "--eps");
    o->spec = RequireSpec(o->smoothing);
    if (o->spec.transform == TransformKind::kVectorTranslate) {
      throw ConfigError("shift-eval needs a transform-space smoothing");
    }
  };
  c.run = [o, app = c.app, &out] {
    const Dataset ds = ReadDataset(o->data);
    const auto model = LoadClassifier(o->model);
    const PsiFn psi = PairPsi(o->spec);
    const SeedPolicy seeds{o->common.seed};
    const auto clean = EvaluateSmoothed(ds, *model, o->spec, seeds,
                                        o->common.threads);
    const CertificateCurve curve = Certify(clean, psi, o->alpha, {});
    std::string csv = Row({"epsilon", "wasserstein_bound", "clean_accuracy",
                           "shifted_accuracy", "gap", "psi", "slack",
                           "certified", "pass"});
    json checks = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < o->eps.size(); ++i) {
      const std::uint64_t shift_seed =
          Mix64(o->common.seed ^ (0x5817f7ULL + i));
      const ShiftedData shifted =
          BuildTransformShift(ds, o->spec.transform, o->eps[i], shift_seed);
      const auto pairs = MakeShiftPairs(ds, shifted.data, shifted.distances);
      const double w = WassersteinUpperBound(pairs);
      const auto recs = EvaluateSmoothed(shifted.data, *model, o->spec,
                                         SeedPolicy{Mix64(shift_seed)},
                                         o->common.threads);
      const GapReport gap = GapCheck(clean, recs, psi, w);
      all_pass = all_pass && gap.pass;
      csv += Row({Num(o->eps[i]), Num(w), Num(gap.clean_mean),
                  Num(gap.shifted_mean), Num(gap.gap), Num(gap.psi),
                  Num(gap.slack), Num(curve.At(w)), gap.pass ? "1" : "0"});
      json g = gap.ToJson();
      g["epsilon"] = o->eps[i];
      g["wasserstein_bound"] = w;
      checks.push_back(g);
    }
    json meta = {{"manifest", RunManifest(o->common.seed, EffectiveConfig(*app))},
                 {"certificate", curve.Metadata()},
                 {"checks", checks}};
    WriteWithSidecar(o->out, csv, meta);
    out << (all_pass ? "all gap checks passed\n" : "gap check FAILED\n");
    return all_pass ? kExitOk : kExitCheckFailed;
  };
  return c;
}

Command AddAttack(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::string data;
    std::string model;
    std::string kind = "strategic";
    SmoothingOpts smoothing;
    std::vector<double> gammas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5,
                               2.0};
    AttackBudget budget;
    double alpha = kDefaultAlpha;
    std::string out;
    std::optional<SmoothingSpec> spec;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand("attack", "Distributional l2 attack sweep");
  c.app->add_option("--data", o->data, "Clean dataset")->required();
  c.app->add_option("--model", o->model, "Logistic model JSON")->required();
  c.app->add_option("--kind", o->kind, "strategic | adaptive");
  AddSmoothing(c.app, o->smoothing, "none");
  c.app->add_option("--gammas", o->gammas, "Thresholds")->delimiter(',');
  c.app->add_option("--steps", o->budget.steps, "PGD steps");
  c.app->add_option("--gradient-draws", o->budget.gradient_draws);
  c.app->add_option("--selection-draws", o->budget.selection_draws);
  c.app->add_option("--evaluation-draws", o->budget.evaluation_draws);
  c.app->add_option("--alpha", o->alpha, "Confidence level");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    CheckAlpha(o->alpha);
    CheckNonNegative(o->gammas, "--gammas");
    o->spec = ParseSpec(o->smoothing);
    if (o->kind != "strategic" && o->kind != "adaptive") {
      throw ConfigError("--kind must be strategic or adaptive");
    }
    if (o->kind == "adaptive" &&
        (!o->spec || o->spec->kind != SmoothingKind::kPixelGaussian)) {
      throw ConfigError("adaptive attacks need --smoothing pixel-gaussian");
    }
    try {
      o->budget.Validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  };
  c.run = [o, app = c.app, &out] {
    const Dataset ds = ReadDataset(o->data);
    const auto model = LoadClassifier(o->model);
    const SeedPolicy seeds{o->common.seed};
    json meta = {{"manifest", RunManifest(o->common.seed, EffectiveConfig(*app))},
                 {"budget", o->budget.ToJson()}};
    std::optional<CertificateCurve> curve;
    if (o->spec) {
      const auto clean = EvaluateSmoothed(ds, *model, *o->spec, seeds,
                                          o->common.threads);
      curve = Certify(clean, PairPsi(*o->spec), o->alpha, {});
      meta["certificate"] = curve->Metadata();
    }
    std::optional<AdaptiveTable> table;
    if (o->kind == "adaptive") {
      const auto* logistic = dynamic_cast<const LogisticModel*>(model.get());
      if (logistic == nullptr) {
        throw Error(ErrorCode::kUnsupportedKind,
                    "adaptive attacks need a logistic model");
      }
      table = PrepareAdaptiveAttack(ds, *logistic, *o->spec, o->budget, seeds,
                                    o->common.threads);
    }
    std::string csv =
        Row({"gamma", "wasserstein_bound", "accuracy", "attacked_fraction"});
    json rows = json::array();
    for (double gamma : o->gammas) {
      AttackOutcome res = table ? SelectAdaptiveAttack(*table, gamma)
                                : StrategicAttack(ds, *model, gamma,
                                                  o->common.threads);
      double accuracy = res.accuracy;
      if (!table && o->spec) {
        accuracy = MeanScore(EvaluateSmoothed(res.shifted, *model, *o->spec,
                                              SeedPolicy{Mix64(o->common.seed)},
                                              o->common.threads));
      }
      csv += Row({Num(gamma), Num(res.wasserstein_bound), Num(accuracy),
                  Num(res.attacked_fraction)});
      json r = {{"gamma", gamma},
                {"wasserstein_bound", res.wasserstein_bound},
                {"accuracy", accuracy}};
      if (curve) r["certified"] = curve->At(res.wasserstein_bound);
      rows.push_back(r);
    }
    meta["rows"] = rows;
    WriteWithSidecar(o->out, csv, meta);
    out << "wrote " << o->gammas.size() << " rows to " << o->out << "\n";
    return kExitOk;
  };
  return c;
}

Command AddPoison(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    std::string data;
    std::vector<double> eps{0.5, 1.0};
    SmoothingOpts smoothing;
    PoisonConfig poison;
    TrainConfig victim;
    std::vector<std::size_t> splits{2000, 2000, 1000, 1000};
    bool adaptive = false;
    double alpha = kDefaultAlpha;
    std::string out;
    std::optional<SmoothingSpec> spec;
  };
  auto o = std::make_shared<Opts>();
  o->victim.epochs = 30;
  Command c;
  c.app = root.add_subcommand("poison", "Unlearnability experiment sweep");
  c.app->add_option("--data", o->data, "Dataset to split")->required();
  c.app->add_option("--eps", o->eps, "l2 poisoning radii")->delimiter(',');
  AddSmoothing(c.app, o->smoothing, "none");
  c.app->add_option("--splits", o->splits, "proxy,train,val,test sizes")
      ->delimiter(',')
      ->expected(4);
  c.app->add_option("--outer-cap", o->poison.outer_cap, "Proxy outer steps");
  c.app->add_option("--steps", o->poison.steps, "Inner descent steps");
  c.app->add_option("--victim-epochs", o->victim.epochs);
  c.app->add_option("--victim-lr", o->victim.learning_rate);
  c.app->add_flag("--adaptive", o->adaptive,
                  "Poison against the smoothed proxy loss");
  c.app->add_option("--alpha", o->alpha, "Confidence level");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    CheckAlpha(o->alpha);
    CheckNonNegative(o->eps, "--eps");
    o->spec = ParseSpec(o->smoothing);
    if (o->spec && o->spec->kind != SmoothingKind::kPixelGaussian) {
      throw ConfigError("poison supports --smoothing pixel-gaussian only");
    }
    if (o->adaptive && !o->spec) {
      throw ConfigError("--adaptive needs --smoothing");
    }
    o->poison.proxy_size = o->splits[0];
    o->poison.train_size = o->splits[1];
    o->poison.val_size = o->splits[2];
    o->poison.test_size = o->splits[3];
    o->poison.seed = o->common.seed;
    o->poison.threads = o->common.threads;
    if (o->adaptive) o->poison.adaptive_spec = o->spec;
    o->victim.seed = o->common.seed;
    try {
      o->poison.Validate();
      o->victim.Validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  };
  c.run = [o, app = c.app, &out] {
    const Dataset ds = ReadDataset(o->data);
    std::string csv = Row({"l2_radius", "train_accuracy", "val_accuracy",
                           "test_accuracy", "val_lower", "psi",
                           "certified_bound"});
    json reports = json::array();
    for (double eps : o->eps) {
      PoisonConfig cfg = o->poison;
      cfg.l2_radius = eps;
      const PoisonReport r =
          RunUnlearnabilityExperiment(ds, cfg, o->victim, o->spec, o->alpha);
      csv += Row({Num(eps), Num(r.train_accuracy), Num(r.val_accuracy),
                  Num(r.test_accuracy), Num(r.val_lower), Num(r.psi),
                  Num(r.certified_bound)});
      reports.push_back(r.ToJson());
    }
    json meta = {{"manifest", RunManifest(o->common.seed, EffectiveConfig(*app))},
                 {"reports", reports}};
    WriteWithSidecar(o->out, csv, meta);
    out << "wrote " << reports.size() << " reports to " << o->out << "\n";
    return kExitOk;
  };
  return c;
}

// Random parameter of the spec's transform family, reaching a few smoothing
// scales so psi is exercised both below and at saturation.
ParamVector RandomTheta(const SmoothingSpec& spec, Rng& rng) {
  const double reach = spec.scale > 0.0 ? spec.scale : 1.0;
  switch (spec.transform) {
    case TransformKind::kHueShift:
      return {spec.transform,
              {rng.Uniform(-std::numbers::pi, std::numbers::pi)}};
    case TransformKind::kSvShift:
      return {spec.transform,
              {rng.Uniform(0.0, 1.5 * reach), rng.Uniform(0.0, 1.5 * reach)}};
    case TransformKind::kColorShift:
    case TransformKind::kVectorTranslate: {
      const std::size_t dim =
          spec.transform == TransformKind::kColorShift ? 3 : 12;
      std::vector<double> v(dim);
      for (double& x : v) x = rng.Normal(0.0, 2.0 * reach);
      return {spec.transform, v};
    }
  }
  return {};
}

Command AddTvCheck(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    SmoothingOpts smoothing;
    int trials = 200;
    std::size_t samples = 100000;
    std::string out;
    SmoothingSpec spec;
  };
  auto o = std::make_shared<Opts>();
  o->smoothing.scale = 1.0;
  Command c;
  c.app = root.add_subcommand("tv-check",
                              "Check total variation against psi");
  AddSmoothing(c.app, o->smoothing, "gaussian-cs");
  c.app->add_option("--trials", o->trials, "Random parameters");
  c.app->add_option("--samples", o->samples, "Monte-Carlo draws per trial");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    o->spec = RequireSpec(o->smoothing);
    if (o->trials < 1 || o->samples < 2) {
      throw ConfigError("--trials and --samples must be positive");
    }
  };
  c.run = [o, app = c.app, &out] {
    const PsiFn psi = PairPsi(o->spec);
    const SeedPolicy seeds{o->common.seed};
    std::string csv = Row({"distance", "tv_exact", "tv_mc", "mc_stderr", "psi",
                           "pass"});
    int failures = 0;
    for (int t = 0; t < o->trials; ++t) {
      Rng rng(seeds.ForSample(static_cast<std::uint64_t>(t), SeedStream::kShift));
      const ParamVector theta = RandomTheta(o->spec, rng);
      const TvEstimate tv = TvOracle(
          o->spec, theta, o->samples,
          seeds.ForSample(static_cast<std::uint64_t>(t), SeedStream::kOracle));
      const double d = TransformDistance(theta);
      const double bound = psi(d);
      const bool pass = TvWithinPsi(tv, bound);
      failures += pass ? 0 : 1;
      csv += Row({Num(d), Num(tv.exact), Num(tv.mc), Num(tv.mc_stderr),
                  Num(bound), pass ? "1" : "0"});
    }
    json meta = {{"manifest", RunManifest(o->common.seed, EffectiveConfig(*app))},
                 {"psi", psi.ToJson()},
                 {"failures", failures}};
    WriteWithSidecar(o->out, csv, meta);
    out << failures << " of " << o->trials << " rows exceed psi\n";
    return failures == 0 ? kExitOk : kExitCheckFailed;
  };
  return c;
}

// A parameter of norm eps along the first axis of the spec's transform.
ParamVector AxisTheta(const SmoothingSpec& spec, double eps) {
  const std::size_t dim =
      spec.transform == TransformKind::kVectorTranslate
          ? 12
          : ParamLength(spec.transform);
  std::vector<double> v(dim, 0.0);
  v[0] = eps;
  return {spec.transform, v};
}

Command AddPsiTable(CLI::App& root, std::ostream& out) {
  struct Opts {
    Common common;
    SmoothingOpts smoothing;
    std::vector<double> eps;
    std::size_t points = 64;
    std::size_t samples = 20000;
    std::string out;
    SmoothingSpec spec;
  };
  auto o = std::make_shared<Opts>();
  Command c;
  c.app = root.add_subcommand("psi-table",
                              "Tabulate psi next to the TV oracle");
  AddSmoothing(c.app, o->smoothing, "gaussian-cs");
  c.app->add_option("--eps", o->eps, "Explicit radii")->delimiter(',');
  c.app->add_option("--points", o->points, "Default grid size");
  c.app->add_option("--samples", o->samples, "Monte-Carlo draws per row");
  c.app->add_option("--out", o->out, "Output CSV")->required();
  AddCommon(c.app, o->common);
  c.validate = [o] {
    CheckCommon(o->common);
    o->spec = RequireSpec(o->smoothing);
    if (!o->eps.empty()) CheckNonNegative(o->eps, "--eps");
    if (o->points < 2) throw ConfigError("--points must be >= 2");
    if (o->samples < 2) throw ConfigError("--samples must be >= 2");
  };
  c.run = [o, app = c.app, &out] {
    const PsiFn psi = PairPsi(o->spec);
    const auto grid =
        o->eps.empty() ? DefaultEpsilonGrid(psi, o->points) : o->eps;
    const SeedPolicy seeds{o->common.seed};
    std::string csv =
        Row({"epsilon", "psi", "tv_exact", "tv_mc", "tv_mc_stderr"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const TvEstimate tv =
          TvOracle(o->spec, AxisTheta(o->spec, grid[i]), o->samples,
                   seeds.ForSample(i, SeedStream::kOracle));
      csv += Row({Num(grid[i]), Num(psi(grid[i])), Num(tv.exact), Num(tv.mc),
                  Num(tv.mc_stderr)});
    }
    json meta = {{"manifest", RunManifest(o->common.seed, EffectiveConfig(*app))},
                 {"psi", psi.ToJson()}};
    WriteWithSidecar(o->out, csv, meta);
    out << psi.Describe() << "\n";
    return kExitOk;
  };
  return c;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Certified accuracy under Wasserstein distribution shifts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key/value config file; flags take precedence");
  // Lets --config appear after the subcommand name as well.
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kToolVersion));

  std::vector<Command> commands;
  commands.push_back(AddGenData(app, out));
  commands.push_back(AddTrain(app, out));
  commands.push_back(AddCertify(app, out));
  commands.push_back(AddShiftEval(app, out));
  commands.push_back(AddAttack(app, out));
  commands.push_back(AddPoison(app, out));
  commands.push_back(AddTvCheck(app, out));
  commands.push_back(AddPsiTable(app, out));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.validate();
    } catch (const std::exception& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    try {
      return c.run();
    } catch (const Error& e) {
      err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
      return kExitRuntime;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitConfig;
}

}  // namespace shiftcert
