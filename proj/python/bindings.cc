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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "json.hpp"
#include "shiftcert/certifier.h"
#include "shiftcert/classifier.h"
#include "shiftcert/dataset.h"
#include "shiftcert/error.h"
#include "shiftcert/image.h"
#include "shiftcert/psi.h"
#include "shiftcert/smoothing.h"
#include "shiftcert/statbounds.h"
#include "shiftcert/transforms.h"

namespace py = pybind11;
using namespace shiftcert;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Image ToImage(const FloatArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw py::value_error("expected an (H, W, 3) array");
  }
  std::vector<float> px(a.data(), a.data() + a.size());
  Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
            std::move(px));
  img.Validate();
  return img;
}

py::array_t<float> ToArray(const PixelBuffer& img) {
  py::array_t<float> out({img.height(), img.width(), 3});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

py::object ToPython(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Certified accuracy under Wasserstein distribution shifts";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(e.what());
    }
  });

  m.def("max_normalize", [](const FloatArray& a) {
    return ToArray(MaxNormalize(ToImage(a)));
  });
  m.def("color_shift", [](const FloatArray& a, std::array<double, 3> theta) {
    return ToArray(ColorShift(ToImage(a), theta));
  });
  m.def("hue_shift", [](const FloatArray& a, double theta) {
    return ToArray(HueShift(ToImage(a), theta));
  });
  m.def("sv_shift", [](const FloatArray& a, std::array<double, 2> theta) {
    return ToArray(SvShift(ToImage(a), theta));
  });
  m.def("rgb_to_hsv", [](const FloatArray& a) {
    return ToArray(RgbToHsv(ToImage(a)));
  });
  m.def("hsv_to_rgb", [](const FloatArray& a) {
    std::vector<float> px(a.data(), a.data() + a.size());
    HsvImage hsv(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                 std::move(px));
    hsv.Validate();
    return ToArray(HsvToRgb(hsv));
  });

  m.def("psi", [](const std::string& smoothing, double scale, double eps) {
    return PairPsi(SmoothingSpec::FromName(smoothing, scale))(eps);
  }, py::arg("smoothing"), py::arg("scale"), py::arg("eps"));
  m.def("tv_oracle",
        [](const std::string& smoothing, double scale,
           std::vector<double> theta, std::size_t samples, std::uint64_t seed) {
          const SmoothingSpec spec = SmoothingSpec::FromName(smoothing, scale);
          const TvEstimate tv =
              TvOracle(spec, {spec.transform, std::move(theta)}, samples, seed);
          return py::make_tuple(tv.exact, tv.mc, tv.mc_stderr);
        },
        py::arg("smoothing"), py::arg("scale"), py::arg("theta"),
        py::arg("samples") = 100000, py::arg("seed") = 0);

  m.def("clopper_pearson_lower", &ClopperPearsonLower, py::arg("k"),
        py::arg("n"), py::arg("alpha"));
  m.def("hoeffding_lower", &HoeffdingLower, py::arg("mean"), py::arg("n"),
        py::arg("alpha"));

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("size", &Dataset::size)
      .def_readonly("num_classes", &Dataset::num_classes)
      .def("__len__", &Dataset::size)
      .def("image", [](const Dataset& d, std::size_t i) {
        return ToArray(d.samples.at(i).image);
      })
      .def("label", [](const Dataset& d, std::size_t i) {
        return d.samples.at(i).label;
      })
      .def("labels", [](const Dataset& d) {
        std::vector<int> out;
        for (const auto& s : d.samples) out.push_back(s.label);
        return out;
      })
      .def("save", [](const Dataset& d, const std::string& path) {
        WriteDataset(d, path);
      });
  m.def("generate_synthetic", &GenerateSynthetic, py::arg("n"),
        py::arg("classes"), py::arg("size"), py::arg("seed"));
  m.def("read_dataset", &ReadDataset);

  py::class_<Classifier>(m, "Classifier")
      .def("score", [](const Classifier& c, const FloatArray& a, int label) {
        return c.Score(ToImage(a), label);
      })
      .def("to_json", [](const Classifier& c) { return ToPython(c.ToJson()); })
      .def("save", [](const Classifier& c, const std::string& path) {
        SaveClassifier(c, path);
      });
  m.def("train",
        [](const Dataset& d, const std::string& kind, int epochs, double lr,
           int batch, const std::string& noise, double noise_scale,
           std::uint64_t seed) {
          TrainConfig cfg;
          cfg.epochs = epochs;
          cfg.learning_rate = lr;
          cfg.batch_size = batch;
          cfg.seed = seed;
          if (!noise.empty()) cfg.noise = SmoothingSpec::FromName(noise, noise_scale);
          return Train(d, cfg, ParseClassifierKind(kind));
        },
        py::arg("dataset"), py::arg("kind") = "logistic",
        py::arg("epochs") = 20, py::arg("lr") = 0.5, py::arg("batch") = 64,
        py::arg("noise") = "", py::arg("noise_scale") = 0.0,
        py::arg("seed") = 0);
  m.def("load_classifier", &LoadClassifier);

  m.def("certify",
        [](const Dataset& d, const Classifier& c, const std::string& smoothing,
           double scale, double alpha, std::uint64_t seed, int threads) {
          const SmoothingSpec spec = SmoothingSpec::FromName(smoothing, scale);
          const auto records =
              EvaluateSmoothed(d, c, spec, SeedPolicy{seed}, threads);
          const PsiFn psi = PairPsi(spec);
          CertificateCurve curve =
              Certify(records, psi, alpha, DefaultEpsilonGrid(psi));
          curve.smoothing = spec.ToJson();
          py::dict out = ToPython(curve.Metadata());
          out["epsilons"] = curve.epsilons;
          out["lower_bounds"] = curve.lower_bounds;
          return out;
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("smoothing"),
        py::arg("scale"), py::arg("alpha") = kDefaultAlpha,
        py::arg("seed") = 0, py::arg("threads") = 1);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "shiftcert");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
