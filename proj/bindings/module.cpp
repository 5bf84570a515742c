#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "umorph/classify.hpp"
#include "umorph/corpus.hpp"
#include "umorph/eval.hpp"
#include "umorph/features.hpp"
#include "umorph/model_io.hpp"
#include "umorph/morphology.hpp"
#include "umorph/ngrams.hpp"
#include "umorph/selftrain.hpp"

namespace py = pybind11;
using namespace umorph;

PYBIND11_MODULE(_core, m) {
  m.doc() = "username morphology and classification core";

  m.def("normalize_case", &normalize_case, py::arg("raw"));
  m.def("decode_markers", &decode_markers, py::arg("encoded"));
  m.def(
      "extract_ngrams",
      [](const std::string& name, int n) {
        return extract_ngrams(name, NgramConfig{n});
      },
      py::arg("name"), py::arg("n"));

  py::class_<MorphModel>(m, "MorphModel")
      .def_readonly("alpha", &MorphModel::alpha)
      .def_readonly("total_tokens", &MorphModel::total_tokens)
      .def_property_readonly(
          "lexicon",
          [](const MorphModel& model) {
            std::map<std::string, long long> out(model.counts.begin(),
                                                 model.counts.end());
            return out;
          })
      .def("segment",
           [](const MorphModel& model, const std::string& name) {
             return viterbi_segment_closed(model, name).morphs;
           })
      .def("segment_cost", [](const MorphModel& model, const std::string& name) {
        return viterbi_segment_closed(model, name).cost;
      });

  m.def(
      "train_morph",
      [](const std::vector<std::string>& names, double alpha, int max_epochs,
         double tol, std::uint64_t seed) {
        MorphTrainOptions opts;
        opts.alpha = alpha;
        opts.max_epochs = max_epochs;
        opts.convergence_tol = tol;
        opts.seed = seed;
        auto result = train_morph(names, opts);
        return py::make_tuple(result.model, result.final_cost,
                              result.epochs_run);
      },
      py::arg("names"), py::arg("alpha") = 1.0, py::arg("max_epochs") = 10,
      py::arg("tol") = 1e-4, py::arg("seed") = 0,
      "Returns (model, final_cost, epochs_run).");

  py::class_<ClassModel>(m, "ClassModel")
      .def_readonly("classes", &ClassModel::classes)
      .def_readonly("beta", &ClassModel::beta)
      .def("smoothed_prob",
           [](const ClassModel& model, const std::string& feature,
              const std::string& cls) {
             return smoothed_prob(model, feature, cls);
           })
      .def("posterior",
           [](const ClassModel& model,
              const std::vector<std::string>& features) {
             return log_posterior(model, features).normalized;
           })
      .def("classify", [](const ClassModel& model,
                          const std::vector<std::string>& features) {
        return classify(model, features);
      });

  m.def(
      "train_classifier",
      [](const std::vector<std::pair<std::string, std::vector<std::string>>>&
             examples,
         std::optional<double> beta) {
        std::vector<Example> converted;
        converted.reserve(examples.size());
        for (const auto& [label, features] : examples)
          converted.push_back({label, features});
        return train_classifier(converted, beta);
      },
      py::arg("examples"), py::arg("beta") = std::nullopt,
      "examples: list of (label, [feature, ...]) pairs.");

  m.def(
      "evaluate",
      [](const std::vector<std::string>& predictions,
         const std::vector<std::string>& golds) {
        auto rep = evaluate(predictions, golds);
        py::dict out;
        out["error"] = rep.error;
        out["micro_f1"] = rep.micro_f1;
        out["macro_f1"] = rep.macro_f1;
        out["macro_precision"] = rep.macro_precision;
        out["macro_recall"] = rep.macro_recall;
        return out;
      },
      py::arg("predictions"), py::arg("golds"));

  m.def(
      "load_model",
      [](const std::string& path) {
        auto saved = load_model(path);
        py::dict out;
        if (saved.morph) out["morph"] = *saved.morph;
        py::list classifiers;
        for (const auto& c : saved.classifiers) {
          py::dict entry;
          entry["feature"] = c.feature;
          if (c.target) entry["target"] = *c.target;
          entry["model"] = c.model;
          classifiers.append(entry);
        }
        out["classifiers"] = classifiers;
        return out;
      },
      py::arg("path"));
}
