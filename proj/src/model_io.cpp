#include "umorph/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "umorph/textio.hpp"

namespace umorph {

namespace {

constexpr const char* kHeader = "UMORPH-MODEL v1";

void write_morph(std::ostream& out, const MorphModel& m) {
  out << "[morph]\n";
  out << "alpha\t" << format_double(m.alpha) << "\n";
  out << "N\t" << m.total_tokens << "\n";
  for (const auto& [c, cnt] : m.char_counts)
    out << "char\t" << c << "\t" << cnt << "\n";
  for (const auto& [morph, cnt] : m.counts)
    out << "morph\t" << morph << "\t" << cnt << "\n";
}

void write_classifier(std::ostream& out, const SavedClassifier& c) {
  out << "[classifier]\n";
  out << "feature\t" << c.feature << "\n";
  out << "beta\t" << format_double(c.model.beta) << "\n";
  if (c.target) out << "target\t" << *c.target << "\n";
  for (const auto& cls : c.model.classes)
    out << "prior\t" << cls << "\t"
        << format_double(c.model.prior_counts.at(cls)) << "\n";
  for (const auto& cls : c.model.classes) {
    auto it = c.model.feature_counts.find(cls);
    if (it == c.model.feature_counts.end()) continue;
    for (const auto& [morph, cnt] : it->second)
      out << "count\t" << cls << "\t" << morph << "\t" << format_double(cnt)
          << "\n";
  }
}

void write_calibration(std::ostream& out, const CalibrationTable& t) {
  out << "[calibration]\n";
  out << "classes\t" << t.num_classes << "\n";
  out << "bins\t" << t.bins << "\n";
  out << "min_samples\t" << t.min_samples << "\n";
  for (int i = 0; i < t.bins; ++i) {
    out << "bin\t" << i << "\t" << t.bin_counts[i] << "\t";
    if (t.bin_accuracy[i])
      out << format_double(*t.bin_accuracy[i]);
    else
      out << "-";
    out << "\n";
  }
}

[[noreturn]] void fail(std::size_t lineno, const std::string& msg) {
  throw std::runtime_error("model file line " + std::to_string(lineno) +
                           ": " + msg);
}

}  // namespace

std::string serialize_model(const SavedModel& model) {
  std::ostringstream out;
  out << kHeader << "\n";
  if (model.morph) write_morph(out, *model.morph);
  for (const auto& c : model.classifiers) write_classifier(out, c);
  if (model.calibration) write_calibration(out, *model.calibration);
  return out.str();
}

SavedModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line != kHeader)
    throw std::runtime_error("model file: missing '" + std::string(kHeader) +
                             "' header");
  ++lineno;

  SavedModel model;
  enum class Section { None, Morph, Classifier, Calibration };
  Section section = Section::None;

  // derive class_totals/vocab once per classifier; section headers can
  // trigger this repeatedly
  std::size_t finished = 0;
  auto finish_classifier = [&]() {
    for (; finished < model.classifiers.size(); ++finished) {
      ClassModel& m = model.classifiers[finished].model;
      for (const auto& [cls, counts] : m.feature_counts)
        for (const auto& [morph, cnt] : counts) {
          m.class_totals[cls] += cnt;
          if (cnt > 0) m.vocab.insert(morph);
        }
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[morph]") {
        finish_classifier();
        section = Section::Morph;
        model.morph.emplace();
      } else if (line == "[classifier]") {
        finish_classifier();
        section = Section::Classifier;
        model.classifiers.emplace_back();
      } else if (line == "[calibration]") {
        finish_classifier();
        section = Section::Calibration;
        model.calibration.emplace();
        model.calibration->bin_counts.clear();
        model.calibration->bin_accuracy.clear();
      } else {
        fail(lineno, "unknown section " + line);
      }
      continue;
    }
    auto fields = split_tabs(line);
    const auto& key = fields[0];
    switch (section) {
      case Section::None:
        fail(lineno, "content before any section");
      case Section::Morph: {
        MorphModel& m = *model.morph;
        if (key == "alpha" && fields.size() == 2)
          m.alpha = parse_double(fields[1]);
        else if (key == "N" && fields.size() == 2)
          m.total_tokens = parse_ll(fields[1]);
        else if (key == "char" && fields.size() == 3)
          m.char_counts[std::string(fields[1])] = parse_ll(fields[2]);
        else if (key == "morph" && fields.size() == 3)
          m.counts[std::string(fields[1])] = parse_ll(fields[2]);
        else
          fail(lineno, "bad [morph] line");
        break;
      }
      case Section::Classifier: {
        SavedClassifier& c = model.classifiers.back();
        if (key == "feature" && fields.size() == 2)
          c.feature = std::string(fields[1]);
        else if (key == "beta" && fields.size() == 2)
          c.model.beta = parse_double(fields[1]);
        else if (key == "target" && fields.size() == 2)
          c.target = std::string(fields[1]);
        else if (key == "prior" && fields.size() == 3) {
          std::string cls(fields[1]);
          c.model.classes.push_back(cls);
          c.model.prior_counts[cls] = parse_double(fields[2]);
        } else if (key == "count" && fields.size() == 4) {
          c.model.feature_counts[std::string(fields[1])]
                                [std::string(fields[2])] =
              parse_double(fields[3]);
        } else {
          fail(lineno, "bad [classifier] line");
        }
        break;
      }
      case Section::Calibration: {
        CalibrationTable& t = *model.calibration;
        if (key == "classes" && fields.size() == 2)
          t.num_classes = static_cast<int>(parse_ll(fields[1]));
        else if (key == "bins" && fields.size() == 2)
          t.bins = static_cast<int>(parse_ll(fields[1]));
        else if (key == "min_samples" && fields.size() == 2)
          t.min_samples = parse_ll(fields[1]);
        else if (key == "bin" && fields.size() == 4) {
          t.bin_counts.push_back(parse_ll(fields[2]));
          if (fields[3] == "-")
            t.bin_accuracy.push_back(std::nullopt);
          else
            t.bin_accuracy.push_back(parse_double(fields[3]));
        } else {
          fail(lineno, "bad [calibration] line");
        }
        break;
      }
    }
  }
  finish_classifier();
  if (model.morph) model.morph->rebuild_char_costs();
  if (model.calibration &&
      static_cast<int>(model.calibration->bin_counts.size()) !=
          model.calibration->bins)
    throw std::runtime_error("model file: calibration bin count mismatch");
  return model;
}

void save_model(const SavedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << serialize_model(model);
  if (!out) throw std::runtime_error("write error: " + path);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace umorph
