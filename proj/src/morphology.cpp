#include "umorph/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "umorph/rng.hpp"
#include "umorph/utf8.hpp"

namespace umorph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Costs within this margin count as ties for the deterministic
// fewer-morphs-then-lexicographic rule.
constexpr double kTieEps = 1e-9;

struct Candidate {
  double cost = kInf;
  std::vector<std::string> morphs;
};

bool is_better(const Candidate& a, const Candidate& b) {
  if (a.cost < b.cost - kTieEps) return true;
  if (a.cost > b.cost + kTieEps) return false;
  if (a.morphs.size() != b.morphs.size())
    return a.morphs.size() < b.morphs.size();
  return a.morphs < b.morphs;
}

double known_morph_cost(const MorphModel& model, long long count) {
  return -std::log(static_cast<double>(count) /
                   static_cast<double>(model.total_tokens));
}

// unknown_cost(morph, unit_count) prices substrings absent from the lexicon.
template <typename UnknownCost>
Segmentation viterbi_impl(const MorphModel& model, std::string_view word,
                          const UnknownCost& unknown_cost) {
  if (word.empty()) throw std::invalid_argument("viterbi_segment: empty word");
  std::vector<std::string> units = utf8_units(word);
  std::size_t n = units.size();
  std::vector<Candidate> best(n + 1);
  best[0].cost = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::string morph;
    // grow the substring backwards from j so each i reuses the buffer
    for (std::size_t i = j; i-- > 0;) {
      morph.insert(0, units[i]);
      if (best[i].cost == kInf) continue;
      double mc;
      auto it = model.counts.find(morph);
      if (it != model.counts.end() && it->second > 0)
        mc = known_morph_cost(model, it->second);
      else
        mc = unknown_cost(morph, j - i);
      if (mc == kInf) continue;
      Candidate cand;
      cand.cost = best[i].cost + mc;
      if (cand.cost > best[j].cost + kTieEps) continue;
      cand.morphs = best[i].morphs;
      cand.morphs.push_back(morph);
      if (is_better(cand, best[j])) best[j] = std::move(cand);
    }
  }
  if (best[n].cost == kInf)
    throw std::runtime_error("viterbi_segment: no feasible segmentation");
  Segmentation seg;
  seg.morphs = std::move(best[n].morphs);
  seg.cost = best[n].cost;
  return seg;
}

double floor_cost(const MorphModel& model) {
  return std::log(static_cast<double>(model.total_tokens) +
                  static_cast<double>(model.counts.size()) + 1.0);
}

}  // namespace

void MorphModel::rebuild_char_costs() {
  char_costs.clear();
  long long total = 0;
  for (const auto& [c, cnt] : char_counts) total += cnt;
  // add-one smoothing over the observed characters plus the end symbol
  double denom = static_cast<double>(total) +
                 static_cast<double>(char_counts.size()) + 1.0;
  for (const auto& [c, cnt] : char_counts)
    char_costs[c] = -std::log((static_cast<double>(cnt) + 1.0) / denom);
  end_cost = -std::log(1.0 / denom);
}

double spell_cost(const MorphModel& model, std::string_view morph) {
  double cost = 0.0;
  for (const auto& unit : utf8_units(morph)) {
    auto it = model.char_costs.find(unit);
    if (it == model.char_costs.end())
      throw std::runtime_error("spell_cost: no character probability for '" +
                               unit + "'");
    cost += it->second;
  }
  return cost + model.end_cost;
}

double corpus_cost(const MorphModel& model,
                   const std::vector<Segmentation>& segmentations) {
  double cost = 0.0;
  for (const auto& seg : segmentations) {
    for (const auto& m : seg.morphs) {
      auto it = model.counts.find(m);
      if (it == model.counts.end() || it->second <= 0)
        throw std::runtime_error("corpus_cost: morph '" + m +
                                 "' absent from model");
      cost += known_morph_cost(model, it->second);
    }
  }
  return cost;
}

double lexicon_cost(const MorphModel& model) {
  double cost = 0.0;
  for (const auto& [m, cnt] : model.counts) cost += spell_cost(model, m);
  return cost;
}

double total_cost(const MorphModel& model,
                  const std::vector<Segmentation>& segmentations) {
  return model.alpha * corpus_cost(model, segmentations) +
         lexicon_cost(model);
}

Segmentation viterbi_segment_closed(const MorphModel& model,
                                    std::string_view word) {
  double floor = floor_cost(model);
  return viterbi_impl(model, word,
                      [&](const std::string&, std::size_t units) {
                        return units == 1 ? floor : kInf;
                      });
}

Segmentation viterbi_segment_open(const MorphModel& model,
                                  std::string_view word,
                                  const NewMorphCost& new_morph_cost) {
  return viterbi_impl(model, word,
                      [&](const std::string& m, std::size_t) {
                        return new_morph_cost(m);
                      });
}

NewMorphCost default_new_morph_cost(const MorphModel& model) {
  return [&model](const std::string& m) {
    return spell_cost(model, m) +
           std::log(static_cast<double>(model.total_tokens) + 1.0);
  };
}

namespace {

// Incremental bookkeeping for the MDL objective:
//   total = alpha * (N ln N - sum_m c(m) ln c(m)) + sum_{m in lexicon} spell(m)
struct Trainer {
  MorphModel model;
  double count_entropy_sum = 0.0;  // sum_m c(m) ln c(m)
  double lexicon_sum = 0.0;
  std::unordered_map<std::string, double> spell_cache;

  double spell(const std::string& m) {
    auto it = spell_cache.find(m);
    if (it != spell_cache.end()) return it->second;
    double s = spell_cost(model, m);
    spell_cache.emplace(m, s);
    return s;
  }

  void add_morph(const std::string& m) {
    long long& c = model.counts[m];
    if (c == 0)
      lexicon_sum += spell(m);
    else
      count_entropy_sum -= static_cast<double>(c) * std::log(c);
    ++c;
    count_entropy_sum += static_cast<double>(c) * std::log(c);
    ++model.total_tokens;
  }

  void remove_morph(const std::string& m) {
    auto it = model.counts.find(m);
    long long c = it->second;
    count_entropy_sum -= static_cast<double>(c) * std::log(c);
    if (c == 1) {
      model.counts.erase(it);
      lexicon_sum -= spell(m);
    } else {
      it->second = c - 1;
      count_entropy_sum += static_cast<double>(c - 1) * std::log(c - 1);
    }
    --model.total_tokens;
  }

  double objective() const {
    double n = static_cast<double>(model.total_tokens);
    double corpus = n > 0 ? n * std::log(n) - count_entropy_sum : 0.0;
    return model.alpha * corpus + lexicon_sum;
  }

  // Re-sum from scratch so float drift cannot accumulate across epochs.
  void resync() {
    count_entropy_sum = 0.0;
    lexicon_sum = 0.0;
    for (const auto& [m, c] : model.counts) {
      count_entropy_sum += static_cast<double>(c) * std::log(c);
      lexicon_sum += spell(m);
    }
  }
};

}  // namespace

namespace {

// Training state: per-type segmentations plus a morph -> (type, multiplicity)
// usage index so joint lexicon moves can locate every occurrence.
struct TrainState {
  Trainer tr;
  std::vector<std::string> types;
  std::vector<std::vector<std::string>> segs;
  std::map<std::string, std::map<std::size_t, int>> usage;

  void set_seg(std::size_t idx, std::vector<std::string> morphs) {
    for (const auto& m : segs[idx]) {
      auto it = usage.find(m);
      if (--it->second[idx] == 0) it->second.erase(idx);
      if (it->second.empty()) usage.erase(it);
      tr.remove_morph(m);
    }
    for (const auto& m : morphs) {
      usage[m][idx]++;
      tr.add_morph(m);
    }
    segs[idx] = std::move(morphs);
  }
};

// Joint move: split every lexicon entry sharing a common prefix (or
// suffix) at that affix, in one step, wherever the entries occur. A
// single-type re-segmentation can never justify the first split of a
// fresh name (both parts pay full spell-out), but splitting a shared
// affix out of several entries at once amortizes the new entry's cost;
// each group is accepted only on an exact decrease of the objective.
void affix_split_pass(TrainState& st, bool prefix) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [entry, cnt] : st.tr.model.counts) {
    auto units = utf8_units(entry);
    std::string affix;
    for (std::size_t k = 1; k < units.size(); ++k) {
      if (prefix) {
        affix += units[k - 1];
      } else {
        affix.clear();
        for (std::size_t j = k; j < units.size(); ++j) affix += units[j];
      }
      groups[affix].push_back(entry);
    }
  }
  for (const auto& [affix, all_members] : groups) {
    std::vector<std::string> members;
    for (const auto& e : all_members)
      if (st.tr.model.counts.count(e)) members.push_back(e);
    if (members.size() < 2) continue;

    std::set<std::string> member_set(members.begin(), members.end());
    std::set<std::size_t> affected;
    for (const auto& e : members)
      for (const auto& [idx, mult] : st.usage.at(e)) affected.insert(idx);

    double before = st.tr.objective();
    std::vector<std::pair<std::size_t, std::vector<std::string>>> undo;
    for (std::size_t idx : affected) {
      std::vector<std::string> replaced;
      for (const auto& m : st.segs[idx]) {
        if (member_set.count(m)) {
          std::string rest = prefix ? m.substr(affix.size())
                                    : m.substr(0, m.size() - affix.size());
          if (prefix) {
            replaced.push_back(affix);
            replaced.push_back(rest);
          } else {
            replaced.push_back(rest);
            replaced.push_back(affix);
          }
        } else {
          replaced.push_back(m);
        }
      }
      undo.emplace_back(idx, st.segs[idx]);
      st.set_seg(idx, std::move(replaced));
    }
    if (st.tr.objective() >= before - 1e-12) {
      for (auto it = undo.rbegin(); it != undo.rend(); ++it)
        st.set_seg(it->first, std::move(it->second));
    }
  }
}

}  // namespace

MorphTrainResult train_morph(const std::vector<std::string>& corpus,
                             const MorphTrainOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("train_morph: empty corpus");
  if (options.alpha <= 0.0)
    throw std::invalid_argument("train_morph: alpha must be > 0");
  if (options.convergence_tol <= 0.0)
    throw std::invalid_argument("train_morph: convergence_tol must be > 0");

  TrainState st;
  {
    // distinct types in first-seen order
    std::set<std::string> seen;
    for (const auto& w : corpus) {
      if (w.empty())
        throw std::invalid_argument("train_morph: empty username in corpus");
      if (seen.insert(w).second) st.types.push_back(w);
    }
  }

  Trainer& tr = st.tr;
  tr.model.alpha = options.alpha;
  for (const auto& w : st.types)
    for (const auto& u : utf8_units(w)) tr.model.char_counts[u]++;
  tr.model.rebuild_char_costs();

  st.segs.resize(st.types.size());
  for (std::size_t i = 0; i < st.types.size(); ++i) {
    st.segs[i] = {st.types[i]};
    st.usage[st.types[i]][i]++;
    tr.add_morph(st.types[i]);
  }
  tr.resync();

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(st.types.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double prev_cost = tr.objective();
  double cost = prev_cost;
  if (options.on_epoch) options.on_epoch(0, prev_cost);
  int epoch = 0;
  for (; epoch < options.max_epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (std::size_t idx : order) {
      const std::vector<std::string> old_seg = st.segs[idx];
      for (const auto& m : old_seg) tr.remove_morph(m);

      // proposal price in corpus-cost units; dividing the spell-out cost
      // by alpha keeps the DP aligned with the alpha-weighted objective
      Segmentation cand = viterbi_segment_open(
          tr.model, st.types[idx], [&tr](const std::string& m) {
            return tr.spell(m) / tr.model.alpha +
                   std::log(static_cast<double>(tr.model.total_tokens) + 1.0);
          });

      for (const auto& m : cand.morphs) tr.add_morph(m);
      double cost_new = tr.objective();
      for (const auto& m : cand.morphs) tr.remove_morph(m);
      for (const auto& m : old_seg) tr.add_morph(m);
      double cost_old = tr.objective();
      if (cost_new < cost_old - 1e-12) st.set_seg(idx, cand.morphs);
    }
    affix_split_pass(st, /*prefix=*/true);
    affix_split_pass(st, /*prefix=*/false);
    tr.resync();
    cost = tr.objective();
    if (options.on_epoch) options.on_epoch(epoch + 1, cost);
    double denom = std::max(std::abs(prev_cost), 1.0);
    if ((prev_cost - cost) / denom < options.convergence_tol) {
      ++epoch;
      break;
    }
    prev_cost = cost;
  }

  MorphTrainResult result;
  result.model = std::move(tr.model);
  result.final_cost = cost;
  result.epochs_run = epoch;
  return result;
}

double tune_alpha(const std::vector<double>& grid,
                  const std::function<MorphModel(double)>& train_fn,
                  const std::function<double(const MorphModel&)>& eval_fn) {
  if (grid.empty()) throw std::invalid_argument("tune_alpha: empty grid");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_alpha = 0.0;
  double best_loss = kInf;
  for (double alpha : sorted) {
    MorphModel model = train_fn(alpha);
    double loss = eval_fn(model);
    if (loss < best_loss) {
      best_loss = loss;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace umorph
