#include "sst/metrics/caption_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <set>

#include "sst/error.hpp"
#include "sst/world/vocabulary.hpp"

namespace sst::metrics {
namespace {

std::map<std::string, int> count_ngrams(const Caption& c, int n) {
  std::map<std::string, int> out;
  for (auto& g : world::ngrams(c, n)) ++out[g];
  return out;
}

}  // namespace

double bleu(std::span<const Caption> candidates, std::span<const RefList> references, int n) {
  if (candidates.empty()) throw Error("bleu: empty candidate corpus");
  if (candidates.size() != references.size()) throw Error("bleu: candidate/reference count mismatch");
  if (n < 1 || n > 4) throw Error("bleu: n must be in 1..4");
  std::vector<double> matched(static_cast<std::size_t>(n), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  double cand_len = 0.0;
  double ref_len = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Caption& cand = candidates[i];
    const RefList& refs = references[i];
    if (refs.empty()) throw Error("bleu: candidate without references");
    for (int k = 1; k <= n; ++k) {
      std::map<std::string, int> max_ref;
      for (const auto& r : refs) {
        for (const auto& [g, c] : count_ngrams(r, k)) max_ref[g] = std::max(max_ref[g], c);
      }
      for (const auto& [g, c] : count_ngrams(cand, k)) {
        auto it = max_ref.find(g);
        matched[static_cast<std::size_t>(k - 1)] += std::min(c, it == max_ref.end() ? 0 : it->second);
        total[static_cast<std::size_t>(k - 1)] += c;
      }
    }
    const auto cl = static_cast<long>(cand.size());
    long best = static_cast<long>(refs[0].size());
    for (const auto& r : refs) {
      const auto rl = static_cast<long>(r.size());
      if (std::labs(rl - cl) < std::labs(best - cl) || (std::labs(rl - cl) == std::labs(best - cl) && rl < best)) {
        best = rl;
      }
    }
    cand_len += static_cast<double>(cl);
    ref_len += static_cast<double>(best);
  }
  if (cand_len == 0.0) return 0.0;
  double log_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (matched[static_cast<std::size_t>(k)] == 0.0) return 0.0;
    log_sum += std::log(matched[static_cast<std::size_t>(k)] / total[static_cast<std::size_t>(k)]);
  }
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return bp * std::exp(log_sum / n);
}

std::array<double, 4> bleu_all(std::span<const Caption> candidates,
                               std::span<const RefList> references) {
  std::array<double, 4> out{};
  for (int n = 1; n <= 4; ++n) out[static_cast<std::size_t>(n - 1)] = bleu(candidates, references, n);
  return out;
}

CiderD::CiderD(std::span<const RefList> references, double sigma)
    : references_(references.begin(), references.end()), sigma_(sigma) {
  if (references_.empty()) throw Error("cider_d: empty reference corpus");
  for (const auto& refs : references_) {
    std::set<std::string> seen;
    for (const auto& r : refs) {
      for (int n = 1; n <= 4; ++n) {
        for (auto& g : world::ngrams(r, n)) seen.insert(std::move(g));
      }
    }
    for (const auto& g : seen) doc_freq_[g] += 1.0;
  }
  log_corpus_ = std::log(static_cast<double>(references_.size()));
  if (degenerate()) {
    std::cerr << "warning: cider_d reference corpus has a single image; IDF weights are all zero\n";
  }
  ref_vectors_.reserve(references_.size());
  for (const auto& refs : references_) {
    std::vector<Vector> vs;
    for (const auto& r : refs) vs.push_back(vectorize(r));
    ref_vectors_.push_back(std::move(vs));
  }
}

CiderD::Vector CiderD::vectorize(const Caption& caption) const {
  Vector v;
  v.length = caption.size();
  for (int n = 1; n <= 4; ++n) {
    const auto k = static_cast<std::size_t>(n - 1);
    for (const auto& [g, tf] : count_ngrams(caption, n)) {
      auto it = doc_freq_.find(g);
      const double df = std::log(std::max(1.0, it == doc_freq_.end() ? 0.0 : it->second));
      const double w = static_cast<double>(tf) * (log_corpus_ - df);
      v.weights[k][g] = w;
      v.norms[k] += w * w;
    }
    v.norms[k] = std::sqrt(v.norms[k]);
  }
  return v;
}

double CiderD::score(const Caption& candidate, std::size_t image) const {
  const Vector c = vectorize(candidate);
  const auto& refs = ref_vectors_.at(image);
  if (refs.empty()) throw Error("cider_d: image without references");
  double total = 0.0;
  for (const auto& r : refs) {
    const double delta = static_cast<double>(c.length) - static_cast<double>(r.length);
    const double penalty = std::exp(-(delta * delta) / (2.0 * sigma_ * sigma_));
    double per_n = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      double val = 0.0;
      for (const auto& [g, w] : c.weights[k]) {
        auto it = r.weights[k].find(g);
        if (it != r.weights[k].end()) val += std::min(w, it->second) * it->second;
      }
      if (c.norms[k] != 0.0 && r.norms[k] != 0.0) val /= c.norms[k] * r.norms[k];
      per_n += val * penalty;
    }
    total += per_n / 4.0;
  }
  return 10.0 * total / static_cast<double>(refs.size());
}

double CiderD::corpus_score(std::span<const Caption> candidates) const {
  if (candidates.size() != references_.size()) throw Error("cider_d: candidate/reference count mismatch");
  if (candidates.empty()) throw Error("cider_d: empty candidate corpus");
  double sum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) sum += score(candidates[i], i);
  return sum / static_cast<double>(candidates.size());
}

CaptionScore caption_scores(std::span<const Caption> candidates, std::span<const RefList> references) {
  CaptionScore s;
  s.bleu = bleu_all(candidates, references);
  s.cider_d = CiderD(references).corpus_score(candidates);
  return s;
}

}  // namespace sst::metrics
