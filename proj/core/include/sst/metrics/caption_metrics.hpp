#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sst/world/scene.hpp"

namespace sst::metrics {

using world::Caption;
using RefList = std::vector<Caption>;

struct CaptionScore {
  std::array<double, 4> bleu{};  // BLEU-1..4
  double cider_d = 0.0;
};

// Corpus BLEU-n (n in 1..4): clipped n-gram precisions pooled over the corpus,
// geometric mean, brevity penalty against the closest reference length.
double bleu(std::span<const Caption> candidates, std::span<const RefList> references, int n);
std::array<double, 4> bleu_all(std::span<const Caption> candidates,
                               std::span<const RefList> references);

// CIDEr-D with document frequencies from the given reference corpus: TF-IDF
// n-gram vectors (n = 1..4), candidate counts clipped by the reference,
// Gaussian length penalty (sigma = 6), x10 scaling.
class CiderD {
 public:
  explicit CiderD(std::span<const RefList> references, double sigma = 6.0);

  // Score of one candidate against the references of image `image`.
  double score(const Caption& candidate, std::size_t image) const;
  // Mean over images; candidates[i] pairs with references[i].
  double corpus_score(std::span<const Caption> candidates) const;
  // A one-image corpus makes every IDF weight zero.
  bool degenerate() const { return references_.size() <= 1; }

 private:
  struct Vector {
    std::array<std::map<std::string, double>, 4> weights;
    std::array<double, 4> norms{};
    std::size_t length = 0;
  };
  Vector vectorize(const Caption& caption) const;

  std::vector<RefList> references_;
  std::map<std::string, double> doc_freq_;
  double log_corpus_ = 0.0;
  double sigma_;
  std::vector<std::vector<Vector>> ref_vectors_;
};

CaptionScore caption_scores(std::span<const Caption> candidates, std::span<const RefList> references);

}  // namespace sst::metrics
