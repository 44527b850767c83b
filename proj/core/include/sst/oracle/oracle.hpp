#pragma once

#include <cstdint>
#include <string>

#include "sst/caption/provider.hpp"
#include "sst/rng.hpp"
#include "sst/world/token_set.hpp"

namespace sst::oracle {

// Keeps each unit of K independently with probability rho. Throws for rho
// outside [0, 1] or an empty K.
world::TokenSet oracle_suggest(const world::TokenSet& k, double rho, Rng& rng);

// Ground-truth provider: K is the scene's 5-reference set (content units only
// when `content_only`); draw d of scene i uses derive_seed(seed, i, d).
class OracleProvider final : public caption::SuggestionProvider {
 public:
  OracleProvider(const world::Vocabulary& vocab, double rho, std::uint64_t seed,
                 bool content_only = false);
  world::TokenSet suggest(const world::Example& example, std::uint64_t draw) const override;
  const world::Vocabulary& vocabulary() const override { return vocab_; }
  std::string describe() const override;
  double rho() const { return rho_; }

 private:
  world::Vocabulary vocab_;
  double rho_;
  std::uint64_t seed_;
  bool content_only_;
};

}  // namespace sst::oracle
