#include "sst/oracle/oracle.hpp"

#include <cstdio>

#include "sst/error.hpp"

namespace sst::oracle {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw Error("oracle: rho must lie in [0, 1], got " + std::to_string(rho));
  }
}

}  // namespace

world::TokenSet oracle_suggest(const world::TokenSet& k, double rho, Rng& rng) {
  check_rho(rho);
  if (k.empty()) throw Error("oracle: empty reference set");
  world::TokenSet out;
  for (std::size_t i = 0; i < k.size(); ++i) {
    // A draw is made for every unit so streams do not depend on rho.
    if (rng.uniform() < rho) {
      out.units.push_back(k.units[i]);
      out.content.push_back(k.content[i]);
    }
  }
  return out;
}

OracleProvider::OracleProvider(const world::Vocabulary& vocab, double rho, std::uint64_t seed,
                               bool content_only)
    : vocab_(vocab), rho_(rho), seed_(seed), content_only_(content_only) {
  check_rho(rho);
}

world::TokenSet OracleProvider::suggest(const world::Example& example, std::uint64_t draw) const {
  world::TokenSetOptions o;
  o.refs_per_image = 5;
  o.content_only = content_only_;
  const auto k = world::unique_token_set(example.refs, vocab_, o);
  Rng rng(derive_seed(seed_, example.index, draw));
  return oracle_suggest(k, rho_, rng);
}

std::string OracleProvider::describe() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "oracle:%g", rho_);
  return buf;
}

}  // namespace sst::oracle
