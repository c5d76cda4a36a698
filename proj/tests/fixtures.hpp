// The golden-mean family used by the chaos and acceptance tests.
#pragma once

#include "scramble/scramble.hpp"

namespace fixture {

inline scramble::FamilyInputs golden_inputs() {
  using namespace scramble;
  const ShiftModel gm = ShiftModel::golden_mean();
  FamilyInputs in;
  in.model = gm;
  in.K = chain_from_words(gm, {parse_word("01"), parse_word("001")}, 4);
  in.mu = periodic_measure(parse_word("01"), 4, &gm);
  in.mu1 = in.mu;
  in.mu2 = in.mu;
  in.theta = 1;
  in.pair1 = distal_pair_from_periodic(parse_word("01"), 1);
  in.pair2 = in.pair1;
  in.base_cylinder = parse_word("0");
  return in;
}

inline scramble::FamilyConfig config(int depth) {
  scramble::FamilyConfig cfg;
  cfg.depth = depth;
  return cfg;
}

// DC1 checkpoints start at the end of the first stage, T_4.
inline scramble::FamilyTolerances burn_in(const scramble::ScrambleFamily& fam) {
  scramble::FamilyTolerances tol;
  tol.min_checkpoint = fam.markers.T(4);
  return tol;
}

}  // namespace fixture
