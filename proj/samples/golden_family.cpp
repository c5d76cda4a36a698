// Builds the depth-3 golden-mean family, verifies it and classifies x_111.
#include <iostream>

#include "scramble/scramble.hpp"

using namespace scramble;

int main() {
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

  const ScrambleFamily fam = build_scramble_family(in);
  std::cout << "depth " << fam.depth << ", horizon " << fam.horizon() << ", eps " << fam.eps << "\n";
  for (Index j = 1; j <= fam.markers.count(); ++j) std::cout << "T" << j << " = " << fam.markers.T(j) << "\n";

  // DC1 checkpoints before the end of the first stage are skipped
  FamilyTolerances tol;
  tol.min_checkpoint = fam.markers.T(4);
  const FamilyReport rep = verify_family(fam, tol);
  for (const auto& c : rep.clauses) std::cout << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.detail << "\n";

  const LazyPoint& x = fam.points.front().second;
  const RecurrenceClass rc = classify_recurrence(gm, x, truncation_bound(24), fam.horizon());
  std::cout << "x" << fam.points.front().first << " is " << label_name(rc.label) << ", transitivity "
            << rc.transitivity << "\n";
  return rep.passed ? 0 : 1;
}
