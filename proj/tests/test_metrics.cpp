#include <doctest.h>

#include <cmath>

#include "foc/errors.hpp"
#include "foc/metrics.hpp"
#include "foc/rng.hpp"

using namespace foc;

TEST_CASE("accuracy counts correct predictions") {
  CHECK(accuracy({1, 2, 0}, {1, 2, 0}) == 1.0);
  CHECK(accuracy({0, 0}, {0, 1}) == 0.5);
  CHECK(accuracy({0, 1, 2, 2}, {0, 1, 1, 2}) == 0.75);
  CHECK_THROWS_AS(accuracy({0}, {0, 1}), DataError);
  CHECK_THROWS_AS(accuracy({}, {}), DataError);
}

TEST_CASE("macro_f1 against hand-computed confusion matrices") {
  CHECK(macro_f1({0, 1, 2}, {0, 1, 2}, 3) == 1.0);
  CHECK(macro_f1({0, 0, 1, 1}, {0, 1, 0, 1}, 2) == doctest::Approx(0.5));
  // all predictions class 0, truths balanced: (2/3 + 0)/2
  CHECK(macro_f1({0, 0, 0, 0}, {0, 0, 1, 1}, 2) ==
        doctest::Approx(1.0 / 3.0));
}

TEST_CASE("macro_f1 excludes classes absent from the truth set") {
  // class 2 never appears in truths -> mean over classes 0 and 1 only
  CHECK(macro_f1({0, 1}, {0, 1}, 3) == doctest::Approx(1.0));
  // but a truth class never predicted still scores 0
  CHECK(macro_f1({0, 0}, {0, 1}, 2) ==
        doctest::Approx(0.5 * (2.0 / 3.0)));
}

TEST_CASE("macro_f1 is invariant under class relabeling") {
  Rng rng(31);
  std::vector<int> perm{2, 0, 3, 1};
  for (int t = 0; t < 30; ++t) {
    std::vector<int> preds, truths, preds_p, truths_p;
    for (int i = 0; i < 40; ++i) {
      preds.push_back(uniform_int(rng, 0, 3));
      truths.push_back(uniform_int(rng, 0, 3));
      preds_p.push_back(perm[preds.back()]);
      truths_p.push_back(perm[truths.back()]);
    }
    CHECK(macro_f1(preds, truths, 4) ==
          doctest::Approx(macro_f1(preds_p, truths_p, 4)).epsilon(1e-12));
  }
}

TEST_CASE("cluster_mapping picks the per-cluster majority") {
  // cluster 0 sees truths {1,1,2}, cluster 1 sees {0}
  auto m = cluster_mapping({0, 0, 0, 1}, {1, 1, 2, 0}, 2, 3);
  CHECK(m.assignment == std::vector<int>{1, 0});

  // tie in cluster 0 between classes 0 and 1 -> lowest index
  auto tie = cluster_mapping({0, 0, 0, 0}, {0, 0, 1, 1}, 1, 2);
  CHECK(tie.assignment == std::vector<int>{0});

  // empty cluster 3 maps to the global majority class 2
  auto empty = cluster_mapping({0, 1, 2, 2}, {0, 1, 2, 2}, 4, 3);
  CHECK(empty.assignment[3] == 2);
}

TEST_CASE("apply_mapping translates cluster ids") {
  ClusterMapping m;
  m.assignment = {2, 0, 1};
  CHECK(apply_mapping(m, {0, 1, 2, 0}) == std::vector<int>{2, 0, 1, 2});
}

TEST_CASE("refining a clustering never lowers mapped accuracy") {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    int n = 40;
    std::vector<int> truths, coarse, fine;
    for (int i = 0; i < n; ++i) {
      truths.push_back(uniform_int(rng, 0, 2));
      coarse.push_back(uniform_int(rng, 0, 3));
      // refinement: split each coarse cluster in two
      fine.push_back(coarse.back() * 2 + uniform_int(rng, 0, 1));
    }
    auto mc = cluster_mapping(coarse, truths, 4, 3);
    auto mf = cluster_mapping(fine, truths, 8, 3);
    double acc_c = accuracy(apply_mapping(mc, coarse), truths);
    double acc_f = accuracy(apply_mapping(mf, fine), truths);
    CHECK(acc_f >= acc_c - 1e-12);
  }
}

TEST_CASE("per_class_f1 marks truth-absent classes as NaN") {
  auto f1 = per_class_f1({0, 1, 0}, {0, 1, 1}, 3);
  REQUIRE(f1.size() == 3);
  CHECK(f1[0] == doctest::Approx(2.0 / 3.0));
  CHECK(f1[1] == doctest::Approx(2.0 / 3.0));
  CHECK(std::isnan(f1[2]));
}
