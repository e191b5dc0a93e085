#include "doctest.h"
#include "ruchan/chanfactory.hpp"

#include <cmath>

using namespace ruchan;

namespace {

int psd_rank(const Mat& a, double rel = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const RVec ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > rel * top) ++r;
  return r;
}

double min_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("random CP states have the prescribed rank and unit trace") {
  for (int d : {2, 3}) {
    for (int rank = 1; rank <= d * d; ++rank) {
      const BipartiteState s = random_cp(d, rank, 1000 + rank);
      CHECK(std::abs(s.matrix.trace().real() - 1.0) < 1e-14);
      CHECK(min_eig(s.matrix) > -1e-14);
      CHECK(psd_rank(s.matrix) == rank);
    }
  }
  // Same seed, same state, bitwise.
  CHECK((random_cp(3, 4, 77).matrix - random_cp(3, 4, 77).matrix).norm() ==
        0.0);
  CHECK((random_cp(3, 4, 77).matrix - random_cp(3, 4, 78).matrix).norm() >
        1e-3);
  CHECK_THROWS_AS(random_cp(1, 1, 0), shape_error);
  CHECK_THROWS_AS(random_cp(2, 0, 0), shape_error);
  CHECK_THROWS_AS(random_cp(2, 5, 0), shape_error);
}

TEST_CASE("trace-preserving projection is exact, idempotent, rank "
          "preserving") {
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 25; ++trial) {
      const int rank = 1 + trial % (d * d);
      const BipartiteState s = random_cp(d, rank, 2000 + trial + 100 * d);
      const BipartiteState p = project_tp(s);
      CHECK((ptrace_first(p.matrix, d, d) - Mat::Identity(d, d) / d).norm() <
            1e-12);
      CHECK(std::abs(p.matrix.trace().real() - 1.0) < 1e-12);
      CHECK(min_eig(p.matrix) > -1e-12);
      CHECK(psd_rank(p.matrix) == rank);
      const BipartiteState pp = project_tp(p);
      CHECK((pp.matrix - p.matrix).norm() < 1e-12);
    }
  }
  // A state already on the slice is untouched.
  const BipartiteState id_choi = choi_of(example_identity(2));
  CHECK((project_tp(id_choi).matrix - id_choi.matrix).norm() < 1e-14);
}

TEST_CASE("unital projection is exact, idempotent, rank preserving") {
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 25; ++trial) {
      const int rank = 1 + trial % (d * d);
      const BipartiteState s = random_cp(d, rank, 3000 + trial + 100 * d);
      const BipartiteState p = project_unital(s);
      CHECK((ptrace_second(p.matrix, d, d) - Mat::Identity(d, d) / d).norm() <
            1e-12);
      CHECK(min_eig(p.matrix) > -1e-12);
      CHECK(psd_rank(p.matrix) == rank);
      const BipartiteState pp = project_unital(p);
      CHECK((pp.matrix - p.matrix).norm() < 1e-12);
    }
  }
}

TEST_CASE("alternating projections produce doubly stochastic maps") {
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const int rank = 1 + (trial + d) % (d * d);
      const auto [s, trace] =
          random_doubly_stochastic(d, rank, 4000 + trial + 100 * d);
      CHECK(trace.converged);
      CHECK(trace.iterations <= 500);
      CHECK(trace.defects.back().first <= 1e-10);
      CHECK(trace.defects.back().second <= 1e-10);
      CHECK(classify(s).in_doubly_stochastic);
      CHECK(psd_rank(s.matrix) == rank);
    }
  }
  // Determinism.
  const auto a = random_doubly_stochastic(2, 3, 55).first;
  const auto b = random_doubly_stochastic(2, 3, 55).first;
  CHECK((a.matrix - b.matrix).norm() == 0.0);
}

TEST_CASE("rank-1 doubly stochastic maps are unitary conjugations") {
  const auto [s, trace] = random_doubly_stochastic(3, 1, 99);
  const auto ch = kraus_of(s);
  REQUIRE(ch.kraus.size() == 1);
  const Mat& k = ch.kraus[0];
  CHECK((k.adjoint() * k - Mat::Identity(3, 3)).norm() < 1e-5);
}

TEST_CASE("loss channel Choi is the frozen product form") {
  const int d = 3;
  const BipartiteState s = choi_of(example_loss(d));
  Mat e00 = Mat::Zero(d, d);
  e00(0, 0) = 1.0;
  CHECK((s.matrix - kron(e00, Mat::Identity(d, d) / d)).norm() < 1e-14);
  const StateFlags f = classify(s);
  CHECK(f.trace_preserving);
  CHECK(!f.unital);
}

TEST_CASE("depolarizing channel endpoints") {
  // p = 1 erases everything: Choi is maximally mixed.
  const BipartiteState full = choi_of(example_depolarizing(2, 1.0));
  CHECK((full.matrix - Mat::Identity(4, 4) / 4.0).norm() < 1e-12);
  // p = 0 is the identity channel.
  const BipartiteState none = choi_of(example_depolarizing(2, 0.0));
  CHECK((none.matrix - choi_of(example_identity(2)).matrix).norm() < 1e-12);
  // Interior p stays doubly stochastic.
  CHECK(classify(choi_of(example_depolarizing(3, 0.4))).in_doubly_stochastic);
  CHECK_THROWS_AS(example_depolarizing(2, -0.1), domain_error);
  CHECK_THROWS_AS(example_depolarizing(2, 1.5), domain_error);
}

TEST_CASE("spin channel satisfies the angular momentum algebra") {
  const int d = 3;
  const KrausChannel ch = example_landau_streater(d);
  REQUIRE(ch.kraus.size() == 3);
  const double j = 0.5 * (d - 1);
  const double norm = std::sqrt(j * (j + 1.0));
  const Mat j1 = norm * ch.kraus[0];
  const Mat j2 = norm * ch.kraus[1];
  const Mat j3 = norm * ch.kraus[2];
  CHECK((j1 * j2 - j2 * j1 - cplx(0, 1) * j3).norm() < 1e-12);
  CHECK((j2 * j3 - j3 * j2 - cplx(0, 1) * j1).norm() < 1e-12);
  CHECK((j1 * j1 + j2 * j2 + j3 * j3 -
         j * (j + 1.0) * Mat::Identity(d, d)).norm() < 1e-12);
  CHECK(ch.is_trace_preserving(1e-12));
  CHECK(ch.is_unital(1e-12));
  CHECK(classify(choi_of(ch)).in_doubly_stochastic);

  CHECK(example_landau_streater(5).is_unital(1e-12));
  CHECK_THROWS_AS(example_landau_streater(4), shape_error);
  CHECK_THROWS_AS(example_landau_streater(2), shape_error);
}

TEST_CASE("random unitary mixtures are doubly stochastic by construction") {
  const KrausChannel ch = random_unitary_mixture(3, 4, 123);
  REQUIRE(ch.kraus.size() == 4);
  CHECK(classify(choi_of(ch)).in_doubly_stochastic);
  CHECK_THROWS_AS(random_unitary_mixture(3, 0, 0), shape_error);
}

TEST_CASE("dispatcher accepts both spellings of each kind") {
  const Mat a = choi_of(example_channel("landau_streater", 3)).matrix;
  const Mat b = choi_of(example_channel("landau-streater", 3)).matrix;
  CHECK((a - b).norm() == 0.0);
  const Mat c =
      choi_of(example_channel("random_unitary_mixture", 2, 1.0, 3, 9)).matrix;
  const Mat e =
      choi_of(example_channel("unitary-mixture", 2, 1.0, 3, 9)).matrix;
  CHECK((c - e).norm() == 0.0);
  CHECK_THROWS_AS(example_channel("bogus", 2), parse_error);
}

TEST_CASE("extremality of trace-preserving maps") {
  // A single unitary is trivially extremal.
  const ExtremalityResult u = extremal_cpt_check(example_identity(3));
  CHECK(u.independent);
  CHECK(u.rank == 1);
  CHECK(u.needed == 1);

  // Random rank-d channels are extremal almost surely.
  for (int d : {2, 3}) {
    const auto ch = kraus_of(project_tp(random_cp(d, d, 600 + d)));
    const ExtremalityResult res = extremal_cpt_check(ch);
    CHECK(res.needed == d * d);
    CHECK(res.independent);
  }

  // Duplicated Kraus operators collapse the product family.
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const KrausChannel dup{2, {h / std::sqrt(2.0), h / std::sqrt(2.0)}};
  CHECK(!extremal_cpt_check(dup).independent);

  // Rank 4 at d = 2: sixteen products in a four-dimensional space.
  const auto big = kraus_of(project_tp(random_cp(2, 4, 601)));
  const ExtremalityResult over = extremal_cpt_check(big);
  CHECK(over.needed == 16);
  CHECK(over.rank <= 4);
  CHECK(!over.independent);
}

TEST_CASE("extremality of doubly stochastic maps") {
  // Rank 2 at d = 2 never passes the paired-product test.
  for (std::uint64_t seed : {700, 701, 702, 703, 704}) {
    const auto [s, trace] = random_doubly_stochastic(2, 2, seed, 1e-12);
    CHECK(!extremal_unital_cpt_check(kraus_of(s)).independent);
  }

  // Rank 4 at d = 3 generically does.
  const auto [s3, trace3] = random_doubly_stochastic(3, 4, 710, 1e-12);
  const ExtremalityResult r3 = extremal_unital_cpt_check(kraus_of(s3));
  CHECK(r3.needed == 16);
  CHECK(r3.independent);

  // The spin channel is extremal in the doubly stochastic set.
  CHECK(extremal_unital_cpt_check(example_landau_streater(3)).independent);
  // And unitaries always are.
  CHECK(extremal_unital_cpt_check(example_identity(2)).independent);
}

TEST_CASE("saturation experiment reports per-dimension rows") {
  const auto rows = saturation_experiment(3, 10, 42);
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].d == 2);
  CHECK(rows[0].branch == "cpt");
  CHECK(rows[0].rank == 2);
  CHECK(rows[0].trials == 10);
  CHECK(rows[0].fraction >= 0.8);

  CHECK(rows[1].d == 2);
  CHECK(rows[1].branch == "unital");
  CHECK(rows[1].rank == 2);
  CHECK(rows[1].fraction == 0.0);  // paired products are always dependent

  CHECK(rows[2].d == 3);
  CHECK(rows[2].branch == "cpt");
  CHECK(rows[2].rank == 3);
  CHECK(rows[2].fraction >= 0.8);

  CHECK(rows[3].d == 3);
  CHECK(rows[3].branch == "unital");
  CHECK(rows[3].rank == 4);
  CHECK(rows[3].fraction >= 0.8);

  CHECK_THROWS_AS(saturation_experiment(1, 10, 0), shape_error);
  CHECK_THROWS_AS(saturation_experiment(2, 0, 0), shape_error);
}
