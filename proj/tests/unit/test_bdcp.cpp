#include <random>

#include "algebroid/bdcp.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace algebroid;
using testing_support::spec_from;
using testing_support::table_distance;

namespace {

Expr c(double v) { return Expr::number(v); }

BdcpSpec sl2_split() {
  BdcpSpec b(0, 2, 1);  // first block {E, F}, second {H}
  b.zeta().set(0, 1, 0, c(1));
  b.rho().set(0, 0, 0, c(2));
  b.rho().set(0, 1, 1, c(-2));
  return b;
}

BdcpSpec heavy_top_parts() {
  BdcpSpec b(0, 3, 3);  // first block translations, second rotations
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        const int e = oracle::epsilon(i, j, l);
        if (e == 0) continue;
        if (i < j) b.theta().set(i, j, l, c(e));
        b.rho().set(i, j, l, c(e));
      }
  return b;
}

}  // namespace

TEST_CASE("sparse tensor storage") {
  SparseTensor t({3, 3, 2}, true);
  t.set(2, 0, 1, c(4));
  CHECK(t.get(0, 2, 1).is_number(-4));
  CHECK(t.get(2, 0, 1).is_number(4));
  CHECK(t.entries().size() == 1);
  t.set(0, 2, 1, parse("1 - 1"));
  CHECK(t.is_zero());
  CHECK_THROWS_AS(t.set(1, 1, 0, c(1)), ShapeMismatch);
  CHECK_THROWS_AS(t.set(0, 1, 2, c(1)), ShapeMismatch);
  t.set(1, 1, 0, c(0));  // a zero diagonal is harmless
  CHECK(t.is_zero());
}

TEST_CASE("assembling zero couplings gives the abelian direct product") {
  BdcpSpec b(2, 1, 2);
  b.set_anchor_a(0, 0, parse("x2"));
  b.set_anchor_b(1, 1, c(3));
  const AlgebroidSpec total = assemble_total(b);
  CHECK(total.rank() == 3);
  CHECK(total.structure_entries().empty());
  CHECK(total.anchor(0, 0) == parse("x2"));
  CHECK(total.anchor(2, 1).is_number(3));
  CHECK(total.anchor(1, 1).is_zero());
  CHECK(classify(b) == HierarchyLevel::direct);
}

TEST_CASE("assembled sl(2) matches its commutator table") {
  const BdcpSpec b = sl2_split();
  CHECK(table_distance(assemble_total(b), oracle::sl2()) == 0.0);
  CHECK(classify(b) == HierarchyLevel::bdcp);
  const BdcpSpec back = decompose(spec_from(oracle::sl2()), FiberSplit{2});
  CHECK(back.zeta().get(0, 1, 0).is_number(1));
  CHECK(back == b);
}

TEST_CASE("assembled so(3) + so(3) split matches the direct-sum table") {
  const oracle::Table t = oracle::so3xso3_split();
  const BdcpSpec b = decompose(spec_from(t), FiberSplit{3});
  CHECK(table_distance(assemble_total(b), t) == 0.0);
  CHECK_FALSE(b.zeta().is_zero());
  CHECK_FALSE(b.psi().is_zero());
  CHECK(b.phi().is_zero());
  CHECK(b.theta().is_zero());
  CHECK(b.zeta().get(0, 1, 0).is_number(1));  // [a1, a2] = a3
  CHECK(b.psi().get(1, 2, 2).is_number(1));   // [b1, b2] = b3
  CHECK(classify(b) == HierarchyLevel::bdcp);
}

TEST_CASE("so(3) with a one-dimensional first block") {
  const BdcpSpec b = decompose(spec_from(oracle::so3()), FiberSplit{1});
  CHECK(b.psi().get(0, 1, 0).is_number(1));  // [e2, e3] = e1
  CHECK(b.theta().is_zero());
  CHECK(b.phi().is_zero());
  CHECK(b.zeta().is_zero());
  CHECK(b.rho().is_zero());
  CHECK(b.sigma().get(0, 0, 1).is_number(-1));  // [e2, e1] = -e3
  CHECK(b.sigma().get(1, 0, 0).is_number(1));   // [e3, e1] = e2
  CHECK(classify(b) == HierarchyLevel::unified);
}

TEST_CASE("heavy-top data is a semidirect product equal to se(3)") {
  const BdcpSpec b = make_product(HierarchyLevel::semidirect, heavy_top_parts());
  CHECK(table_distance(assemble_total(b), oracle::se3()) == 0.0);
  CHECK(classify(b) == HierarchyLevel::semidirect);
}

TEST_CASE("unified product of abelian blocks with a cocycle is Heisenberg") {
  BdcpSpec parts(0, 1, 2);
  parts.psi().set(0, 1, 0, c(1));
  const BdcpSpec b = make_product(HierarchyLevel::unified, parts);
  CHECK(table_distance(assemble_total(b), oracle::heisenberg()) == 0.0);
  CHECK(classify(b) == HierarchyLevel::cocycle_ext);
}

TEST_CASE("make_product enforces the zero pattern of each level") {
  CHECK_THROWS_AS(make_product(HierarchyLevel::direct, heavy_top_parts()), IllegalTensorForLevel);
  CHECK_THROWS_AS(make_product(HierarchyLevel::unified, sl2_split()), IllegalTensorForLevel);
  CHECK(make_product(HierarchyLevel::bdcp, sl2_split()) == sl2_split());

  BdcpSpec two_abelian(0, 2, 2);
  CHECK(assemble_total(make_product(HierarchyLevel::direct, two_abelian)).structure_entries().empty());

  BdcpSpec with_sigma(0, 1, 1);
  with_sigma.sigma().set(0, 0, 0, c(1));
  CHECK_THROWS_AS(make_product(HierarchyLevel::cocycle_ext, with_sigma), IllegalTensorForLevel);
  CHECK(classify(with_sigma) == HierarchyLevel::double_cross);

  BdcpSpec with_phi(0, 2, 1);
  with_phi.phi().set(0, 1, 0, c(1));
  CHECK(classify(with_phi) == HierarchyLevel::direct);
  BdcpSpec with_psi(0, 2, 2);
  with_psi.phi().set(0, 1, 0, c(1));
  with_psi.psi().set(0, 1, 1, c(1));
  CHECK(classify(with_psi) == HierarchyLevel::unified);
}

TEST_CASE("level names") {
  for (auto l : {HierarchyLevel::direct, HierarchyLevel::semidirect, HierarchyLevel::cocycle_ext,
                 HierarchyLevel::double_cross, HierarchyLevel::unified, HierarchyLevel::bdcp}) {
    CHECK(level_from_name(level_name(l)) == l);
  }
  CHECK(level_name(HierarchyLevel::bdcp) == "BDCP");
  CHECK_THROWS_AS(level_from_name("pyramid"), Error);
}

TEST_CASE("single-block wrap") {
  const BdcpSpec b = single_block(spec_from(oracle::so3()));
  CHECK(b.q() == 0);
  CHECK(classify(b) == HierarchyLevel::direct);
  CHECK(table_distance(assemble_total(b), oracle::so3()) == 0.0);
}

TEST_CASE("decompose inverts assemble") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const BdcpSpec b = oracle::random_bdcp(rng);
    if (b.q() == 0) continue;
    CHECK(decompose(assemble_total(b), FiberSplit{b.p()}) == b);
  }
}

TEST_CASE("assembly is linear in the coupling data") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const BdcpSpec b = oracle::random_bdcp(rng);
    BdcpSpec doubled = b;
    for (TensorBlock blk : kAllBlocks)
      for (const auto& [idx, e] : b.tensor(blk).entries())
        doubled.tensor(blk).set(idx[0], idx[1], idx[2], mul(c(2), e));
    const std::vector<double> x(b.base_dim(), 0.37);
    const Tensor3 one = assemble_total(b).eval_structure(x);
    const Tensor3 two = assemble_total(doubled).eval_structure(x);
    for (std::size_t i = 0; i < one.data.size(); ++i) CHECK(two.data[i] == 2 * one.data[i]);
  }
}

TEST_CASE("decompose rejects invalid splits") {
  CHECK_THROWS_AS(decompose(spec_from(oracle::so3()), FiberSplit{0}), ShapeMismatch);
  CHECK_THROWS_AS(decompose(spec_from(oracle::so3()), FiberSplit{3}), ShapeMismatch);
}
