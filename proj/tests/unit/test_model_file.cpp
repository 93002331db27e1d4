// Copyright 2026 The ssm-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "ssmdyn/experiments.hpp"
#include "ssmdyn/keyvalue.hpp"
#include "ssmdyn/model_file.hpp"
#include "test_util.hpp"

namespace ssmdyn {
namespace {

using testing::max_abs;

TEST(KeyValue, ParsesCommentsRepeatsAndLines) {
  const auto kv = KeyValueFile::parse("# header\n a = 1 \n\nb = x # trailing\na = 2\n", "cfg");
  ASSERT_EQ(kv.entries().size(), 3u);
  EXPECT_EQ(kv.get("a"), "2");
  EXPECT_EQ(kv.get("b"), "x");
  EXPECT_EQ(kv.all("a").size(), 2u);
  EXPECT_EQ(kv.all("a")[0].line, 2);
  EXPECT_FALSE(kv.get("c").has_value());
}

TEST(KeyValue, TypedAccessors) {
  const auto kv = KeyValueFile::parse("r = 1/3\nn = 12\nflag = true\nbad = 1.5x\n");
  EXPECT_NEAR(*kv.get_double("r"), 1.0 / 3.0, 1e-16);
  EXPECT_EQ(kv.get_int("n"), 12);
  EXPECT_EQ(kv.get_bool("flag"), true);
  EXPECT_THROW(kv.get_double("bad"), ModelError);
  EXPECT_THROW(kv.get_int("r"), ModelError);
}

TEST(KeyValue, MalformedLine) {
  EXPECT_THROW(KeyValueFile::parse("no equals sign\n"), ModelError);
  EXPECT_THROW(KeyValueFile::parse(" = value\n"), ModelError);
}

TEST(ParseNumber, Forms) {
  EXPECT_DOUBLE_EQ(parse_number("2.5"), 2.5);
  EXPECT_DOUBLE_EQ(parse_number("-3/4"), -0.75);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_THROW(parse_number("1/0"), ModelError);
  EXPECT_THROW(parse_number("abc"), ModelError);
}

TEST(OperatorExpression, PaulisAndProducts) {
  const SpinRegister reg(3);
  const Operator a = parse_operator_expression("0.5 Z1 Z2 + X3", reg);
  const Matrix expected = 0.5 * (site_pauli(reg, 1, Axis::z) * site_pauli(reg, 2, Axis::z)).matrix() +
                          site_pauli(reg, 3, Axis::x).matrix();
  EXPECT_LT(max_abs(a.matrix() - expected), 1e-15);
  const Operator b = parse_operator_expression("X1*Y2 - 2 I", reg);
  const Matrix eb = (site_pauli(reg, 1, Axis::x) * site_pauli(reg, 2, Axis::y)).matrix() -
                    2.0 * Matrix::Identity(8, 8);
  EXPECT_LT(max_abs(b.matrix() - eb), 1e-15);
}

TEST(OperatorExpression, CollectiveAndExponential) {
  const SpinRegister reg(3);
  EXPECT_LT(max_abs(parse_operator_expression("Sx", reg).matrix() - collective_spin(reg, Axis::x).matrix()),
            1e-15);
  EXPECT_LT(max_abs(parse_operator_expression("Sm", reg).matrix() - collective_lowering(reg).matrix()),
            1e-15);
  const Matrix u = parse_operator_expression("expi(1, Sy)", reg).matrix();
  EXPECT_LT(max_abs(u - expm(kI * collective_spin(reg, Axis::y).matrix())), 1e-14);
  const Matrix g = parse_operator_expression("2 (X1 + Z1)", reg).matrix();
  EXPECT_LT(max_abs(g - 2.0 * (site_pauli(reg, 1, Axis::x) + site_pauli(reg, 1, Axis::z)).matrix()),
            1e-15);
}

TEST(OperatorExpression, Errors) {
  const SpinRegister reg(2);
  EXPECT_THROW(parse_operator_expression("X3", reg), ModelError);
  EXPECT_THROW(parse_operator_expression("Q1", reg), ModelError);
  EXPECT_THROW(parse_operator_expression("(X1", reg), ModelError);
  EXPECT_THROW(parse_operator_expression("", reg), ModelError);
}

TEST(ModelFile, Dfs4EquivalentToBuilder) {
  const auto kv = KeyValueFile::parse(
      "sites = 4\n"
      "lindblad = 1 : Sx\nlindblad = 1 : Sy\nlindblad = 1 : Sz\n"
      "perturbation = 3/2 Z1 Z2 + 3/2 Z2 Z3 + I\n"
      "strength = 1\nscale = 100\n");
  const LiouvillianModel parsed = parse_model(kv);
  LiouvillianModel built = dfs4_model(Axis::x);
  built.scale = 100.0;
  const AssembledModel a = assemble(parsed), b = assemble(built);
  EXPECT_LT(max_abs(a.l_t.matrix() - b.l_t.matrix()), 1e-13);
}

TEST(ModelFile, KrausModelEquivalentToBuilder) {
  const auto kv = KeyValueFile::parse(
      "sites = 3\n"
      "kraus = 1/3 : expi(1, Sx)\nkraus = 1/3 : expi(1, Sy)\nkraus = 1/3 : expi(1, Sz)\n"
      "perturbation = X1 X2\n");
  const AssembledModel a = assemble(parse_model(kv)), b = assemble(ns3_model());
  EXPECT_LT(max_abs(a.l_t.matrix() - b.l_t.matrix()), 1e-13);
}

TEST(ModelFile, RejectsUnknownKeysAndMissingSites) {
  EXPECT_THROW(parse_model(KeyValueFile::parse("sites = 1\nfoo = 2\n")), ModelError);
  EXPECT_THROW(parse_model(KeyValueFile::parse("hamiltonian = Z1\n")), ModelError);
  EXPECT_THROW(parse_model(KeyValueFile::parse("sites = 1\nlindblad = Z1\n")), ModelError);
  EXPECT_THROW(parse_model(KeyValueFile::parse("sites = 1\nhamiltonian = Y1 X1\n")), ModelError);
}

}  // namespace
}  // namespace ssmdyn
