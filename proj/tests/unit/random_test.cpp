// Copyright 2026 The svptta Authors
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

#include "svptta/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

namespace svptta {
namespace {

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  EXPECT_EQ(a, b);
}

TEST(RandomStream, DifferentSeedsDiverge) {
  RandomStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(RandomStream, StateIsKeyAndCounter) {
  RandomStream a(7);
  for (int i = 0; i < 13; ++i) a.normal();
  RandomStream copy(a.key(), a.counter());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.normal(), copy.normal());
}

TEST(RandomStream, ForkDependsOnNameAndLeavesParent) {
  const RandomStream parent(3);
  RandomStream x = parent.fork("alpha");
  RandomStream y = parent.fork("alpha");
  RandomStream z = parent.fork("beta");
  EXPECT_EQ(x, y);
  EXPECT_NE(x.key(), z.key());
  EXPECT_EQ(parent, RandomStream(3));
}

TEST(RandomStream, SplitAdvancesParent) {
  RandomStream parent(5);
  const RandomStream before = parent;
  RandomStream child = parent.split();
  EXPECT_NE(parent, before);
  EXPECT_NE(child.key(), parent.key());
}

TEST(RandomStream, UniformInUnitInterval) {
  RandomStream r(11);
  double total = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    total += u;
  }
  EXPECT_NEAR(total / 100000, 0.5, 0.01);
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(12);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(ss / n, 1.0, 0.02);
}

TEST(RandomStream, BelowCoversRange) {
  RandomStream r(13);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

}  // namespace
}  // namespace svptta
