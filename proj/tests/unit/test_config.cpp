// Copyright 2026 The PAPO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "papo/config_file.hpp"
#include "papo/errors.hpp"
#include "papo/types.hpp"

namespace papo {
namespace {

TEST(KeyValueConfig, ParsesSectionsAndComments) {
  const auto c = KeyValueConfig::parse(
      "# header\n[env]\nkind = taxi\ngrid_size = 5\n\n[train]\nseed=7  # trailing\n");
  EXPECT_EQ(c.get("env.kind"), "taxi");
  EXPECT_EQ(c.get_int("env.grid_size", 0), 5);
  EXPECT_EQ(c.get_int("train.seed", 0), 7);
  EXPECT_EQ(c.get_int("train.missing", 11), 11);
  EXPECT_EQ(KeyValueConfig::parse("[t]\nepisodes = 2e5\n").get_int("t.episodes", 0), 200000);
  EXPECT_THROW(c.get("train.missing"), ConfigError);
}

TEST(KeyValueConfig, CanonicalTextRoundTrips) {
  KeyValueConfig c;
  c.set("train.seed", "3");
  c.set("env.kind", "crowd");
  c.set("env.grid_size", "20");
  const std::string text = c.to_string();
  EXPECT_LT(text.find("[env]"), text.find("[train]"));
  const auto back = KeyValueConfig::parse(text);
  EXPECT_EQ(back.entries(), c.entries());
  EXPECT_EQ(back.to_string(), text);
}

TEST(KeyValueConfig, MergeOverrides) {
  KeyValueConfig a = KeyValueConfig::parse("[x]\na = 1\nb = 2\n");
  a.merge(KeyValueConfig::parse("[x]\nb = 3\nc = 4\n"));
  EXPECT_EQ(a.get("x.a"), "1");
  EXPECT_EQ(a.get("x.b"), "3");
  EXPECT_EQ(a.get("x.c"), "4");
}

TEST(KeyValueConfig, TypedGettersRejectGarbage) {
  const auto c = KeyValueConfig::parse("[a]\ni = 1.5\nd = abc\nb = maybe\n");
  EXPECT_THROW(c.get_int("a.i", 0), ConfigError);
  EXPECT_THROW(c.get_double("a.d", 0.0), ConfigError);
  EXPECT_THROW(c.get_bool("a.b", false), ConfigError);
}

TEST(IntList, RangesAndItems) {
  EXPECT_EQ(parse_int_list("10:50:10"), (std::vector<int>{10, 20, 30, 40, 50}));
  EXPECT_EQ(parse_int_list("1:3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_int_list("7, 2,9"), (std::vector<int>{7, 2, 9}));
  EXPECT_EQ(parse_int_list("2:20:2").size(), 10u);
  EXPECT_TRUE(parse_int_list("").empty());
  EXPECT_THROW(parse_int_list("1:5:0"), ConfigError);
  EXPECT_THROW(parse_int_list("x"), ConfigError);
}

TEST(IntList, FormatRoundTripsRandomLists) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> values(uniform_int(rng, 12));
    for (int& v : values) v = uniform_int(rng, 5000) - 100;
    EXPECT_EQ(parse_int_list(format_int_list(values)), values);
  }
}

TEST(FormatDouble, RoundTripsExactly) {
  Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const double mag = std::pow(10.0, uniform01(rng) * 40.0 - 20.0);
    const double x = (uniform01(rng) - 0.5) * mag;
    const std::string s = format_double(x);
    EXPECT_EQ(std::stod(s), x) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(3e-4), "3e-04");
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}

}  // namespace
}  // namespace papo
