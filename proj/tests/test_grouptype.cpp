#include <gtest/gtest.h>

#include <functional>

#include "clchain/grouptype.hpp"

using namespace clchain;

namespace {

GroupType T(const char* s) { return GroupType::parse(s); }

// Partition counts by the plain "largest part at most k" recursion.
long partitions_bounded(int n, int k) {
  if (n == 0) return 1;
  if (k == 0) return 0;
  long total = 0;
  for (int first = 1; first <= std::min(n, k); ++first) total += partitions_bounded(n - first, first);
  return total;
}

}  // namespace

TEST(GroupType, MakeSortsAndDropsZeros) {
  EXPECT_EQ(GroupType::make({1, 2}).str(), "2,1");
  EXPECT_TRUE(GroupType::make(std::vector<int>{}).is_trivial());
  EXPECT_EQ(GroupType::make(std::vector<int>{}).order_exp(), 0);
  EXPECT_EQ(GroupType::make({3, 1, 1}).order_exp(), 5);
  EXPECT_EQ(GroupType::make({0, 2, 0}), T("2"));
  EXPECT_THROW(GroupType::make({2, -1}), InvalidPartition);
}

TEST(GroupType, ParseAndPrint) {
  EXPECT_EQ(T("0"), GroupType());
  EXPECT_EQ(T(""), GroupType());
  EXPECT_EQ(GroupType().str(), "0");
  EXPECT_EQ(T("1,2").str(), "2,1");
  EXPECT_THROW(T("2,x"), std::invalid_argument);
  for (const auto& g : enumerate_window({2, 7})) EXPECT_EQ(T(g.str().c_str()), g);
}

TEST(GroupType, ModuleTypeRoundTrip) {
  const ModuleType h = ModuleType::parse("2,1+Z^1");
  EXPECT_EQ(h.torsion, T("2,1"));
  EXPECT_EQ(h.free_rank, 1);
  EXPECT_EQ(h.str(), "2,1+Z^1");
  EXPECT_EQ(ModuleType::parse("1,1").free_rank, 0);
  EXPECT_EQ(ModuleType::parse(ModuleType{GroupType(), 3}.str()), (ModuleType{GroupType(), 3}));
}

TEST(GroupType, Conjugate) {
  EXPECT_EQ(conjugate(T("2,1")), T("2,1"));
  EXPECT_EQ(conjugate(T("3")), T("1,1,1"));
  EXPECT_EQ(conjugate(GroupType()), GroupType());
  for (const auto& t : enumerate_window({2, 10})) {
    EXPECT_EQ(conjugate(conjugate(t)), t);
    EXPECT_EQ(conjugate(t).order_exp(), t.order_exp());
    EXPECT_EQ(conjugate(t).rank(), t.exponent());
  }
}

TEST(GroupType, SurjectsOnto) {
  EXPECT_TRUE(surjects_onto(T("2,1"), T("1,1")));
  EXPECT_FALSE(surjects_onto(T("2"), T("1,1")));
  EXPECT_TRUE(surjects_onto(T("3,1"), T("3,1")));
  EXPECT_TRUE(surjects_onto(T("1"), GroupType()));
}

TEST(GroupType, SurjectionIsAPartialOrder) {
  const auto ts = enumerate_window({2, 8});
  for (const auto& a : ts) {
    EXPECT_TRUE(surjects_onto(a, a));
    for (const auto& b : ts) {
      if (surjects_onto(a, b) && surjects_onto(b, a)) EXPECT_EQ(a, b);
      if (surjects_onto(a, b) && a.order_exp() == b.order_exp()) EXPECT_EQ(a, b);
      if (surjects_onto(a, b) && a != b) EXPECT_LT(b, a) << "canonical order must extend the quotient order";
    }
  }
  // transitivity on a smaller window keeps the triple loop cheap
  const auto small = enumerate_window({2, 6});
  for (const auto& a : small) {
    for (const auto& b : small) {
      if (!surjects_onto(a, b)) continue;
      for (const auto& c : small) {
        if (surjects_onto(b, c)) EXPECT_TRUE(surjects_onto(a, c));
      }
    }
  }
}

TEST(GroupType, CanonicalOrder) {
  EXPECT_EQ(enumerate_window({2, 0}), std::vector<GroupType>{GroupType()});
  EXPECT_EQ(enumerate_window({2, 2}), (std::vector<GroupType>{GroupType(), T("1"), T("2"), T("1,1")}));
  EXPECT_LT(T("3"), T("2,1"));
  EXPECT_LT(T("2,1"), T("1,1,1"));
  EXPECT_LT(T("1,1,1"), T("4"));
  const auto w = enumerate_window({3, 9});
  EXPECT_TRUE(std::is_sorted(w.begin(), w.end()));
}

TEST(GroupType, WindowSizes) {
  EXPECT_EQ(enumerate_window({2, 12}).size(), 272U);
  long expected = 0;
  for (int m = 0; m <= 20; ++m) {
    EXPECT_EQ(partition_count(m), partitions_bounded(m, m)) << m;
    expected += partitions_bounded(m, m);
    EXPECT_EQ(static_cast<long>(enumerate_window({5, m}).size()), expected) << m;
  }
}

TEST(GroupType, Downset) {
  EXPECT_EQ(downset(T("1")), (std::vector<GroupType>{GroupType(), T("1")}));
  EXPECT_EQ(downset(T("2,1")), (std::vector<GroupType>{GroupType(), T("1"), T("2"), T("1,1"), T("2,1")}));
  EXPECT_EQ(downset(GroupType()), std::vector<GroupType>{GroupType()});
  for (const auto& f : enumerate_window({2, 7})) {
    std::vector<GroupType> brute;
    for (const auto& g : enumerate_window({2, f.order_exp()})) {
      if (surjects_onto(f, g)) brute.push_back(g);
    }
    EXPECT_EQ(downset(f), brute) << f.str();
  }
}

TEST(WindowSpec, Validate) {
  EXPECT_NO_THROW((WindowSpec{3, 4}.validate()));
  EXPECT_THROW((WindowSpec{4, 4}.validate()), std::invalid_argument);
  EXPECT_THROW((WindowSpec{2, -1}.validate()), std::invalid_argument);
  EXPECT_TRUE((WindowSpec{2, 3}.contains(T("2,1"))));
  EXPECT_FALSE((WindowSpec{2, 3}.contains(T("2,2"))));
}
