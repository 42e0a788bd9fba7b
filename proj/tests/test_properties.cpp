#include "properties.hpp"

#include <gtest/gtest.h>

TEST(Properties, TreeInvariants) {
  for (int c = 0; c < properties::kCases; ++c) ASSERT_EQ(properties::check_tree(c), "");
}

TEST(Properties, SkeletonNestednessAndIdentityBlock) {
  for (int c = 0; c < properties::kCases; ++c) ASSERT_EQ(properties::check_skeletons(c), "");
}

TEST(Properties, ReportSchema) {
  for (int c = 0; c < properties::kCases; ++c) ASSERT_EQ(properties::check_report_schema(c), "");
}
