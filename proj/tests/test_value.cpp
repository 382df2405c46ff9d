#include <gtest/gtest.h>

#include "arenakit/serialize.hpp"
#include "arenakit/value.hpp"

using namespace arenakit;

TEST(Dtype, NamesRoundTrip) {
  for (Dtype d : {Dtype::F32, Dtype::I64, Dtype::U8})
    EXPECT_EQ(dtype_from_name(dtype_name(d)), d);
  EXPECT_THROW(dtype_from_name("f64"), SchemaError);
}

TEST(Tensor, NumelAndShape) {
  Tensor t = zeros(Dtype::F32, {2, 3, 4});
  EXPECT_EQ(t.numel(), 24);
  EXPECT_EQ(t.byte_size(), 96u);
  EXPECT_EQ(zeros(Dtype::U8, {}).numel(), 1);
  EXPECT_EQ(zeros(Dtype::I64, {0, 5}).numel(), 0);
  EXPECT_THROW(zeros(Dtype::F32, {-1}), UsageError);
}

TEST(Tensor, MakersValidateLength) {
  EXPECT_THROW(make_tensor_f32({2}, {1.f}), UsageError);
  EXPECT_THROW(make_tensor_i64({3}, {1, 2}), UsageError);
  EXPECT_THROW(make_tensor_u8({2, 2}, {1, 2, 3}), UsageError);
  Tensor t = make_tensor_f32({2}, {1.f, 2.f});
  EXPECT_EQ(t.at(1), 2.0);
}

TEST(Tensor, ScalarTensor) {
  Tensor s = scalar_i64(42);
  EXPECT_TRUE(s.shape.empty());
  EXPECT_EQ(s.as<int64_t>()[0], 42);
}

TEST(Tensor, AllFinite) {
  EXPECT_TRUE(make_tensor_f32({2}, {1.f, 2.f}).all_finite());
  EXPECT_FALSE(make_tensor_f32({1}, {std::nanf("")}).all_finite());
  EXPECT_FALSE(make_tensor_f32({1}, {INFINITY}).all_finite());
  EXPECT_TRUE(make_tensor_i64({1}, {7}).all_finite());
}

TEST(Tensor, EqualityIsBitwise) {
  Tensor a = make_tensor_f32({2}, {1.f, 2.f});
  Tensor b = make_tensor_f32({2}, {1.f, 2.f});
  EXPECT_EQ(a, b);
  b.as<float>()[0] = std::nextafterf(1.f, 2.f);
  EXPECT_NE(a, b);
}

TEST(Value, VariantAccessors) {
  EXPECT_TRUE(Value(1.5).is_scalar());
  EXPECT_TRUE(Value("text").is_text());
  EXPECT_TRUE(Value(true).is_flag());
  EXPECT_TRUE(Value(Tree{}).is_tree());
  EXPECT_TRUE(Value(ValueList{}).is_list());
  EXPECT_TRUE(Value(zeros(Dtype::U8, {2})).is_tensor());
  EXPECT_THROW(Value(1.0).text(), std::bad_variant_access);
}

TEST(Value, TreePathAccess) {
  Tree root;
  tree_set(root, {"a", "b", "c"}, Value(3.0));
  auto v = value_get(root, {"a", "b", "c"});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->scalar(), 3.0);
  EXPECT_FALSE(value_get(root, {"a", "x"}));
  EXPECT_FALSE(value_get(root, {"a", "b", "c", "d"}));
  EXPECT_THROW(value_get(root, {}), UsageError);
}

TEST(Value, TreeSetOverwritesLeafWithSubtree) {
  Tree root;
  tree_set(root, {"a"}, Value(1.0));
  tree_set(root, {"a", "b"}, Value(2.0));
  auto v = value_get(root, {"a", "b"});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->scalar(), 2.0);
}

TEST(Serialize, TensorJsonRoundTripAllDtypes) {
  std::vector<Tensor> cases = {
      make_tensor_f32({2, 2}, {0.5f, -1.25f, 3e-7f, 1024.f}),
      make_tensor_i64({3}, {-9, 0, 1LL << 40}),
      make_tensor_u8({2, 1}, {0, 255}),
      scalar_i64(-1),
  };
  for (const Tensor& t : cases) {
    Tensor back = tensor_from_json(tensor_to_json(t));
    EXPECT_EQ(back, t);
  }
}

TEST(Serialize, SummaryFormHasNoData) {
  Tensor t = zeros(Dtype::U8, {100});
  Json j = tensor_to_json_summary(t);
  EXPECT_FALSE(j.contains("data"));
  EXPECT_EQ(j.at("crc32").get<uint32_t>(), crc32_of(t));
  EXPECT_THROW(tensor_from_json(j), SchemaError);
}

TEST(Serialize, ValueJsonRoundTrip) {
  Tree root;
  root["score"] = Value(0.25);
  root["name"] = Value("episode");
  root["flag"] = Value(false);
  root["obs"] = Value(make_tensor_u8({2, 2}, {1, 2, 3, 4}));
  root["list"] = Value(ValueList{Value(1.0), Value("two")});
  Value v(root);
  Value back = value_from_json(value_to_json(v));
  EXPECT_EQ(back, v);
}

TEST(Serialize, ActionJsonRoundTrip) {
  Action a;
  a.primitives["pick_0"] = make_tensor_f32({2}, {0.25f, 0.75f});
  a.primitives["place_0"] = make_tensor_f32({2}, {0.5f, 0.5f});
  EXPECT_EQ(action_from_json(action_to_json(a)), a);
}

TEST(Serialize, Crc32MatchesKnownVector) {
  // zlib crc32 of "123456789" is the classic check value
  EXPECT_EQ(crc32_of("123456789", 9), 0xCBF43926u);
}
