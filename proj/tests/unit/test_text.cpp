#include <doctest.h>

#include "cha/text.hpp"

using cha::Json;

TEST_SUITE("text") {
  TEST_CASE("trim and collapse") {
    CHECK(cha::trim("  a b \n") == "a b");
    CHECK(cha::trim("   ").empty());
    CHECK(cha::collapse_whitespace(" a \t\n b  c ") == "a b c");
  }

  TEST_CASE("split_lines keeps empty interior lines") {
    const auto lines = cha::split_lines("a\n\nb");
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].empty());
    CHECK(lines[2] == "b");
  }

  TEST_CASE("fnv1a64 reference vectors") {
    // Published FNV-1a 64-bit test vectors.
    CHECK(cha::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(cha::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(cha::fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(cha::hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("base64 matches RFC 4648 examples") {
    CHECK(cha::base64_encode("") == "");
    CHECK(cha::base64_encode("f") == "Zg==");
    CHECK(cha::base64_encode("fo") == "Zm8=");
    CHECK(cha::base64_encode("foobar") == "Zm9vYmFy");
  }

  TEST_CASE("render_value prints like a Python repr") {
    CHECK(cha::render_value(Json{{"url", "http://google.com"}}) == "{'url': 'http://google.com'}");
    CHECK(cha::render_value(Json::array({"a", 1, true, nullptr})) == "['a', 1, True, None]");
    CHECK(cha::render_value(Json("plain")) == "plain");
    CHECK(cha::render_value_quoted(Json("plain")) == "'plain'");
  }
}
