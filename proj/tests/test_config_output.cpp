#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <nehari/nehari.hpp>
#include <string>

using namespace nehari;

namespace {

const char* kSample = R"(# demo configuration
[problem]
reaction = atan

[forcing]
constant = 0.3
cos = 1:0.5      # omega:amplitude

[solver]
h = 0.025
tol = 1e-8
seed = 42
eigenvalue = yes

[partition]
L = 20
probes = 3
lengths = 10 20 40
)";

} // namespace

TEST_CASE("config parsing") {
    auto c = Config::parse_text(kSample);
    CHECK(c.get("problem", "reaction", "?") == "atan");
    CHECK(c.get_double("forcing", "constant", 0.0) == 0.3);
    CHECK(c.get("missing", "key", "fallback") == "fallback");
    CHECK(c.has("solver", "h"));
    CHECK_FALSE(c.has("solver", "nope"));
    CHECK(c.require("solver", "tol") == "1e-8");
    CHECK_THROWS_AS(c.require("solver", "nope"), ConfigError);

    CHECK(c.get_int("solver", "seed", 0) == 42);
    CHECK(c.get_bool("solver", "eigenvalue", false));
    const auto lengths = c.get_list("partition", "lengths");
    CHECK(lengths == std::vector<double>{10.0, 20.0, 40.0});
    const auto trig = c.get_trig("forcing", "cos");
    REQUIRE(trig.size() == 1);
    CHECK(trig[0].omega == 1.0);
    CHECK(trig[0].amp == 0.5);
}

TEST_CASE("config rejects malformed input with the line number") {
    CHECK_THROWS_AS(Config::parse_text("key = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[problem\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[s]\njust a token\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[s]\n= 3\n"), ConfigError);
    try {
        Config::parse_text("[s]\nbroken line\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse_file("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("config value conversions are strict") {
    auto c = Config::parse_text("[s]\nx = 2.5\nb = maybe\nw = 1:\nv = abc\n");
    CHECK(c.get_double("s", "x", 0.0) == 2.5);
    CHECK_THROWS_AS(c.get_int("s", "x", 0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("s", "b", true), ConfigError);
    CHECK_THROWS_AS(c.get_double("s", "v", 0.0), ConfigError);
    CHECK_THROWS_AS(c.get_trig("s", "v"), ConfigError); // no colon
    CHECK_THROWS_AS(c.get_trig("s", "w"), ConfigError); // empty amplitude
}

TEST_CASE("canonical text ignores order and comments") {
    auto a = Config::parse_text("[s2]\nb = 2\n[s1]\na = 1\n");
    auto b = Config::parse_text("# new layout\n[s1]\na = 1\n\n[s2]\nb = 2   # same\n");
    CHECK(a.canonical() == "s1.a=1\ns2.b=2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());

    b.set("s1", "a", "7");
    CHECK(a.hash() != b.hash());
    CHECK(a.hash() == fnv1a64(a.canonical()));
}

TEST_CASE("config-driven solver construction") {
    auto c = Config::parse_text(kSample);
    auto g = reaction_from(c);
    CHECK(g.g_plus == Catch::Approx(M_PI / 2.0));
    auto p = forcing_from(c);
    CHECK(p.average == Catch::Approx(0.3));
    CHECK(p.sup_norm == Catch::Approx(0.8).epsilon(1e-6));
    auto so = solver_options_from(c);
    CHECK(so.h_target == 0.025);
    CHECK(so.tol == 1e-8);
    CHECK(so.seed == 42);
    CHECK(so.compute_eigenvalue);
    auto po = partition_options_from(c);
    CHECK(po.L == 20.0);
    CHECK(po.random_probes == 3);
    CHECK(po.inner.h_target == 0.025);

    CHECK(sign_from(c, "run", "sign") == Sign::plus); // default
    c.set("run", "sign", "minus");
    CHECK(sign_from(c, "run", "sign") == Sign::minus);
    c.set("run", "sign", "x");
    CHECK_THROWS_AS(sign_from(c, "run", "sign"), ConfigError);
}

TEST_CASE("double formatting survives a parse round trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e308, 0.0, 12345.6789, 3.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("json rendering is stable and escaped") {
    Json j = Json::object();
    j.set("b", 1);
    j.set("a", Json::array_of({0.5, -3.0}));
    j.set("t", "x\"y\\z\nw\x07");
    j.set("flag", true);
    j.set("nothing", Json());
    j.set("empty", Json::array());

    const std::string expected =
        "{\n"
        "  \"b\": 1,\n"
        "  \"a\": [\n"
        "    0.5,\n"
        "    -3\n"
        "  ],\n"
        "  \"t\": \"x\\\"y\\\\z\\nw\\u0007\",\n"
        "  \"flag\": true,\n"
        "  \"nothing\": null,\n"
        "  \"empty\": []\n"
        "}\n";
    CHECK(j.dump() == expected);
    CHECK(j.dump() == j.dump());
}

TEST_CASE("hashing matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(hash_hex(0x5) == "0000000000000005");
    CHECK(hash_hex(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("text file round trip") {
    const std::string path = "/tmp/nehari_test_roundtrip.txt";
    const std::string body = "line one\nline two\n";
    write_text_file(path, body);
    std::ifstream in(path, std::ios::binary);
    std::string back((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(back == body);
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/file.txt", ""), ConfigError);
}
