#include <gtest/gtest.h>

#include "cotaudit/endpoint.hpp"
#include "cotaudit/errors.hpp"

using namespace cotaudit;

TEST(ParseUrl, HttpAndHttps) {
    auto u = parse_url("https://api.example.com/v1");
    EXPECT_EQ(u.scheme, "https");
    EXPECT_EQ(u.host, "api.example.com");
    EXPECT_EQ(u.port, 443);
    EXPECT_EQ(u.path, "/v1");
    auto l = parse_url("http://127.0.0.1:8081");
    EXPECT_EQ(l.port, 8081);
    EXPECT_EQ(l.path, "");
}

TEST(ParseUrl, MockWithLatency) {
    auto m = parse_url("mock:data/mock/x.jsonl?latency_ms=25");
    EXPECT_EQ(m.scheme, "mock");
    EXPECT_EQ(m.path, "data/mock/x.jsonl");
    EXPECT_EQ(m.query, "latency_ms=25");
}

TEST(ParseUrl, Rejects) {
    EXPECT_THROW(parse_url("ftp://x"), ConfigError);
    EXPECT_THROW(parse_url("http://"), ConfigError);
    EXPECT_THROW(parse_url("http://host:notaport/"), ConfigError);
    EXPECT_THROW(parse_url("mock:"), ConfigError);
    EXPECT_THROW(parse_url(""), ConfigError);
}

TEST(Sampling, DefaultsAndValidation) {
    EXPECT_DOUBLE_EQ(default_sampling(Role::Agent).temperature, 0.7);
    EXPECT_DOUBLE_EQ(default_sampling(Role::Critic).temperature, 0.0);
    EXPECT_DOUBLE_EQ(default_sampling(Role::Judge).temperature, 0.0);
    SamplingParams p;
    EXPECT_NO_THROW(validate(p));
    p.temperature = -0.1;
    EXPECT_THROW(validate(p), ConfigError);
    p = {};
    p.top_p = 1.5;
    EXPECT_THROW(validate(p), ConfigError);
    p = {};
    p.max_tokens = 0;
    EXPECT_THROW(validate(p), ConfigError);
}

TEST(Endpoint, ValidateAndKey) {
    ModelEndpoint e{Role::Critic, "http://localhost:9000/v1", "m", "OPENAI_API_KEY", {}};
    EXPECT_NO_THROW(validate(e));
    EXPECT_EQ(e.key(), "http://localhost:9000/v1#m");
    e.auth_env = "sk-live-123";
    EXPECT_THROW(validate(e), ConfigError);
    e.auth_env.clear();
    e.model_name.clear();
    EXPECT_THROW(validate(e), ConfigError);
}

TEST(Role, RoundTrip) {
    for (Role r : {Role::Agent, Role::Critic, Role::Judge}) EXPECT_EQ(parse_role(to_string(r)), r);
    EXPECT_THROW(parse_role("oracle"), ConfigError);
}
