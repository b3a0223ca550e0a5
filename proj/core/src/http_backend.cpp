#include <cstdlib>

#include <httplib.h>

#include "cotaudit/errors.hpp"
#include "cotaudit/gateway.hpp"

namespace cotaudit {

HttpBackend::HttpBackend(ModelEndpoint endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), url_(parse_url(endpoint_.base_url)), timeout_(timeout) {
    if (url_.scheme != "http" && url_.scheme != "https") {
        throw ConfigError("HTTP backend needs an http(s) URL, got '" + endpoint_.base_url + "'");
    }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url_.scheme == "https") throw ConfigError("built without TLS support; cannot reach " + endpoint_.base_url);
#endif
}

BackendReply HttpBackend::send(const ChatRequest& request, const CallContext& /*context*/) {
    httplib::Headers headers;
    if (!endpoint_.auth_env.empty()) {
        const char* token = std::getenv(endpoint_.auth_env.c_str());
        if (token == nullptr || *token == '\0') {
            return {-1, {}, "environment variable " + endpoint_.auth_env + " is not set"};
        }
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const std::string origin = url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    const std::string body = to_wire(request).dump();
    auto result = client.Post(url_.path + "/chat/completions", headers, body, "application/json");
    if (!result) return {0, {}, "transport error: " + httplib::to_string(result.error())};

    BackendReply reply;
    reply.status = result->status;
    if (result->status >= 200 && result->status < 300) {
        try {
            reply.content = content_from_wire(result->body);
        } catch (const GatewayError& e) {
            return {-1, {}, e.what()};
        }
    } else {
        reply.error = "HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200);
    }
    return reply;
}

}  // namespace cotaudit
