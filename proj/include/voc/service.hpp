#pragma once

#include <cstdlib>
#include <regex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "voc/session.hpp"

namespace voc::service {

inline constexpr int kDefaultPort = 8765;
inline constexpr const char* kPortVariable = "VOC_PORT";

/// Port from the environment, or the default.
inline int default_port() {
    if (const char* v = std::getenv(kPortVariable)) {
        try {
            const int p = std::stoi(v);
            if (p > 0 && p < 65536) return p;
        } catch (const std::exception&) {
        }
    }
    return kDefaultPort;
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
    send_json(res, status, nlohmann::json{{"error", kind}, {"message", message}}.dump());
}

inline bool local_origin(const std::string& origin) {
    static const std::regex re(R"(^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$)");
    return std::regex_match(origin, re);
}

/// Maps library exceptions to status codes.
template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const UnsupportedPair& e) {
        send_error(res, 422, "unsupported_pair", e.what());
    } catch (const ConditionViolation& e) {
        send_error(res, 422, "unsupported_complex", e.what());
    } catch (const LookupError& e) {
        send_error(res, 400, "unknown_pair", e.what());
    } catch (const InputError& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const NumericalFailure& e) {
        send_error(res, 500, "numerical_failure", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal_error", e.what());
    }
}

inline int parse_int(const std::string& s, const std::string& name) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InputError("parameter '" + name + "' must be an integer");
    return v;
}

}  // namespace detail

/// Registers the read-only JSON endpoints. `ui_dir`, when non-empty, is
/// served under /ui.
inline void bind(httplib::Server& server, Session& session, const std::string& ui_dir = {}) {
    server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
        const auto origin = req.get_header_value("Origin");
        if (!origin.empty() && detail::local_origin(origin)) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
        }
    });
    server.Options(R"(/.*)", [](const httplib::Request& req, httplib::Response& res) {
        const auto origin = req.get_header_value("Origin");
        if (detail::local_origin(origin)) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        }
        res.status = 204;
    });

    server.Get("/meta", [&session](const httplib::Request&, httplib::Response& res) {
        detail::guarded(res, [&] { detail::send_json(res, 200, session.meta_json()); });
    });
    server.Get("/diagram", [&session](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            if (!req.has_param("degree")) throw InputError("missing 'degree' parameter");
            const int q = detail::parse_int(req.get_param_value("degree"), "degree");
            if (q < 0) throw InputError("degree must be non-negative");
            detail::send_json(res, 200, session.diagram_json(q));
        });
    });
    server.Post("/volume", [&session](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const auto body = nlohmann::json::parse(req.body);
            if (!body.is_object()) throw InputError("body must be a JSON object");
            PairQuery q;
            if (body.contains("death_index")) q.death_index = body.at("death_index").get<Index>();
            if (body.contains("birth_index")) q.birth_index = body.at("birth_index").get<Index>();
            std::optional<double> radius;
            if (body.contains("radius") && !body.at("radius").is_null()) {
                radius = body.at("radius").get<double>();
                if (!(*radius > 0.0)) throw InputError("radius must be positive");
            }
            detail::send_json(res, 200, session.volume_json(q, radius));
        });
    });
    server.Get("/tree", [&session](const httplib::Request&, httplib::Response& res) {
        detail::guarded(res, [&] { detail::send_json(res, 200, session.tree_json()); });
    });
    server.Get("/points", [&session](const httplib::Request&, httplib::Response& res) {
        detail::guarded(res, [&] { detail::send_json(res, 200, session.points_json()); });
    });
    if (!ui_dir.empty()) server.set_mount_point("/ui", ui_dir);
}

}  // namespace voc::service
