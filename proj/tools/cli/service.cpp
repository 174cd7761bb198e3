#include "service.hpp"

#include <charconv>

#include "ecfsfdp/serialize.hpp"
#include "httplib.h"
#include "json.hpp"

namespace ecfsfdp::cli {

using nlohmann::json;

DcSpec parse_dc(std::string_view text, std::string_view mode) {
  const bool percent = !text.empty() && text.back() == '%';
  if (percent) text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParameterError("d_c must be a number or a percentage like 2%, got '" +
                         std::string(text) + (percent ? "%'" : "'"));
  DcSpec spec;
  if (!percent) {
    spec = DcSpec::absolute(value);
  } else if (mode == "max-rho") {
    spec = DcSpec::max_rho_percent(value);
  } else if (mode == "avg-neighbor") {
    spec = DcSpec::avg_neighbor_percent(value);
  } else {
    throw ParameterError("d_c mode must be max-rho or avg-neighbor, got '" + std::string(mode) +
                         "'");
  }
  spec.validate();
  return spec;
}

namespace {

// Request body problems: wrong JSON, wrong field types.
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Reply error_reply(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

template <typename T>
std::optional<T> field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw BadRequest(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> unsigned_field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<long long>() < 0)
    throw BadRequest(std::string("field '") + name + "' must be a non-negative integer");
  return it->get<T>();
}

DcSpec dc_field(const json& body, const DcSpec& fallback) {
  auto it = body.find("dc");
  const auto mode = field<std::string>(body, "dc_mode").value_or("max-rho");
  if (it == body.end() || it->is_null()) return fallback;
  if (it->is_string()) return parse_dc(it->get<std::string>(), mode);
  if (it->is_number()) {
    auto spec = DcSpec::absolute(it->get<double>());
    spec.validate();
    return spec;
  }
  throw BadRequest("field 'dc' must be a number or a percentage string");
}

template <typename F>
Reply guarded(F&& body) {
  try {
    return body();
  } catch (const BadRequest& e) {
    return error_reply(400, e.what());
  } catch (const json::exception& e) {
    return error_reply(400, std::string("malformed JSON: ") + e.what());
  } catch (const ParameterError& e) {
    return error_reply(422, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
}

}  // namespace

Service::Service(PointSet points, DcSpec default_dc)
    : session_(std::move(points)), default_dc_(default_dc) {
  default_dc_.validate();
}

Reply Service::points() {
  std::lock_guard lock(mutex_);
  return {200, points_json(session_.points())};
}

Reply Service::decision_graph(const std::optional<std::string>& dc,
                              const std::optional<std::string>& dc_mode) {
  return guarded([&] {
    std::lock_guard lock(mutex_);
    const DcSpec spec = dc ? parse_dc(*dc, dc_mode.value_or("max-rho")) : default_dc_;
    return Reply{200, decision_graph_json(session_.decision(session_.resolve(spec)))};
  });
}

Reply Service::cluster(const std::string& body) { return run(body, true); }

Reply Service::auto_cluster(const std::string& body) { return run(body, false); }

Reply Service::run(const std::string& text, bool explicit_centers) {
  return guarded([&] {
    const json body = json::parse(text);
    if (!body.is_object()) throw BadRequest("request body must be a JSON object");

    RunParams params;
    params.dc = dc_field(body, default_dc_);
    params.n_neighbor = unsigned_field<std::size_t>(body, "n_neighbor").value_or(10);
    params.beta = field<double>(body, "beta").value_or(2.0);
    const auto t_ri = field<double>(body, "t_ri");
    const auto t_rc = field<double>(body, "t_rc");
    if (t_ri.has_value() != t_rc.has_value())
      throw BadRequest("t_ri and t_rc must be given together");
    if (t_ri)
      params.termination = Termination::thresholds(*t_ri, *t_rc);
    else
      params.termination = Termination::target_count(unsigned_field<std::size_t>(body, "k").value_or(2));

    if (explicit_centers) {
      auto it = body.find("centers");
      if (it == body.end() || !it->is_array() || it->empty())
        throw BadRequest("field 'centers' must be a non-empty array of point indices");
      std::vector<std::size_t> centers;
      for (const auto& c : *it) {
        if (!c.is_number_integer() || c.get<long long>() < 0)
          throw BadRequest("field 'centers' must hold non-negative integers");
        centers.push_back(c.get<std::size_t>());
      }
      params.centers.manual = std::move(centers);
    } else {
      auto count = unsigned_field<std::size_t>(body, "count");
      if (!count) throw BadRequest("field 'count' is required");
      params.centers.auto_count = *count;
    }

    std::lock_guard lock(mutex_);
    const auto result = session_.run(params);
    return Reply{200, cluster_response_json(result.trace)};
  });
}

void mount(httplib::Server& server, Service& service) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get("/points", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.points());
  });
  server.Get("/decision-graph", [&service, send](const httplib::Request& req,
                                                 httplib::Response& res) {
    std::optional<std::string> dc, mode;
    if (req.has_param("dc")) dc = req.get_param_value("dc");
    if (req.has_param("dc_mode")) mode = req.get_param_value("dc_mode");
    send(res, service.decision_graph(dc, mode));
  });
  server.Post("/cluster", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.cluster(req.body));
  });
  server.Post("/auto", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.auto_cluster(req.body));
  });
}

}  // namespace ecfsfdp::cli
