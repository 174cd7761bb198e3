#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "ecfsfdp/pipeline.hpp"

namespace httplib {
class Server;
}

namespace ecfsfdp::cli {

/// "5%" is a percentage under `mode` ("max-rho" or "avg-neighbor"); a bare
/// number is an absolute cutoff. Throws ParameterError otherwise.
DcSpec parse_dc(std::string_view text, std::string_view mode = "max-rho");

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// The HTTP endpoints without the transport. Requests are serialized: the
/// session caches one distance matrix and one density profile.
class Service {
 public:
  Service(PointSet points, DcSpec default_dc);

  Reply points();
  Reply decision_graph(const std::optional<std::string>& dc,
                       const std::optional<std::string>& dc_mode);
  /// Body: {"centers": [...], "k", "beta", "n_neighbor", "dc", "dc_mode",
  /// "t_ri", "t_rc"}; only centers is required.
  Reply cluster(const std::string& body);
  /// Same as cluster() but with {"count": n} instead of explicit centers.
  Reply auto_cluster(const std::string& body);

 private:
  Reply run(const std::string& body, bool explicit_centers);

  std::mutex mutex_;
  Session session_;
  DcSpec default_dc_;
};

/// Registers the routes on `server`. The service must outlive it.
void mount(httplib::Server& server, Service& service);

}  // namespace ecfsfdp::cli
