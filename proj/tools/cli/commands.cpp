#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecfsfdp/evaluate.hpp"
#include "ecfsfdp/pipeline.hpp"
#include "ecfsfdp/serialize.hpp"
#include "httplib.h"
#include "service.hpp"

namespace ecfsfdp::cli {

namespace {

struct InputOptions {
  std::string path;
  std::optional<int> label_column;
  bool header = false;
  std::string delimiter = "auto";

  void add_to(CLI::App& app) {
    app.add_option("-i,--input", path, "Point file, one point per row")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--label-column", label_column,
                   "Column holding ground-truth labels; negative counts from the end");
    app.add_flag("--header", header, "Skip the first non-blank line");
    app.add_option("--delimiter", delimiter, "Field separator")
        ->check(CLI::IsMember({"auto", "comma", "whitespace"}));
  }

  PointSet load() const {
    LoadOptions opts;
    opts.header = header;
    opts.label_column = label_column;
    opts.delimiter = delimiter == "comma"        ? Delimiter::kComma
                     : delimiter == "whitespace" ? Delimiter::kWhitespace
                                                 : Delimiter::kAuto;
    return load_points(path, opts);
  }
};

struct DcOptions {
  std::string dc = "2%";
  std::string mode = "max-rho";

  void add_to(CLI::App& app) {
    app.add_option("--dc", dc, "Cutoff: a percentage such as 2% or an absolute distance")
        ->capture_default_str();
    app.add_option("--dc-mode", mode, "What a percentage cutoff targets")
        ->check(CLI::IsMember({"max-rho", "avg-neighbor"}))
        ->capture_default_str();
  }

  DcSpec spec() const { return parse_dc(dc, mode); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("failed writing " + path);
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.front() == '-')
      throw ParameterError("center list entry '" + item + "' is not an index");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ParameterError("center list is empty");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw ParameterError(std::string("bad ") + what + " '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParameterError(std::string("empty ") + what + " list");
  return out;
}

struct ClusterOptions {
  InputOptions input;
  DcOptions dc;
  std::size_t n_neighbor = 10;
  double beta = 2.0;
  std::size_t clusters = 2;
  std::optional<double> t_ri, t_rc;
  std::optional<std::string> centers;
  std::optional<std::size_t> initial_centers;
  std::optional<std::string> out_labels, out_trace, out_decision;
};

int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
  Session session(o.input.load());
  RunParams params;
  params.dc = o.dc.spec();
  params.n_neighbor = o.n_neighbor;
  params.beta = o.beta;
  if (o.t_ri)
    params.termination = Termination::thresholds(*o.t_ri, *o.t_rc);
  else
    params.termination = Termination::target_count(o.clusters);
  if (o.centers) params.centers.manual = parse_index_list(*o.centers);
  if (o.initial_centers) params.centers.auto_count = *o.initial_centers;

  const auto result = session.run(params);
  const auto& trace = result.trace;

  if (o.out_labels)
    write_file(*o.out_labels, labels_text(trace.final.label));
  else
    out << labels_text(trace.final.label);
  if (o.out_trace) write_file(*o.out_trace, trace_json(trace));
  if (o.out_decision)
    write_file(*o.out_decision, decision_graph_json(session.decision(result.phase_one.dc)));

  const auto& pts = session.points();
  const auto& t = result.timings;
  std::size_t fallbacks = 0;
  for (const auto& s : trace.steps) fallbacks += s.fallback;
  err << "points   " << pts.size() << " (dim " << pts.dim() << ")\n"
      << "dc       " << result.phase_one.dc << " (" << o.dc.dc
      << (o.dc.dc.back() == '%' ? ", " + o.dc.mode : std::string()) << ")\n"
      << "initial  " << result.phase_one.labeling.clusters << " clusters\n"
      << "final    " << trace.final.clusters << " clusters after " << trace.steps.size()
      << " merges\n"
      << "time     distances " << seconds(t.distances) << ", dc " << seconds(t.resolve_dc)
      << ", density " << seconds(t.density) << ", assign " << seconds(t.assign) << ", graph "
      << seconds(t.graph) << ", merge " << seconds(t.merge) << "\n";
  if (pts.has_truth()) {
    const auto report = evaluate(trace.final.label, pts.truth());
    err << "accuracy " << report.accuracy << " (ari " << report.ari << ")\n";
  }
  if (result.phase_one.labeling.root_reassigned)
    err << "warning: the density maximum is not a center; it joined its nearest center\n";
  if (fallbacks)
    err << "warning: " << fallbacks
        << " merge(s) had no connected pair left and joined the closest clusters\n";
  return 0;
}

int cmd_decision_graph(const InputOptions& input, const DcOptions& dc,
                       const std::optional<std::string>& out_path, std::ostream& out) {
  Session session(input.load());
  const auto body = decision_graph_json(session.decision(session.resolve(dc.spec())));
  if (out_path)
    write_file(*out_path, body);
  else
    out << body;
  return 0;
}

std::vector<ClusterId> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_labels(ss.str());
}

struct SweepOptions {
  InputOptions input;
  std::string dc_list = "4%,5%,6%";
  std::string dc_mode = "max-rho";
  std::string nn_list = "5,10,15";
  std::string beta_list = "1,2,3,4,5";
  std::size_t clusters = 2;
  std::optional<std::size_t> initial_centers;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  Session session(o.input.load());
  if (!session.points().has_truth())
    throw ParameterError("sweep needs ground truth; pass --label-column");
  std::vector<std::string> dcs;
  {
    std::stringstream ss(o.dc_list);
    std::string item;
    while (std::getline(ss, item, ',')) dcs.push_back(item);
  }
  const auto nns = parse_list<std::size_t>(o.nn_list, "neighbor count");
  const auto betas = parse_list<double>(o.beta_list, "beta");
  out << "dc,n_neighbor,beta,initial,clusters,accuracy,ari\n";
  for (const auto& dc : dcs) {
    for (auto nn : nns) {
      for (auto beta : betas) {
        RunParams p;
        p.dc = parse_dc(dc, o.dc_mode);
        p.n_neighbor = nn;
        p.beta = beta;
        p.termination = Termination::target_count(o.clusters);
        if (o.initial_centers) p.centers.auto_count = *o.initial_centers;
        const auto r = session.run(p);
        const auto rep = evaluate(r.trace.final.label, session.points().truth());
        out << dc << ',' << nn << ',' << beta << ',' << r.phase_one.labeling.clusters << ','
            << r.trace.final.clusters << ',' << rep.accuracy << ',' << rep.ari << '\n';
      }
    }
  }
  return 0;
}

int cmd_serve(const InputOptions& input, const DcOptions& dc, const std::string& host, int port,
              std::ostream& err) {
  Service service(input.load(), dc.spec());
  httplib::Server server;
  mount(server, service);
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy
  // port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  if (!server.bind_to_port(host, port)) {
    err << "error: cannot listen on " << host << ":" << port << " (port in use?)\n";
    return 1;
  }
  err << "listening on http://" << host << ":" << port << "\n";
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Density-peak clustering with similarity-based sub-cluster merging", "ecfsfdp"};
  app.require_subcommand(1);

  ClusterOptions cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster a point file and write labels");
  cl.input.add_to(*cluster);
  cl.dc.add_to(*cluster);
  cluster->add_option("-n,--k-neighbors", cl.n_neighbor, "Neighbors per point in the graph")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster->add_option("--beta", cl.beta, "Exponent on relative closeness")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* k_opt = cluster->add_option("-k,--clusters", cl.clusters, "Target cluster count")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* tri = cluster->add_option("--t-ri", cl.t_ri, "Stop when no pair has RI above this");
  auto* trc = cluster->add_option("--t-rc", cl.t_rc, "Stop when no pair has RC above this");
  tri->needs(trc);
  trc->needs(tri);
  tri->excludes(k_opt);
  trc->excludes(k_opt);
  auto* centers = cluster->add_option("--centers", cl.centers,
                                      "Comma-separated point indices to use as Phase I centers");
  cluster->add_option("--initial-centers", cl.initial_centers,
                      "Number of top-gamma points to use as Phase I centers")
      ->check(CLI::PositiveNumber)
      ->excludes(centers);
  cluster->add_option("--out-labels", cl.out_labels, "Write labels here instead of stdout");
  cluster->add_option("--out-trace", cl.out_trace, "Write the merge trace as JSON");
  cluster->add_option("--out-decision", cl.out_decision, "Write the decision graph as JSON");

  InputOptions dg_input;
  DcOptions dg_dc;
  std::optional<std::string> dg_out;
  auto* dg = app.add_subcommand("decision-graph", "Export rho, delta and gamma per point");
  dg_input.add_to(*dg);
  dg_dc.add_to(*dg);
  dg->add_option("-o,--out", dg_out, "Output file (default stdout)");

  std::string eval_labels, eval_truth;
  auto* ev = app.add_subcommand("eval", "Compare predicted labels with ground truth");
  ev->add_option("--labels", eval_labels, "Predicted labels, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--truth", eval_truth, "True labels, one per line")
      ->required()
      ->check(CLI::ExistingFile);

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Score a parameter grid against ground truth (CSV)");
  sw.input.add_to(*sweep);
  sweep->add_option("--dc", sw.dc_list, "Comma-separated cutoffs")->capture_default_str();
  sweep->add_option("--dc-mode", sw.dc_mode)
      ->check(CLI::IsMember({"max-rho", "avg-neighbor"}))
      ->capture_default_str();
  sweep->add_option("-n,--k-neighbors", sw.nn_list, "Comma-separated neighbor counts")
      ->capture_default_str();
  sweep->add_option("--beta", sw.beta_list, "Comma-separated beta values")->capture_default_str();
  sweep->add_option("-k,--clusters", sw.clusters)->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--initial-centers", sw.initial_centers)->check(CLI::PositiveNumber);

  InputOptions sv_input;
  DcOptions sv_dc;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the point set over HTTP for the UI");
  sv_input.add_to(*serve);
  sv_dc.add_to(*serve);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cluster) return cmd_cluster(cl, out, err);
    if (*dg) return cmd_decision_graph(dg_input, dg_dc, dg_out, out);
    if (*ev) {
      out << eval_report_json(evaluate(read_labels(eval_labels), read_labels(eval_truth)))
          << "\n";
      return 0;
    }
    if (*sweep) return cmd_sweep(sw, out);
    if (*serve) return cmd_serve(sv_input, sv_dc, host, port, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ecfsfdp::cli
