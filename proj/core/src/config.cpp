#include "stabreg/config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "stabreg/errors.hpp"
#include "stabreg/stability.hpp"

namespace stabreg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& field,
                       const std::string& what) {
  throw ConfigError(origin + ": " + field + ": " + what);
}

const json& need(const json& obj, const char* key, const std::string& origin,
                 const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(origin, ctx.empty() ? key : ctx + "." + key, "missing field");
  }
  return obj.at(key);
}

template <typename T>
T as(const json& v, const std::string& origin, const std::string& ctx) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    fail(origin, ctx, e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& origin,
        const std::string& ctx) {
  return as<T>(need(obj, key, origin, ctx), origin,
               ctx.empty() ? key : ctx + "." + key);
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& origin,
           const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as<T>(obj.at(key), origin, ctx.empty() ? key : ctx + "." + key);
}

Network parse_network(const json& doc, const std::string& origin) {
  const json& nw = need(doc, "network", origin, "");
  std::vector<int> nodes = field<std::vector<int>>(nw, "nodes", origin, "network");

  std::vector<Link> links;
  for (const json& jl : need(nw, "links", origin, "network")) {
    Link lk;
    lk.id = field<int>(jl, "id", origin, "network.links");
    lk.from = field<int>(jl, "from", origin, "network.links");
    lk.to = field<int>(jl, "to", origin, "network.links");
    lk.length_m = field<double>(jl, "length_m", origin, "network.links");
    lk.lanes = field_or<int>(jl, "lanes", 1, origin, "network.links");
    links.push_back(lk);
  }

  std::vector<Movement> movements;
  for (const json& jm : need(nw, "movements", origin, "network")) {
    Movement mv;
    mv.id = field<int>(jm, "id", origin, "network.movements");
    mv.node = field<int>(jm, "node", origin, "network.movements");
    mv.origin_link = field<int>(jm, "origin_link", origin, "network.movements");
    mv.dest_link = field<int>(jm, "dest_link", origin, "network.movements");
    mv.turn_ratio = field_or<double>(jm, "turn_ratio", 0.0, origin, "network.movements");
    movements.push_back(mv);
  }

  std::vector<std::pair<int, std::vector<std::vector<int>>>> phases;
  for (const json& jp : need(nw, "phases", origin, "network")) {
    phases.emplace_back(
        field<int>(jp, "node", origin, "network.phases"),
        field<std::vector<std::vector<int>>>(jp, "phases", origin, "network.phases"));
  }

  try {
    return build_network(nodes, std::move(links), std::move(movements), phases);
  } catch (const ConfigError& e) {
    fail(origin, "network", e.what());
  }
}

SfrModel parse_sfr(const json& doc, const std::string& origin) {
  SfrModel model;
  for (const json& je : need(doc, "sfr", origin, "")) {
    SfrEntry entry;
    entry.support = field<std::vector<double>>(je, "support", origin, "sfr");
    entry.prob = field<std::vector<double>>(je, "prob", origin, "sfr");
    model.per_movement.push_back(std::move(entry));
  }
  try {
    validate_sfr(model);
  } catch (const ConfigError& e) {
    fail(origin, "sfr", e.what());
  }
  return model;
}

Predictor parse_predictor(const json& doc, const std::string& origin) {
  Predictor pred;
  if (!doc.contains("predictor")) return pred;
  const json& jp = doc.at("predictor");
  pred.theta = field_or<double>(jp, "theta", 1.0, origin, "predictor");
  pred.band = field_or<double>(jp, "band", 1.0, origin, "predictor");
  const std::string guess =
      field_or<std::string>(jp, "guess", "mean_point", origin, "predictor");
  if (guess == "mean_point") {
    pred.guess = GuessStrategy::MeanPoint;
  } else if (guess == "empirical") {
    pred.guess = GuessStrategy::Empirical;
  } else {
    fail(origin, "predictor.guess", "expected mean_point or empirical");
  }
  return pred;
}

DemandSpec parse_demand(const json& doc, const std::string& origin, std::size_t M) {
  DemandSpec d;
  const json& jd = need(doc, "demand", origin, "");
  d.base = field<std::vector<double>>(jd, "base", origin, "demand");
  if (d.base.size() != M) {
    fail(origin, "demand.base", "expected one rate per movement");
  }
  const std::string proc = field_or<std::string>(jd, "process", "poisson", origin, "demand");
  if (proc == "poisson") {
    d.process = ArrivalProcess::Poisson;
  } else if (proc == "deterministic") {
    d.process = ArrivalProcess::Deterministic;
  } else {
    fail(origin, "demand.process", "expected poisson or deterministic");
  }
  d.profile = field_or<std::vector<double>>(jd, "profile", {}, origin, "demand");
  d.profile_segment = field_or<long>(jd, "profile_segment", 0, origin, "demand");
  d.ramp_per_step = field_or<double>(jd, "ramp_per_step", 0.0, origin, "demand");
  d.ramp_period = field_or<long>(jd, "ramp_period", 0, origin, "demand");
  d.ramp_movements =
      field_or<std::vector<int>>(jd, "ramp_movements", {}, origin, "demand");
  return d;
}

ControllerSpec parse_controller(const json& doc, const std::string& origin,
                                const Network& net) {
  ControllerSpec spec;
  if (!doc.contains("controller")) return spec;
  const json& jc = doc.at("controller");
  spec.type = field_or<std::string>(jc, "type", "bp", origin, "controller");
  spec.allow_all_red = field_or<bool>(jc, "allow_all_red", false, origin, "controller");
  if (spec.type == "lescbp") {
    spec.alpha = field_or<double>(jc, "alpha", 0.05, origin, "controller");
    spec.beta = field_or<double>(jc, "beta", 0.1, origin, "controller");
    if (!(spec.alpha > 0) || !(spec.beta > 0)) {
      fail(origin, "controller", "alpha and beta must be positive");
    }
  } else if (spec.type == "fixed") {
    spec.plan.per_node.assign(static_cast<std::size_t>(net.num_nodes()), {});
    spec.plan.offset.assign(static_cast<std::size_t>(net.num_nodes()), 0);
    for (const json& jn : need(jc, "plan", origin, "controller")) {
      const int node_id = field<int>(jn, "node", origin, "controller.plan");
      const int ni = net.index_of_node(node_id);
      if (ni < 0) fail(origin, "controller.plan", "unknown node");
      auto segs = field<std::vector<std::vector<long>>>(jn, "segments", origin,
                                                        "controller.plan");
      for (const auto& seg : segs) {
        if (seg.size() != 2) {
          fail(origin, "controller.plan", "each segment is [phase, intervals]");
        }
        spec.plan.per_node[static_cast<std::size_t>(ni)].push_back(
            {static_cast<int>(seg[0]), seg[1]});
      }
      spec.plan.offset[static_cast<std::size_t>(ni)] =
          field_or<long>(jn, "offset", 0, origin, "controller.plan");
    }
  } else if (spec.type == "sfronly") {
    spec.sfronly_theta = field_or<double>(jc, "theta", -1.0, origin, "controller");
  } else if (spec.type != "bp" && spec.type != "pwbp") {
    fail(origin, "controller.type", "expected bp, pwbp, lescbp, fixed, or sfronly");
  }
  return spec;
}

}  // namespace

ParsedConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": expected a JSON object");

  ParsedConfig out;
  out.raw = text;
  out.schema_version = field_or<int>(doc, "schema_version", 1, origin, "");
  if (out.schema_version != 1) {
    fail(origin, "schema_version", "this build reads schema version 1");
  }

  Scenario& scn = out.scenario;
  scn.net = parse_network(doc, origin);
  scn.model = parse_sfr(doc, origin);
  if (scn.model.per_movement.size() != static_cast<std::size_t>(scn.net.num_movements())) {
    fail(origin, "sfr", "expected one entry per movement");
  }
  scn.pred = parse_predictor(doc, origin);
  scn.demand = parse_demand(doc, origin, scn.model.per_movement.size());

  if (doc.contains("sim")) {
    const json& js = doc.at("sim");
    scn.horizon = field_or<long>(js, "horizon", 1, origin, "sim");
    scn.interval_s = field_or<double>(js, "interval_s", 10.0, origin, "sim");
    scn.jam_spacing_m = field_or<double>(js, "jam_spacing_m", 7.0, origin, "sim");
    scn.unlimited_storage = field_or<bool>(js, "unlimited_storage", false, origin, "sim");
    scn.deterministic_routing =
        field_or<bool>(js, "deterministic_routing", false, origin, "sim");
    scn.seed = field_or<std::uint64_t>(js, "seed", 0, origin, "sim");
  }

  out.controller = parse_controller(doc, origin, scn.net);
  return out;
}

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec,
                                            const Scenario& scn, const Network& net) {
  if (spec.type == "bp") {
    return make_bp(net, {spec.allow_all_red});
  }
  if (spec.type == "pwbp") {
    return make_pwbp(net, {scn.jam_spacing_m, spec.allow_all_red});
  }
  if (spec.type == "lescbp") {
    LescbpOptions opts;
    opts.alpha = spec.alpha;
    opts.beta = spec.beta;
    opts.jam_spacing_m = scn.jam_spacing_m;
    return make_lescbp(net, opts);
  }
  if (spec.type == "fixed") {
    return make_fixed(net, spec.plan);
  }
  if (spec.type == "sfronly") {
    const double theta = spec.sfronly_theta >= 0 ? spec.sfronly_theta : scn.pred.theta;
    const ReserveResult rr = reserve_demand(net, scn.model, scn.demand.base, theta);
    return make_sfr_only(net, scn.model, rr.schedule);
  }
  throw ConfigError("unknown controller type " + spec.type);
}

ControllerFactory controller_factory(const ControllerSpec& spec, const Scenario& scn) {
  if (spec.type == "sfronly") {
    // Solve the reserve program once; every replication shares the schedule.
    const double theta = spec.sfronly_theta >= 0 ? spec.sfronly_theta : scn.pred.theta;
    const ReserveResult rr = reserve_demand(scn.net, scn.model, scn.demand.base, theta);
    return [model = scn.model, sched = rr.schedule](const Network& net) {
      return make_sfr_only(net, model, sched);
    };
  }
  return [spec, scn_copy = scn](const Network& net) {
    return make_controller(spec, scn_copy, net);
  };
}

}  // namespace stabreg
