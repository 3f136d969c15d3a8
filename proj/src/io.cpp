#include "netex/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "netex/frontier.hpp"
#include "json.hpp"

namespace netex {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

[[noreturn]] void fail(const std::string& message, const std::string& path) {
  throw ParseError(message + " at " + path, path);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) fail("unknown field '" + key + "'", path + "/" + key);
  }
}

const json& require(const json& obj, const std::string& path,
                    const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(std::string("missing field '") + key + "'", path);
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail("expected a string", path);
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail("expected a number", path);
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail("expected an integer", path);
  return v.get<int>();
}

Side parse_side(const std::string& s, const std::string& path) {
  if (s == "buyer") return Side::Buyer;
  if (s == "seller") return Side::Seller;
  fail("side must be 'buyer' or 'seller', got '" + s + "'", path);
}

UtilitySpec parse_utility(const json& u, const std::string& path) {
  check_keys(u, path, {"family", "params"});
  const std::string family = as_string(require(u, path, "family"), path);
  const json& params = require(u, path, "params");
  const std::string ppath = path + "/params";
  UtilitySpec spec;
  if (family == "additive_power") {
    check_keys(params, ppath, {"alpha", "beta", "c"});
    spec = AdditivePower{as_number(require(params, ppath, "alpha"), ppath),
                         as_number(require(params, ppath, "beta"), ppath),
                         as_number(require(params, ppath, "c"), ppath)};
  } else if (family == "shifted_cobb_douglas") {
    check_keys(params, ppath, {"a", "b", "theta"});
    spec = ShiftedCobbDouglas{as_number(require(params, ppath, "a"), ppath),
                              as_number(require(params, ppath, "b"), ppath),
                              as_number(require(params, ppath, "theta"), ppath)};
  } else if (family == "ces") {
    check_keys(params, ppath, {"rho", "w"});
    spec = Ces{as_number(require(params, ppath, "rho"), ppath),
               as_number(require(params, ppath, "w"), ppath)};
  } else {
    fail("unknown utility family '" + family + "'", path + "/family");
  }
  if (auto err = spec_error(spec))
    fail("parameter out of range: " + *err, ppath);
  return spec;
}

json utility_to_json(const UtilitySpec& spec) {
  json params;
  if (const auto* ap = std::get_if<AdditivePower>(&spec)) {
    params = {{"alpha", ap->alpha}, {"beta", ap->beta}, {"c", ap->c}};
  } else if (const auto* cd = std::get_if<ShiftedCobbDouglas>(&spec)) {
    params = {{"a", cd->a}, {"b", cd->b}, {"theta", cd->theta}};
  } else {
    const auto& ces = std::get<Ces>(spec);
    params = {{"rho", ces.rho}, {"w", ces.w}};
  }
  return {{"family", family_name(spec)}, {"params", params}};
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("syntax error: " + std::string(e.what()), "", line);
  }
}

double u01(std::mt19937_64& rng) {
  // Fixed bit-to-double mapping; identical draws on every platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double in_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

std::string padded_id(const char* prefix, int k, int count) {
  int width = 1;
  for (int c = count; c >= 10; c /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, k + 1);
  return buf;
}

UtilitySpec draw_family(std::mt19937_64& rng,
                        const std::vector<std::string>& families) {
  const std::size_t idx = std::min(
      families.size() - 1,
      static_cast<std::size_t>(u01(rng) * static_cast<double>(families.size())));
  const std::string& token = families[idx];
  if (token == "additive_power" || token == "canonical-sqrt") {
    if (token == "canonical-sqrt") return AdditivePower{0.5, 0.5, 1.0};
    return AdditivePower{in_range(rng, 0.3, 0.9), in_range(rng, 0.3, 0.9),
                         in_range(rng, 0.5, 2.0)};
  }
  if (token == "shifted_cobb_douglas") {
    return ShiftedCobbDouglas{in_range(rng, 0.2, 2.0), in_range(rng, 0.2, 2.0),
                              in_range(rng, 0.25, 0.75)};
  }
  if (token == "ces")
    return Ces{in_range(rng, 0.2, 0.8), in_range(rng, 0.3, 0.7)};
  throw std::invalid_argument("generate_instance: unknown family token '" +
                              token + "'");
}

bool edge_supports_trade(const EdgeSpec& edge, const Actor& buyer,
                         const Actor& seller, const NumericConfig& num) {
  FrontierMap fm(edge, PayoffFn(buyer.utility, buyer.endowment),
                 PayoffFn(seller.utility, seller.endowment), num);
  const PayoffBounds& rx = fm.bounds(ExchangeSet::RX);
  return rx.v_max_i > num.degenerate_tol && rx.v_max_j > num.degenerate_tol;
}

}  // namespace

void SolverOverrides::apply(SolverConfig& config) const {
  if (propose_side) config.propose_side = *propose_side;
  if (step) config.step = *step;
  if (max_rounds) config.max_rounds = *max_rounds;
  if (max_retries) config.max_retries = *max_retries;
  if (tol) config.tol = *tol;
}

InstanceDocument parse_instance_document(const std::string& text,
                                         ValidationReport* report) {
  const json doc = parse_document(text);
  if (!doc.is_object()) fail("document must be an object", "");
  check_keys(doc, "", {"version", "actors", "edges", "solver", "tolerances"});
  const std::string version =
      as_string(require(doc, "", "version"), "/version");
  if (version != kInstanceVersion)
    fail("unsupported version '" + version + "'", "/version");

  std::vector<Actor> actors;
  const json& ja = require(doc, "", "actors");
  if (!ja.is_array()) fail("expected an array", "/actors");
  for (std::size_t k = 0; k < ja.size(); ++k) {
    const std::string path = "/actors/" + std::to_string(k);
    const json& a = ja[k];
    if (!a.is_object()) fail("expected an object", path);
    check_keys(a, path, {"id", "side", "endowment", "utility"});
    Actor actor;
    actor.id = as_string(require(a, path, "id"), path + "/id");
    actor.side = parse_side(as_string(require(a, path, "side"), path + "/side"),
                            path + "/side");
    actor.endowment =
        as_number(require(a, path, "endowment"), path + "/endowment");
    actor.utility = parse_utility(require(a, path, "utility"), path + "/utility");
    actors.push_back(std::move(actor));
  }

  std::vector<EdgeSpec> edges;
  const json& je = require(doc, "", "edges");
  if (!je.is_array()) fail("expected an array", "/edges");
  for (std::size_t k = 0; k < je.size(); ++k) {
    const std::string path = "/edges/" + std::to_string(k);
    const json& e = je[k];
    if (!e.is_object()) fail("expected an object", path);
    check_keys(e, path, {"buyer", "seller", "capacity"});
    edges.push_back(
        EdgeSpec{as_string(require(e, path, "buyer"), path + "/buyer"),
                 as_string(require(e, path, "seller"), path + "/seller"),
                 as_number(require(e, path, "capacity"), path + "/capacity")});
  }

  NumericConfig num;
  if (auto it = doc.find("tolerances"); it != doc.end()) {
    const std::string path = "/tolerances";
    check_keys(*it, path, {"quantity", "value", "stability", "degenerate"});
    if (auto f = it->find("quantity"); f != it->end())
      num.quantity_tol = as_number(*f, path + "/quantity");
    if (auto f = it->find("value"); f != it->end())
      num.value_tol = as_number(*f, path + "/value");
    if (auto f = it->find("stability"); f != it->end())
      num.stability_tol = as_number(*f, path + "/stability");
    if (auto f = it->find("degenerate"); f != it->end())
      num.degenerate_tol = as_number(*f, path + "/degenerate");
  }

  InstanceDocument out;
  if (auto it = doc.find("solver"); it != doc.end()) {
    const std::string path = "/solver";
    check_keys(*it, path,
               {"propose_side", "step", "max_rounds", "max_retries", "tol"});
    if (auto f = it->find("propose_side"); f != it->end())
      out.overrides.propose_side =
          parse_side(as_string(*f, path + "/propose_side"),
                     path + "/propose_side");
    if (auto f = it->find("step"); f != it->end())
      out.overrides.step = as_number(*f, path + "/step");
    if (auto f = it->find("max_rounds"); f != it->end())
      out.overrides.max_rounds = as_int(*f, path + "/max_rounds");
    if (auto f = it->find("max_retries"); f != it->end())
      out.overrides.max_retries = as_int(*f, path + "/max_retries");
    if (auto f = it->find("tol"); f != it->end())
      out.overrides.tol = as_number(*f, path + "/tol");
  }

  out.instance = Instance(std::move(actors), std::move(edges), num);
  ValidationReport local = validate_instance(out.instance);
  if (!local.ok())
    throw ParseError("invalid instance:\n" + local.summary(), "/");
  if (report) *report = std::move(local);
  return out;
}

Instance parse_instance(const std::string& text, ValidationReport* report) {
  return parse_instance_document(text, report).instance;
}

std::string serialize_instance_document(const InstanceDocument& doc) {
  json root;
  root["version"] = kInstanceVersion;
  json actors = json::array();
  for (const auto& a : doc.instance.actors()) {
    actors.push_back({{"id", a.id},
                      {"side", side_name(a.side)},
                      {"endowment", a.endowment},
                      {"utility", utility_to_json(a.utility)}});
  }
  root["actors"] = std::move(actors);
  json edges = json::array();
  for (const auto& e : doc.instance.edges())
    edges.push_back(
        {{"buyer", e.buyer}, {"seller", e.seller}, {"capacity", e.capacity}});
  root["edges"] = std::move(edges);

  const NumericConfig& num = doc.instance.numerics();
  const NumericConfig defaults;
  if (num.quantity_tol != defaults.quantity_tol ||
      num.value_tol != defaults.value_tol ||
      num.stability_tol != defaults.stability_tol ||
      num.degenerate_tol != defaults.degenerate_tol) {
    root["tolerances"] = {{"quantity", num.quantity_tol},
                          {"value", num.value_tol},
                          {"stability", num.stability_tol},
                          {"degenerate", num.degenerate_tol}};
  }

  const SolverOverrides& ov = doc.overrides;
  if (ov.propose_side || ov.step || ov.max_rounds || ov.max_retries || ov.tol) {
    json solver;
    if (ov.propose_side) solver["propose_side"] = side_name(*ov.propose_side);
    if (ov.step) solver["step"] = *ov.step;
    if (ov.max_rounds) solver["max_rounds"] = *ov.max_rounds;
    if (ov.max_retries) solver["max_retries"] = *ov.max_retries;
    if (ov.tol) solver["tol"] = *ov.tol;
    root["solver"] = std::move(solver);
  }
  return root.dump(2) + "\n";
}

std::string serialize_instance(const Instance& instance) {
  InstanceDocument doc;
  doc.instance = instance;
  return serialize_instance_document(doc);
}

Instance generate_instance(const GenParams& params) {
  if (params.n_buyers < 1 || params.n_sellers < 1)
    throw std::invalid_argument("generate_instance: counts must be >= 1");
  if (!(params.edge_density > 0.0 && params.edge_density <= 1.0))
    throw std::invalid_argument("generate_instance: density must be in (0, 1]");
  if (params.families.empty())
    throw std::invalid_argument("generate_instance: no families given");

  const bool canonical = params.families.size() == 1 &&
                         params.families.front() == "canonical-sqrt";
  std::mt19937_64 rng(params.seed);
  NumericConfig num;

  std::vector<Actor> actors;
  for (int k = 0; k < params.n_buyers; ++k) {
    Actor a;
    a.id = padded_id("b", k, params.n_buyers);
    a.side = Side::Buyer;
    a.utility = draw_family(rng, params.families);
    a.endowment = canonical ? 1.0 : in_range(rng, 0.5, 2.0);
    actors.push_back(std::move(a));
  }
  for (int k = 0; k < params.n_sellers; ++k) {
    Actor a;
    a.id = padded_id("s", k, params.n_sellers);
    a.side = Side::Seller;
    a.utility = draw_family(rng, params.families);
    a.endowment = canonical ? 1.0 : in_range(rng, 0.5, 2.0);
    actors.push_back(std::move(a));
  }

  std::vector<EdgeSpec> edges;
  for (int i = 0; i < params.n_buyers; ++i) {
    for (int j = 0; j < params.n_sellers; ++j) {
      if (params.edge_density < 1.0 && u01(rng) >= params.edge_density)
        continue;
      const Actor& buyer = actors[static_cast<std::size_t>(i)];
      const Actor& seller =
          actors[static_cast<std::size_t>(params.n_buyers + j)];
      EdgeSpec edge{buyer.id, seller.id, 1.0};
      bool usable = false;
      // A pair whose preferences admit no mutually beneficial trade stays
      // degenerate at every capacity; redraw a few times, then skip it.
      for (int attempt = 0; attempt < 3 && !usable; ++attempt) {
        edge.capacity =
            canonical ? 1.0
                      : in_range(rng,
                                 0.5 * std::min(buyer.endowment,
                                                seller.endowment),
                                 buyer.endowment + seller.endowment);
        usable = edge_supports_trade(edge, buyer, seller, num);
        if (canonical) break;
      }
      if (usable) edges.push_back(std::move(edge));
    }
  }

  Instance instance(std::move(actors), std::move(edges), num);
  ValidationReport report = validate_instance(instance);
  if (!report.ok())
    throw std::logic_error("generate_instance: produced an invalid instance:\n" +
                           report.summary());
  return instance;
}

std::string export_frontier(const Instance& instance, const FrontierSet& fs,
                            const EdgeKey& edge, int n_samples) {
  return frontier_csv(fs.at(edge), n_samples);
}

std::string instance_digest(const Instance& instance) {
  const std::string bytes = serialize_instance(instance);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string serialize_outcome(const Instance& instance,
                              const StableOutcome& outcome) {
  json root;
  root["version"] = kOutcomeVersion;
  root["instance_digest"] = instance_digest(instance);

  json matching = json::array();
  for (const auto& [key, x] : outcome.matching.matched)
    matching.push_back({{"buyer", key.buyer},
                        {"seller", key.seller},
                        {"buyer_gives", x.buyer_gives},
                        {"seller_gives", x.seller_gives}});
  root["matching"] = std::move(matching);

  root["aspirations"] = json(outcome.aspirations);
  root["payoffs"] = json(outcome.payoffs);

  json certificate;
  certificate["verdict"] =
      outcome.certificate.stable() ? "stable" : "unstable";
  json slacks = json::array();
  for (const auto& s : outcome.certificate.slacks)
    slacks.push_back({{"buyer", s.edge.buyer},
                      {"seller", s.edge.seller},
                      {"slack", s.slack}});
  certificate["edge_slacks"] = std::move(slacks);
  if (outcome.certificate.violation)
    certificate["violation"] = outcome.certificate.describe();
  root["certificate"] = std::move(certificate);

  // Wall time is intentionally absent: outcome files are byte-identical
  // across runs for identical inputs.
  root["solver"] = {{"rounds", outcome.stats.rounds},
                    {"retries", outcome.stats.retries},
                    {"polish_sweeps", outcome.stats.polish_sweeps},
                    {"step", outcome.stats.step_used}};
  return root.dump(2) + "\n";
}

StableOutcome parse_outcome(const Instance& instance,
                            const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) fail("document must be an object", "");
  check_keys(doc, "",
             {"version", "instance_digest", "matching", "aspirations",
              "payoffs", "certificate", "solver"});
  const std::string version =
      as_string(require(doc, "", "version"), "/version");
  if (version != kOutcomeVersion)
    fail("unsupported version '" + version + "'", "/version");
  const std::string digest =
      as_string(require(doc, "", "instance_digest"), "/instance_digest");
  if (digest != instance_digest(instance))
    fail("outcome digest does not match the instance", "/instance_digest");

  StableOutcome outcome;
  const json& jm = require(doc, "", "matching");
  if (!jm.is_array()) fail("expected an array", "/matching");
  for (std::size_t k = 0; k < jm.size(); ++k) {
    const std::string path = "/matching/" + std::to_string(k);
    const json& e = jm[k];
    check_keys(e, path, {"buyer", "seller", "buyer_gives", "seller_gives"});
    const EdgeKey key{as_string(require(e, path, "buyer"), path),
                      as_string(require(e, path, "seller"), path)};
    if (!instance.has_edge(key))
      fail("matched edge " + key.buyer + "," + key.seller +
               " is not in the instance",
           path);
    outcome.matching.matched[key] =
        Exchange{as_number(require(e, path, "buyer_gives"), path),
                 as_number(require(e, path, "seller_gives"), path)};
  }

  for (const auto& [id, v] : require(doc, "", "aspirations").items())
    outcome.aspirations[id] = as_number(v, "/aspirations/" + id);
  for (const auto& [id, v] : require(doc, "", "payoffs").items())
    outcome.payoffs[id] = as_number(v, "/payoffs/" + id);

  const json& jc = require(doc, "", "certificate");
  check_keys(jc, "/certificate", {"verdict", "edge_slacks", "violation"});
  const std::string verdict =
      as_string(require(jc, "/certificate", "verdict"), "/certificate/verdict");
  outcome.certificate.verdict = verdict == "stable"
                                    ? BlockingReport::Verdict::Stable
                                    : BlockingReport::Verdict::Unstable;
  if (auto it = jc.find("edge_slacks"); it != jc.end()) {
    for (const auto& s : *it)
      outcome.certificate.slacks.push_back(
          {{as_string(require(s, "/certificate/edge_slacks", "buyer"), ""),
            as_string(require(s, "/certificate/edge_slacks", "seller"), "")},
           as_number(require(s, "/certificate/edge_slacks", "slack"), "")});
  }

  const json& js = require(doc, "", "solver");
  check_keys(js, "/solver", {"rounds", "retries", "polish_sweeps", "step"});
  outcome.stats.rounds = as_int(require(js, "/solver", "rounds"), "/solver");
  outcome.stats.retries = as_int(require(js, "/solver", "retries"), "/solver");
  outcome.stats.polish_sweeps =
      as_int(require(js, "/solver", "polish_sweeps"), "/solver");
  outcome.stats.step_used = as_number(require(js, "/solver", "step"), "/solver");

  // Rebuild the profile the way the solver constructs it: reciprocal
  // strategies on matched edges, (first neighbor, 0, 0) otherwise.
  for (const auto& actor : instance.actors()) {
    if (auto key = outcome.matching.edge_of(actor.id)) {
      const Exchange& x = outcome.matching.matched.at(*key);
      if (actor.side == Side::Buyer)
        outcome.profile[actor.id] =
            Strategy{key->seller, x.buyer_gives, x.seller_gives};
      else
        outcome.profile[actor.id] =
            Strategy{key->buyer, x.seller_gives, x.buyer_gives};
      continue;
    }
    const auto& nbrs = instance.neighbors(actor.id);
    outcome.profile[actor.id] =
        nbrs.empty() ? Strategy{} : Strategy{nbrs.front(), 0.0, 0.0};
  }
  return outcome;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace netex
