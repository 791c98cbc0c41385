#pragma once

// Text formats: entropy names, state lists, ensemble files, JSON records and
// sweep CSV files. Every float written out carries 12 significant digits.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpt/entropy.hpp"

namespace gpt::io {

using json = nlohmann::ordered_json;

/// Failure to read or write a file (distinct from malformed content).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// The double nearest to the 12-digit rendering of x.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

inline json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

inline json numbers(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

// ---------------------------------------------------------------------------
// Parsing

/// S1, S2, S3, H, Sq or closed:<registry name>, followed by primes.
inline EntropyFunctional parse_entropy(const std::string& text) {
  std::size_t end = text.size();
  while (end > 0 && text[end - 1] == '\'') --end;
  const std::string head = text.substr(0, end);
  const int depth = static_cast<int>(text.size() - end);
  if (head == "S1") return {EntropyBase::S1, depth, {}};
  if (head == "S2") return {EntropyBase::S2, depth, {}};
  if (head == "S3") return {EntropyBase::S3, depth, {}};
  if (head == "H") return {EntropyBase::Shannon, depth, {}};
  if (head == "Sq") return {EntropyBase::VonNeumann, depth, {}};
  if (head.rfind("closed:", 0) == 0) {
    const std::string name = head.substr(7);
    if (!closed_form_by_name(name)) throw InputError("unknown closed form '" + name + "'");
    return EntropyFunctional::closed(name, depth);
  }
  throw InputError("unknown entropy '" + text + "'");
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v)) throw InputError("not a number: '" + text + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  for (const auto& item : split(text, ',')) v.push_back(parse_double(item));
  if (v.empty()) throw InputError("empty coordinate list");
  return v;
}

/// classical, squared or qubit; the classical alphabet size comes from the
/// coordinate count.
inline Model parse_model(const std::string& name, std::size_t coords) {
  if (name == "squared") return Model::squared();
  if (name == "qubit") return Model::qubit();
  if (name == "classical") return Model::classical(static_cast<int>(coords));
  throw InputError("unknown model '" + name + "'");
}

inline State parse_state(const Model& model, const std::vector<double>& coords) {
  State s(coords);
  require_valid_state(model, s);
  return s;
}

struct EnsembleFile {
  Model model = Model::squared();
  Ensemble ensemble;
};

/// {"model": name, "ensemble": [{"p": weight, "state": [coords]}, ...]}
inline EnsembleFile parse_ensemble(const json& doc) {
  try {
    const std::string name = doc.at("model").get<std::string>();
    const json& members = doc.at("ensemble");
    if (!members.is_array() || members.empty()) throw InputError("ensemble must be a non-empty array");
    Ensemble ens;
    for (const auto& m : members) {
      ens.weights.push_back(m.at("p").get<double>());
      ens.states.emplace_back(m.at("state").get<std::vector<double>>());
    }
    EnsembleFile f{parse_model(name, ens.states.front().size()), {}};
    bool all_pure = true;
    for (const auto& s : ens.states) all_pure = all_pure && s.size() == f.model.dim() && is_pure(f.model, s);
    ens.pure_only = all_pure;
    if (!validate_ensemble(f.model, ens)) throw InputError("ensemble is not valid for the " + name + " model");
    f.ensemble = std::move(ens);
    return f;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ensemble file: ") + e.what());
  }
}

inline EnsembleFile read_ensemble_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_ensemble(doc);
}

// ---------------------------------------------------------------------------
// JSON records

inline json to_json(const Ensemble& ens) {
  json a = json::array();
  for (std::size_t x = 0; x < ens.size(); ++x) {
    a.push_back(json{{"p", number(ens.weights[x])}, {"state", numbers(ens.states[x].coords)}});
  }
  return a;
}

inline json to_json(const Measurement& m) {
  json effects = json::array();
  for (const auto& e : m.effects) effects.push_back(json{{"offset", number(e.offset)}, {"gradient", numbers(e.gradient)}});
  return json{{"label", m.label}, {"effects", std::move(effects)}};
}

inline json certificate_json(const Certificate& c) {
  json j = json::object();
  if (c.ensemble) j["ensemble"] = to_json(*c.ensemble);
  if (c.measurement) j["measurement"] = to_json(*c.measurement);
  if (!c.fg_param.empty()) j["fg_param"] = numbers(c.fg_param);
  if (!c.inner_values.empty()) j["inner_values"] = numbers(c.inner_values);
  return j;
}

inline json budget_json(const EvalResult& r, const EvalConfig& cfg, const Model& model) {
  return json{{"restarts", r.budget.restarts}, {"iters", r.budget.iters}, {"evals", r.budget.evals},
              {"seed", cfg.seed}, {"components", cfg.components(model)}};
}

inline json result_json(const EvalResult& r, const EvalConfig& cfg, const Model& model) {
  json j{{"value", number(r.value)}, {"bound_direction", to_string(r.bound)}, {"method", r.method}};
  if (r.reference) j["reference"] = json{{"name", r.reference_name}, {"value", number(*r.reference)}};
  j["certificate"] = certificate_json(r.certificate);
  j["budget"] = budget_json(r, cfg, model);
  return j;
}

inline json holevo_json(const HolevoReport& rep, const EvalConfig& cfg, const Model& model) {
  return json{{"I_acc", number(rep.accessible)},
              {"induced_entropy", rep.induced_name},
              {"induced_at_mix", number(rep.induced_at_mix)},
              {"average_inner", number(rep.average_inner)},
              {"bound", number(rep.bound)},
              {"gap", number(rep.gap)},
              {"induced_closed", rep.induced_closed},
              {"average_closed", rep.average_closed},
              {"gap_ok", rep.gap_ok},
              {"note", rep.note},
              {"certificate", certificate_json(rep.accessible_result.certificate)},
              {"budget", budget_json(rep.accessible_result, cfg, model)}};
}

// ---------------------------------------------------------------------------
// Sweep CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string csv_text(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV file " + path);
  t.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_double(cell));
    if (row.size() != t.header.size()) throw InputError("ragged CSV row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Grid 0, step, ..., 1; the step must divide 1.
inline std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw InputError("grid step must lie in (0, 1]");
  const long n = std::lround(1.0 / step);
  if (std::abs(static_cast<double>(n) * step - 1.0) > 1e-9) throw InputError("grid step must divide 1");
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(n));
  return g;
}

}  // namespace gpt::io
