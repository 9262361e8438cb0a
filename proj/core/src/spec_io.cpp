#include "algebroid/spec_io.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace algebroid {
namespace {

using Json = nlohmann::ordered_json;

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json& member(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

int read_dim(const Json& dims, const std::string& path, const char* key, int min) {
  const Json& v = member(dims, path, key);
  if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000) {
    throw SchemaError(path + "." + key, "expected an integer >= " + std::to_string(min));
  }
  return v.get<int>();
}

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SchemaError(path, "unknown field '" + it.key() + "'");
  }
}

struct Entry {
  std::vector<int> indices;  // zero-based
  Expr expr;
};

// Reads [{"indices": [...], "expr": "..."}]; `bounds` holds the one-based upper
// bound of each index position.
std::vector<Entry> read_entries(const Json& doc, const char* key, const std::vector<int>& bounds,
                                bool antisymmetric) {
  std::vector<Entry> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  const std::string path = key;
  if (!it->is_array()) throw SchemaError(path, "expected an array");
  std::set<std::vector<int>> seen;
  for (std::size_t e = 0; e < it->size(); ++e) {
    const Json& item = (*it)[e];
    const std::string ip = at(path, e);
    if (!item.is_object()) throw SchemaError(ip, "expected an object");
    reject_unknown(item, ip, {"indices", "expr"});
    const Json& idx = member(item, ip, "indices");
    if (!idx.is_array() || idx.size() != bounds.size()) {
      throw SchemaError(ip + ".indices", "expected " + std::to_string(bounds.size()) + " indices");
    }
    Entry entry;
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      const Json& v = idx[j];
      const std::string jp = at(ip + ".indices", j);
      if (!v.is_number_integer()) throw SchemaError(jp, "expected an integer");
      const long long raw = v.get<long long>();
      if (raw < 1 || raw > bounds[j]) {
        throw SchemaError(jp, "index " + std::to_string(raw) + " outside 1.." +
                                  std::to_string(bounds[j]));
      }
      entry.indices.push_back(static_cast<int>(raw) - 1);
    }
    std::vector<int> key_tuple = entry.indices;
    if (antisymmetric && key_tuple[0] > key_tuple[1]) std::swap(key_tuple[0], key_tuple[1]);
    if (!seen.insert(key_tuple).second) {
      throw SchemaError(ip + ".indices", "duplicate entry for this index tuple");
    }
    const Json& text = member(item, ip, "expr");
    if (!text.is_string()) throw SchemaError(ip + ".expr", "expected a string");
    try {
      entry.expr = parse(text.get<std::string>());
    } catch (Error& err) {
      err.add_context(ip + ".expr");
      throw;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

template <class Fn>
void apply_entries(const std::vector<Entry>& entries, const char* key, Fn&& fn) {
  for (std::size_t e = 0; e < entries.size(); ++e) {
    try {
      fn(entries[e]);
    } catch (Error& err) {
      err.add_context(at(key, e));
      throw;
    }
  }
}

Json entry_json(std::initializer_list<int> zero_based, const Expr& e) {
  Json idx = Json::array();
  for (int i : zero_based) idx.push_back(i + 1);
  Json item = Json::object();
  item["indices"] = std::move(idx);
  item["expr"] = to_string(e);
  return item;
}

Json anchor_json(int rows, int n, const std::function<const Expr&(int, int)>& get) {
  Json arr = Json::array();
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < n; ++i) {
      const Expr& e = get(r, i);
      if (!e.is_zero()) arr.push_back(entry_json({r, i}, e));
    }
  }
  return arr;
}

Json tensor_json(const std::map<Index3, Expr>& entries) {
  Json arr = Json::array();
  for (const auto& [idx, e] : entries) arr.push_back(entry_json({idx[0], idx[1], idx[2]}, e));
  return arr;
}

// Single-line rendering with a space after every separator.
std::string inline_dump(const Json& v) {
  if (v.is_object()) {
    std::string out = "{";
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it != v.begin()) out += ", ";
      out += Json(it.key()).dump() + ": " + inline_dump(*it);
    }
    return out + "}";
  }
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + inline_dump(v[i]);
    return out + "]";
  }
  return v.dump();
}

// Two-space indentation with one line per array element, so entries read as
// {"indices": [1, 2, 3], "expr": "..."} and diffs stay line-oriented.
std::string dump(const Json& doc) {
  std::string out = "{\n";
  std::size_t i = 0;
  for (auto it = doc.begin(); it != doc.end(); ++it, ++i) {
    out += "  " + Json(it.key()).dump() + ": ";
    if (it->is_array() && !it->empty()) {
      out += "[\n";
      for (std::size_t e = 0; e < it->size(); ++e) {
        out += "    " + inline_dump((*it)[e]) + (e + 1 < it->size() ? ",\n" : "\n");
      }
      out += "  ]";
    } else {
      out += inline_dump(*it);
    }
    out += i + 1 < doc.size() ? ",\n" : "\n";
  }
  return out + "}\n";
}

AlgebroidSpec read_algebroid(const Json& doc) {
  reject_unknown(doc, "", {"format", "kind", "dims", "anchor", "structure"});
  const Json& dims = member(doc, "", "dims");
  if (!dims.is_object()) throw SchemaError("dims", "expected an object");
  reject_unknown(dims, "dims", {"n", "k"});
  const int n = read_dim(dims, "dims", "n", 0);
  const int k = read_dim(dims, "dims", "k", 1);
  AlgebroidSpec spec(n, k);
  const auto anchor = read_entries(doc, "anchor", {k, n}, false);
  apply_entries(anchor, "anchor",
                [&](const Entry& e) { spec.set_anchor(e.indices[0], e.indices[1], e.expr); });
  const auto structure = read_entries(doc, "structure", {k, k, k}, false);
  apply_entries(structure, "structure", [&](const Entry& e) {
    spec.set_structure_raw(e.indices[0], e.indices[1], e.indices[2], e.expr);
  });
  return spec;
}

BdcpSpec read_bdcp(const Json& doc) {
  reject_unknown(doc, "", {"format", "kind", "dims", "anchorA", "anchorB", "phi", "zeta", "rho",
                           "sigma", "psi", "theta", "classification"});
  const Json& dims = member(doc, "", "dims");
  if (!dims.is_object()) throw SchemaError("dims", "expected an object");
  reject_unknown(dims, "dims", {"n", "p", "q"});
  const int n = read_dim(dims, "dims", "n", 0);
  const int p = read_dim(dims, "dims", "p", 1);
  const int q = read_dim(dims, "dims", "q", 0);
  if (auto c = doc.find("classification"); c != doc.end() && !c->is_string()) {
    throw SchemaError("classification", "expected a string");
  }
  BdcpSpec b(n, p, q);
  apply_entries(read_entries(doc, "anchorA", {p, n}, false), "anchorA",
                [&](const Entry& e) { b.set_anchor_a(e.indices[0], e.indices[1], e.expr); });
  apply_entries(read_entries(doc, "anchorB", {q, n}, false), "anchorB",
                [&](const Entry& e) { b.set_anchor_b(e.indices[0], e.indices[1], e.expr); });
  for (TensorBlock block : kAllBlocks) {
    SparseTensor& t = b.tensor(block);
    const std::string key(block_name(block));
    const auto& d = t.dims();
    apply_entries(read_entries(doc, key.c_str(), {d[0], d[1], d[2]}, t.antisymmetric()),
                  key.c_str(), [&](const Entry& e) {
                    const Expr& ex = e.expr;
                    if (usage(ex).uses_fiber() || usage(ex).dissipation ||
                        usage(ex).base_count > n) {
                      throw ShapeMismatch("coefficient may only depend on x1..x" +
                                          std::to_string(n));
                    }
                    t.set(e.indices[0], e.indices[1], e.indices[2], ex);
                  });
  }
  return b;
}

}  // namespace

SpecValue parse_spec_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", "invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "document must be a JSON object");
  const Json& format = member(doc, "", "format");
  if (format != "1") throw SchemaError("format", "unsupported format version");
  const Json& kind = member(doc, "", "kind");
  if (kind == "algebroid") return read_algebroid(doc);
  if (kind == "bdcp") return read_bdcp(doc);
  throw SchemaError("kind", "expected \"algebroid\" or \"bdcp\"");
}

std::string spec_document(const AlgebroidSpec& spec) {
  Json doc = Json::object();
  doc["format"] = "1";
  doc["kind"] = "algebroid";
  doc["dims"] = Json{{"n", spec.base_dim()}, {"k", spec.rank()}};
  doc["anchor"] = anchor_json(spec.rank(), spec.base_dim(),
                              [&](int r, int i) -> const Expr& { return spec.anchor(r, i); });
  doc["structure"] = tensor_json(spec.structure_entries());
  return dump(doc);
}

std::string spec_document(const BdcpSpec& b) {
  Json doc = Json::object();
  doc["format"] = "1";
  doc["kind"] = "bdcp";
  doc["dims"] = Json{{"n", b.base_dim()}, {"p", b.p()}, {"q", b.q()}};
  doc["anchorA"] = anchor_json(b.p(), b.base_dim(),
                               [&](int r, int i) -> const Expr& { return b.anchor_a(r, i); });
  doc["anchorB"] = anchor_json(b.q(), b.base_dim(),
                               [&](int r, int i) -> const Expr& { return b.anchor_b(r, i); });
  for (TensorBlock block : kAllBlocks) {
    doc[std::string(block_name(block))] = tensor_json(b.tensor(block).entries());
  }
  doc["classification"] = std::string(level_name(classify(b)));
  return dump(doc);
}

std::string spec_document(const SpecValue& spec) {
  return std::visit([](const auto& s) { return spec_document(s); }, spec);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::schema, "cannot open '" + path.string() + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::schema, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCategory::schema, "failed writing '" + path.string() + "'");
}

SpecValue load_spec(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_spec_document(text);
  } catch (Error& err) {
    err.add_context(path.string());
    throw;
  }
}

void save_spec(const SpecValue& spec, const std::filesystem::path& path) {
  write_text_file(path, spec_document(spec));
}

std::string report_json(const ResidualReport& report) {
  Json doc = Json::object();
  doc["pass"] = report.pass();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json item = Json::object();
    item["name"] = c.name;
    item["max_residual"] = c.max_residual;
    item["tolerance"] = c.tolerance;
    item["pass"] = c.pass;
    item["point_index"] = c.point_index;
    item["point"] = c.point;
    Json idx = Json::array();
    for (int i : c.indices) idx.push_back(i + 1);
    item["indices"] = std::move(idx);
    checks.push_back(std::move(item));
  }
  doc["checks"] = std::move(checks);
  if (report.nonzero_blocks) {
    Json blocks = Json::array();
    for (TensorBlock b : *report.nonzero_blocks) blocks.push_back(std::string(block_name(b)));
    doc["nonzero_blocks"] = std::move(blocks);
  }
  return doc.dump(2) + "\n";
}

bool monitor_pass(const MonitorReport& report, const MonitorTolerances& tol) {
  if (!is_dissipative(report.kind) && report.energy_drift > tol.energy) return false;
  if (report.dissipation_residual && *report.dissipation_residual > tol.dissipation) return false;
  for (double d : report.casimir_drift) {
    if (d > tol.casimir) return false;
  }
  return true;
}

std::string monitor_json(const MonitorReport& report, const MonitorTolerances& tol) {
  Json doc = Json::object();
  doc["pass"] = monitor_pass(report, tol);
  doc["dynamics"] = std::string(dynamics_name(report.kind));
  doc["samples"] = report.samples;
  doc["energy_drift"] = report.energy_drift;
  if (!is_dissipative(report.kind)) doc["energy_tolerance"] = tol.energy;
  if (report.dissipation_residual) {
    doc["dissipation_residual"] = *report.dissipation_residual;
    doc["dissipation_tolerance"] = tol.dissipation;
  }
  doc["casimir_drift"] = report.casimir_drift;
  doc["casimir_tolerance"] = tol.casimir;
  return doc.dump(2) + "\n";
}

}  // namespace algebroid
