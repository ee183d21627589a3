#include "juliaflow/tree_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "juliaflow/error.hpp"

namespace juliaflow {

namespace {

using json = nlohmann::ordered_json;


json id_json(const VertexId& id) { return json::array({id.level, id.index}); }

json integer_json(const BigInt& v) {
  if (v <= BigInt(std::numeric_limits<long long>::max()) && v >= BigInt(std::numeric_limits<long long>::min())) {
    return v.convert_to<long long>();
  }
  return v.str();
}

BigInt integer_from(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos) {
      throw MalformedDocument("bad integer '" + s + "'");
    }
    return BigInt(s);
  }
  throw MalformedDocument("expected an integer");
}

VertexId id_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw MalformedDocument("vertex id must be [level, index]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw MalformedDocument(std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace

std::string serialize_tree(const TreeWithDynamics& t, const MeasureAssignment* omega, const std::string& poly) {
  json doc;
  doc["degree"] = t.d;
  doc["H"] = t.H;
  doc["max_level"] = t.max_level;
  doc["min_level"] = t.min_level;
  doc["poly"] = poly.empty() ? json(nullptr) : json(poly);
  json vertices = json::array();
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      json jv;
      jv["id"] = id_json(v.id);
      jv["parent"] = v.parent ? id_json(*v.parent) : json(nullptr);
      json children = json::array();
      for (const VertexId& c : v.children) children.push_back(id_json(c));
      jv["children"] = std::move(children);
      jv["deg"] = v.degree;
      jv["image"] = v.image ? id_json(*v.image) : json(nullptr);
      if (omega) {
        const Rational& w = omega->at(v.id);
        jv["omega"] = {{"num", integer_json(numerator(w))}, {"den", integer_json(denominator(w))}};
      } else {
        jv["omega"] = nullptr;
      }
      if (v.plane) jv["sample"] = json::array({v.plane->sample.real(), v.plane->sample.imag()});
      vertices.push_back(std::move(jv));
    }
  }
  // One vertex per line keeps large documents diff-friendly.
  std::string out = "{\n";
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    out += " " + json(it.key()).dump() + ": " + it.value().dump() + ",\n";
  }
  out += " \"vertices\": [\n";
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    out += "  " + vertices[k].dump() + (k + 1 < vertices.size() ? ",\n" : "\n");
  }
  out += " ]\n}\n";
  return out;
}

std::string serialize_tree(const TreeDocument& doc) {
  return serialize_tree(doc.tree, doc.omega ? &*doc.omega : nullptr, doc.poly.value_or(""));
}

TreeDocument parse_tree(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedDocument(std::string("not a valid document: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedDocument("top level must be an object");
  try {
    TreeDocument out;
    TreeWithDynamics& t = out.tree;
    t.d = field(doc, "degree").get<int>();
    t.H = field(doc, "H").get<int>();
    t.max_level = field(doc, "max_level").get<int>();
    if (t.d < 2 || t.H < 1 || t.max_level < 0) throw MalformedDocument("bad degree, H or max_level");
    const json& poly = field(doc, "poly");
    if (poly.is_string()) out.poly = poly.get<std::string>();
    const json& vertices = field(doc, "vertices");
    if (!vertices.is_array() || vertices.empty()) throw MalformedDocument("vertices must be a nonempty list");

    bool any_omega = false, all_omega = true;
    std::map<int, std::vector<Rational>> omega;
    int min_level = std::numeric_limits<int>::max();
    for (const json& jv : vertices) {
      if (!jv.is_object()) throw MalformedDocument("vertex must be an object");
      Vertex v;
      v.id = id_from(field(jv, "id"));
      const json& parent = field(jv, "parent");
      if (!parent.is_null()) v.parent = id_from(parent);
      const json& children = field(jv, "children");
      if (!children.is_array()) throw MalformedDocument("children must be a list");
      for (const json& c : children) v.children.push_back(id_from(c));
      v.degree = field(jv, "deg").get<int>();
      const json& image = field(jv, "image");
      if (!image.is_null()) v.image = id_from(image);
      const json& w = field(jv, "omega");
      if (w.is_null()) {
        all_omega = false;
      } else {
        any_omega = true;
        const BigInt num = integer_from(field(w, "num"));
        const BigInt den = integer_from(field(w, "den"));
        if (den <= 0) throw MalformedDocument("omega denominator must be positive");
        omega[v.id.level].push_back(Rational(num, den));
      }
      if (auto s = jv.find("sample"); s != jv.end()) {
        if (!s->is_array() || s->size() != 2) throw MalformedDocument("sample must be [re, im]");
        v.plane = PlaneRef{{(*s)[0].get<double>(), (*s)[1].get<double>()}, {}};
      }
      std::vector<Vertex>& row = t.levels[v.id.level];
      if (v.id.index != static_cast<int>(row.size())) {
        throw MalformedDocument("vertex " + to_string(v.id) + " out of canonical order");
      }
      min_level = std::min(min_level, v.id.level);
      row.push_back(std::move(v));
    }
    t.min_level = min_level;
    if (auto ml = doc.find("min_level"); ml != doc.end() && ml->get<int>() != min_level) {
      throw MalformedDocument("min_level does not match the vertex list");
    }
    int expect = min_level;
    for (const auto& [l, row] : t.levels) {
      if (l != expect++) throw MalformedDocument("levels are not contiguous");
    }
    if (t.levels.rbegin()->first != t.max_level) throw MalformedDocument("max_level does not match vertices");
    if (!t.contains(t.root())) throw MalformedDocument("root vertex (0,0) missing");
    for (const auto& [l, row] : t.levels) {
      for (const Vertex& v : row) {
        if (v.parent && !t.contains(*v.parent)) throw MalformedDocument("dangling parent at " + to_string(v.id));
        if (v.image && !t.contains(*v.image)) throw MalformedDocument("dangling image at " + to_string(v.id));
        for (const VertexId& c : v.children) {
          if (!t.contains(c)) throw MalformedDocument("dangling child at " + to_string(v.id));
        }
      }
    }
    if (any_omega && !all_omega) throw MalformedDocument("omega present on some vertices only");
    if (any_omega) {
      MeasureAssignment m;
      m.d = t.d;
      m.H = t.H;
      m.omega = std::move(omega);
      out.omega = std::move(m);
    }
    return out;
  } catch (const json::exception& e) {
    throw MalformedDocument(std::string("bad field type: ") + e.what());
  }
}

TreeDocument read_tree_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedDocument("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_tree(buffer.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("write failed for " + path);
}

}  // namespace juliaflow
