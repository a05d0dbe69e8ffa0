// YAML system definitions.
//
//   name: lorenz
//   dimension: 3
//   labels: [x, y, z]
//   A: [-10, 10, 0,  28, -1, 0,  0, 0, -8/3]
//   Q:
//     - [0, 0, 0,  0, 0, 0,  0, 0, 0]
//     - [0, 0, -1, 0, 0, 0,  0, 0, 0]
//     - [0, 1, 0,  0, 0, 0,  0, 0, 0]
//
// Matrices may also be written as nested row lists.

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "fgbfi/errors.hpp"
#include "fgbfi/quadsys.hpp"

namespace fgbfi {

namespace {

std::size_t line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

void flatten(const YAML::Node& node, std::vector<YAML::Node>& out, const std::string& field) {
  if (node.IsScalar()) {
    out.push_back(node);
    return;
  }
  if (!node.IsSequence()) throw ParseError("expected a list of numbers", line_of(node), field);
  for (const auto& child : node) flatten(child, out, field);
}

Matrix read_matrix(const Context& ctx, const YAML::Node& node, std::size_t n,
                   const std::string& field) {
  if (!node || !node.IsSequence()) throw ParseError("expected a list", line_of(node), field);
  std::vector<YAML::Node> entries;
  flatten(node, entries, field);
  if (entries.size() != n * n)
    throw ParseError("expected " + std::to_string(n * n) + " entries for a " + std::to_string(n) +
                         "x" + std::to_string(n) + " matrix, got " +
                         std::to_string(entries.size()),
                     line_of(node), field);
  Matrix m(n, ctx.zero());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string text = entries[k].Scalar();
    try {
      m(k / n, k % n) = ctx.parse(text);
    } catch (const ParseError&) {
      throw ParseError("non-numeric entry '" + text + "'", line_of(entries[k]),
                       field + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

}  // namespace

QuadraticSystem load_system(const Context& ctx, std::string_view definition) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(definition));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0, "syntax");
  }
  if (!root.IsMap()) throw ParseError("system definition must be a mapping", line_of(root));

  for (const auto& kv : root) {
    const auto key = kv.first.Scalar();
    if (key != "name" && key != "dimension" && key != "A" && key != "Q" && key != "labels")
      throw ParseError("unknown field", line_of(kv.first), key);
  }
  for (const char* required : {"name", "dimension", "A", "Q"})
    if (!root[required]) throw ParseError("missing required field", 0, required);

  const std::string name = root["name"].Scalar();
  std::size_t n = 0;
  try {
    const long d = root["dimension"].as<long>();
    if (d <= 0) throw ParseError("dimension must be positive", line_of(root["dimension"]), "dimension");
    n = static_cast<std::size_t>(d);
  } catch (const YAML::Exception&) {
    throw ParseError("dimension must be an integer", line_of(root["dimension"]), "dimension");
  }

  Matrix a = read_matrix(ctx, root["A"], n, "A");

  const YAML::Node qnode = root["Q"];
  if (!qnode.IsSequence()) throw ParseError("expected a list of matrices", line_of(qnode), "Q");
  if (qnode.size() != n)
    throw ParseError("expected " + std::to_string(n) + " matrices, got " +
                         std::to_string(qnode.size()),
                     line_of(qnode), "Q");
  std::vector<Matrix> q;
  for (std::size_t p = 0; p < n; ++p)
    q.push_back(read_matrix(ctx, qnode[p], n, "Q" + std::to_string(p + 1)));

  std::vector<std::string> labels;
  if (const auto lnode = root["labels"]) {
    if (!lnode.IsSequence() || lnode.size() != n)
      throw ParseError("expected " + std::to_string(n) + " labels", line_of(lnode), "labels");
    for (const auto& l : lnode) labels.push_back(l.Scalar());
  }
  return QuadraticSystem(name, std::move(a), std::move(q), std::move(labels));
}

QuadraticSystem load_system_file(const Context& ctx, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_system(ctx, buf.str());
}

}  // namespace fgbfi
