#include "jackson/network_io.hpp"

#include <fstream>
#include <sstream>

namespace jackson {

namespace {

using nlohmann::json;

Vector number_array(const json& node, const std::string& where) {
  if (!node.is_array()) throw ParseError("\"" + where + "\" must be an array of numbers");
  Vector out;
  out.reserve(node.size());
  for (std::size_t k = 0; k < node.size(); ++k) {
    if (!node[k].is_number())
      throw ParseError("\"" + where + "\"[" + std::to_string(k) + "] is not a number");
    out.push_back(node[k].get<double>());
  }
  return out;
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

JacksonNetwork network_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("network document must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "lambda" && key != "mu" && key != "P") throw ParseError("unknown key \"" + key + "\"");
  for (const char* key : {"lambda", "mu", "P"})
    if (!doc.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");

  JacksonNetwork net;
  net.lambda = number_array(doc["lambda"], "lambda");
  net.mu = number_array(doc["mu"], "mu");
  const json& p = doc["P"];
  if (!p.is_array()) throw ParseError("\"P\" must be an array of rows");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < p.size(); ++i) rows.push_back(number_array(p[i], "P[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != rows.size())
      throw ParseError("\"P\" must be square: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(rows.size()));
  net.routing = rows.empty() ? Matrix(0, 0) : Matrix::from_rows(rows);
  return net;
}

JacksonNetwork parse_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("JSON syntax error at " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  return network_from_json(doc);
}

JacksonNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  try {
    return parse_network(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json network_to_json(const JacksonNetwork& net) {
  json doc = json::object();
  doc["lambda"] = net.lambda;
  doc["mu"] = net.mu;
  doc["P"] = net.routing.to_rows();
  return doc;
}

std::string format_network(const JacksonNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

}  // namespace jackson
