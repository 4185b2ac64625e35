#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "jackson/network.hpp"

namespace jackson {

/// Malformed network document. The message names the offending key or the
/// line and column of a syntax error.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict reader for {"lambda": [...], "mu": [...], "P": [[...], ...]}.
/// Unknown keys, missing keys and non-numeric entries are rejected. Shape
/// consistency is left to validate_network.
JacksonNetwork parse_network(const std::string& text);
JacksonNetwork network_from_json(const nlohmann::json& doc);
JacksonNetwork load_network(const std::filesystem::path& path);

nlohmann::json network_to_json(const JacksonNetwork& net);
/// Pretty-printed document accepted by parse_network.
std::string format_network(const JacksonNetwork& net);

}  // namespace jackson
