#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gwpeel/tree.hpp"

namespace gwpeel {

/// Parses one comma-separated preorder degree sequence ("2,0,0"). Whitespace
/// around entries is ignored. Throws std::invalid_argument on malformed text.
std::vector<int> parse_degree_line(std::string_view line);

std::string format_degrees(const Tree& t);
std::string format_degrees(const std::vector<int>& degrees);

/// A line of a multi-tree file: either a tree or the reason it was rejected.
struct TreeLine {
    std::size_t line_number = 0;
    std::optional<Tree> tree;
    std::string error;
};

/// One tree per non-blank line; '#' starts a comment line.
std::vector<TreeLine> read_tree_lines(std::istream& in);

/// A single tree written one integer per line.
Tree read_degree_column(std::istream& in);

/// {"n": .., "nodes": [{"index", "degree", "peel", "leaf_height"}, ...]}
nlohmann::json annotations_to_json(const Tree& t, const NodeAnnotations& a);

}  // namespace gwpeel
