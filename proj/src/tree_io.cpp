#include "gwpeel/tree_io.hpp"

#include <charconv>
#include <istream>
#include <stdexcept>

namespace gwpeel {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

int parse_int(std::string_view token) {
    token = trim(token);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

std::vector<int> parse_degree_line(std::string_view line) {
    std::vector<int> out;
    line = trim(line);
    if (line.empty()) throw std::invalid_argument("empty line");
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(parse_int(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_degrees(const std::vector<int>& degrees) {
    std::string out;
    out.reserve(degrees.size() * 2);
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(degrees[i]);
    }
    return out;
}

std::string format_degrees(const Tree& t) { return format_degrees(t.degrees()); }

std::vector<TreeLine> read_tree_lines(std::istream& in) {
    std::vector<TreeLine> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        TreeLine entry;
        entry.line_number = number;
        try {
            entry.tree = Tree::from_degrees(parse_degree_line(body));
        } catch (const std::invalid_argument& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

Tree read_degree_column(std::istream& in) {
    std::vector<int> degrees;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        degrees.push_back(parse_int(body));
    }
    return Tree::from_degrees(std::move(degrees));
}

nlohmann::json annotations_to_json(const Tree& t, const NodeAnnotations& a) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        nodes.push_back({{"index", i},
                         {"degree", t.degrees()[i]},
                         {"peel", a.peel[i]},
                         {"leaf_height", a.leaf_height[i]}});
    }
    return {{"n", t.size()}, {"nodes", std::move(nodes)}};
}

}  // namespace gwpeel
