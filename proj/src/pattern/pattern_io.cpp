#include <json.hpp>

#include "msfa/pattern.hpp"

namespace msfa {

using nlohmann::json;

std::string pattern_to_json(const MsfaPattern& pattern) {
    json j;
    j["kind"] = to_string(pattern.kind());
    j["block_size"] = pattern.block_size();
    j["assignment"] = pattern.assignment();
    j["wavelengths_nm"] = pattern.wavelengths();
    return j.dump(2);
}

MsfaPattern pattern_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        return MsfaPattern(pattern_kind_from_string(j.at("kind").get<std::string>()),
                           j.at("block_size").get<std::size_t>(),
                           j.at("assignment").get<std::vector<int>>(),
                           j.at("wavelengths_nm").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed pattern file: ") + e.what());
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid pattern file: ") + e.what());
    }
}

MsfaPattern load_pattern(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return pattern_from_json(std::string(bytes.begin(), bytes.end()));
}

void store_pattern(const MsfaPattern& pattern, const std::filesystem::path& path) {
    const std::string text = pattern_to_json(pattern) + "\n";
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace msfa
