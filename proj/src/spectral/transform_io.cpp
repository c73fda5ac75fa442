#include <json.hpp>

#include "msfa/spectral.hpp"

namespace msfa {

using nlohmann::json;

std::string transform_to_json(const SpectralTransform& t, const std::optional<MarkovParams>& params) {
    json j;
    j["order"] = t.order();
    j["kind"] = to_string(t.kind());
    json rows = json::array();
    for (std::size_t r = 0; r < t.order(); ++r) {
        std::vector<double> row(t.rows().begin() + static_cast<std::ptrdiff_t>(r * t.order()),
                                t.rows().begin() + static_cast<std::ptrdiff_t>((r + 1) * t.order()));
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["eigenvalues"] = t.eigenvalues();
    if (params) {
        j["params"] = {{"rho_f", params->rho_f},
                       {"rho_d", params->rho_d},
                       {"spectral_step_nm", params->spectral_step_nm}};
    }
    return j.dump(2);
}

SpectralTransform transform_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        const auto order = j.at("order").get<std::size_t>();
        const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
        if (rows.size() != order) throw FormatError("transform file: row count does not match order");
        std::vector<double> flat;
        for (const auto& row : rows) {
            if (row.size() != order) throw FormatError("transform file: row length does not match order");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        std::vector<double> eigenvalues;
        if (j.contains("eigenvalues")) eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        return SpectralTransform(order, std::move(flat), transform_kind_from_string(j.at("kind").get<std::string>()),
                                 std::move(eigenvalues));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed transform file: ") + e.what());
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid transform file: ") + e.what());
    }
}

void store_transform(const SpectralTransform& t, const std::filesystem::path& path,
                     const std::optional<MarkovParams>& params) {
    const std::string text = transform_to_json(t, params) + "\n";
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SpectralTransform load_transform(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return transform_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace msfa
