#include "constants.hpp"

#include "constants_data.hpp"


namespace socketlab {

std::string_view bundled_constants_text() { return detail::kBundledConstants; }

const nlohmann::json& bundled_constants() {
    static const nlohmann::json doc = nlohmann::json::parse(detail::kBundledConstants);
    return doc;
}

std::vector<SpringSpec> bundled_springs() {
    std::vector<SpringSpec> out;
    for (const auto& s : bundled_constants().at("springs")) {
        SpringSpec spec;
        spec.id = s.at("id").get<std::string>();
        spec.coil_diameter = s.at("coil_diameter_m").get<double>();
        spec.wire_diameter = s.at("wire_diameter_m").get<double>();
        spec.free_length = s.at("free_length_m").get<double>();
        spec.coils = s.at("coils").get<double>();
        spec.force_full = s.at("force_n").get<double>();
        out.push_back(std::move(spec));
    }
    return out;
}

OperatingRange bundled_operating_range() {
    const auto& r = bundled_constants().at("spring_operating_range");
    OperatingRange range;
    range.compression = r.at("compression_m").get<double>();
    range.inner = {r.at("inner_conductor_n").at(0).get<double>(), r.at("inner_conductor_n").at(1).get<double>()};
    range.outer = {r.at("outer_conductor_n").at(0).get<double>(), r.at("outer_conductor_n").at(1).get<double>()};
    return range;
}

}  // namespace socketlab
