#include "rainlane/config_json.hpp"

#include <fstream>
#include <set>
#include <string>

#include "rainlane/error.hpp"

namespace rainlane {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const RcflaneConfig& cfg) {
    json rain = {{"density", cfg.rain.density},         {"streak_length", cfg.rain.streak_length},
                 {"angle_deg", cfg.rain.angle_deg},     {"noise_sigma", cfg.rain.noise_sigma},
                 {"threshold", cfg.rain.threshold},     {"seed", cfg.rain.seed}};
    json mask = {{"gamma", cfg.mask.gamma}, {"mask_value", cfg.mask.mask_value}};
    json fog = {{"lambda", cfg.fog.lambda}, {"atmos_light", cfg.fog.atmos_light}};
    fog["fog_scale"] = cfg.fog.fog_scale ? json(*cfg.fog.fog_scale) : json(nullptr);
    fog["center"] = cfg.fog.center ? json{{"row", cfg.fog.center->row}, {"col", cfg.fog.center->col}} : json(nullptr);
    return json{{"rain", rain}, {"beta", cfg.beta}, {"mask", mask}, {"fog", fog}};
}

RcflaneConfig rcflane_from_json(const json& j, RcflaneConfig cfg) {
    try {
        reject_unknown(j, {"rain", "beta", "mask", "fog"}, "rcflane config");
        if (j.contains("rain")) {
            const json& r = j.at("rain");
            reject_unknown(r, {"density", "streak_length", "angle_deg", "noise_sigma", "threshold", "seed"},
                           "rain config");
            read(r, "density", cfg.rain.density);
            read(r, "streak_length", cfg.rain.streak_length);
            read(r, "angle_deg", cfg.rain.angle_deg);
            read(r, "noise_sigma", cfg.rain.noise_sigma);
            read(r, "threshold", cfg.rain.threshold);
            read(r, "seed", cfg.rain.seed);
        }
        read(j, "beta", cfg.beta);
        if (j.contains("mask")) {
            const json& m = j.at("mask");
            reject_unknown(m, {"gamma", "mask_value"}, "mask config");
            read(m, "gamma", cfg.mask.gamma);
            read(m, "mask_value", cfg.mask.mask_value);
        }
        if (j.contains("fog")) {
            const json& f = j.at("fog");
            reject_unknown(f, {"lambda", "atmos_light", "fog_scale", "center"}, "fog config");
            read(f, "lambda", cfg.fog.lambda);
            read(f, "atmos_light", cfg.fog.atmos_light);
            if (f.contains("fog_scale")) {
                cfg.fog.fog_scale = f.at("fog_scale").is_null()
                                        ? std::nullopt
                                        : std::optional<double>(f.at("fog_scale").get<double>());
            }
            if (f.contains("center")) {
                const json& c = f.at("center");
                if (c.is_null()) {
                    cfg.fog.center.reset();
                } else {
                    cfg.fog.center = PixelCoord{c.at("row").get<int>(), c.at("col").get<int>()};
                }
            }
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed rcflane config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RcflaneConfig load_rcflane_config(const std::filesystem::path& path, RcflaneConfig base) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("cannot parse config '" + path.string() + "': " + e.what());
    }
    return rcflane_from_json(j, base);
}

}  // namespace rainlane
