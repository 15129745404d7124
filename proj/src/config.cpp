#include "prohoi/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prohoi/errors.hpp"

namespace prohoi {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "': expected a number, got '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        return std::stol(value);
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "': expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config field '" + key + "': expected true/false, got '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
    std::string body = value;
    if (!body.empty() && body.front() == '[') body = body.substr(1, body.size() - 2);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream ss(body);
    Vec3 v;
    if (!(ss >> v.x() >> v.y() >> v.z()))
        throw ConfigError("config field '" + key + "': expected three numbers");
    return v;
}

std::string strip_quotes(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double positive(const std::string& key, double v) {
    if (v <= 0.0) throw ConfigError("config field '" + key + "' must be positive");
    return v;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    for (const auto& [key, value] : j.items()) {
        std::string full = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_json(value, full, out);
        } else if (value.is_string()) {
            out[full] = value.get<std::string>();
        } else {
            out[full] = value.dump();
        }
    }
}

}  // namespace

const VelocityLimits& Config::profile(const std::string& name) const {
    auto it = profiles.find(name);
    if (it == profiles.end()) throw ConfigError("unknown velocity profile: " + name);
    return it->second;
}

SafetyRegion Config::monitor_region() const {
    SafetyRegion r = safety_region;
    r.center.z() += monitor_center_z;
    return r;
}

Config Config::from_key_values(const std::map<std::string, std::string>& kv) {
    Config cfg;
    using Setter = std::function<void(Config&, const std::string&, const std::string&)>;
    auto d = [](double Config::* member) {
        return Setter([member](Config& c, const std::string& k, const std::string& v) {
            c.*member = parse_double(k, v);
        });
    };
    auto v3 = [](Vec3 Config::* member) {
        return Setter([member](Config& c, const std::string& k, const std::string& v) {
            c.*member = parse_vec3(k, v);
        });
    };
    auto s = [](std::string Config::* member) {
        return Setter([member](Config& c, const std::string&, const std::string& v) {
            c.*member = strip_quotes(v);
        });
    };
    auto profile_v = [](const char* name) {
        return Setter([name](Config& c, const std::string& k, const std::string& v) {
            c.profiles[name].v_max = positive(k, parse_double(k, v));
        });
    };
    auto profile_w = [](const char* name) {
        return Setter([name](Config& c, const std::string& k, const std::string& v) {
            c.profiles[name].omega_max = positive(k, parse_double(k, v));
        });
    };

    static const std::map<std::string, Setter> setters = {
        {"h_stand", d(&Config::h_stand)},
        {"dt", d(&Config::dt)},
        {"default_profile", s(&Config::default_profile)},
        {"profiles.slow.v", profile_v("slow")},
        {"profiles.slow.omega", profile_w("slow")},
        {"profiles.middle.v", profile_v("middle")},
        {"profiles.middle.omega", profile_w("middle")},
        {"profiles.fast.v", profile_v("fast")},
        {"profiles.fast.omega", profile_w("fast")},
        {"retrieval.w_t",
         [](Config& c, const std::string& k, const std::string& v) { c.retrieval.w_t = parse_double(k, v); }},
        {"retrieval.w_r",
         [](Config& c, const std::string& k, const std::string& v) { c.retrieval.w_r = parse_double(k, v); }},
        {"retrieval.yaw_only",
         [](Config& c, const std::string& k, const std::string& v) {
             c.retrieval.yaw_only_rotation = parse_bool(k, v);
         }},
        {"safety_region.center",
         [](Config& c, const std::string& k, const std::string& v) {
             c.safety_region.center = parse_vec3(k, v);
         }},
        {"safety_region.half_extents",
         [](Config& c, const std::string& k, const std::string& v) {
             c.safety_region.half_extents = parse_vec3(k, v);
         }},
        {"monitor.center_z", d(&Config::monitor_center_z)},
        {"monitor.window",
         [](Config& c, const std::string& k, const std::string& v) {
             c.monitor_window = static_cast<int>(parse_long(k, v));
         }},
        {"twin.gravity",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.gravity = parse_double(k, v); }},
        {"twin.restitution",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.restitution = parse_double(k, v); }},
        {"twin.friction",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.friction = parse_double(k, v); }},
        {"twin.box_half_extents",
         [](Config& c, const std::string& k, const std::string& v) {
             c.twin.box_half_extents = parse_vec3(k, v);
         }},
        {"twin.mass_scale",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.mass_scale = parse_double(k, v); }},
        {"twin.sim_dt",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.sim_dt = parse_double(k, v); }},
        {"twin.max_sim_time",
         [](Config& c, const std::string& k, const std::string& v) { c.twin.max_sim_time = parse_double(k, v); }},
        {"reward.sigma_rpos",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_rpos = positive(k, parse_double(k, v)); }},
        {"reward.sigma_rrot",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_rrot = positive(k, parse_double(k, v)); }},
        {"reward.sigma_bpos",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_bpos = positive(k, parse_double(k, v)); }},
        {"reward.sigma_brot",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_brot = positive(k, parse_double(k, v)); }},
        {"reward.sigma_bvel",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_bvel = positive(k, parse_double(k, v)); }},
        {"reward.sigma_bang",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_bang = positive(k, parse_double(k, v)); }},
        {"reward.sigma_opos",
         [](Config& c, const std::string& k, const std::string& v) { c.reward.sigma_opos = positive(k, parse_double(k, v)); }},
        {"grasp.h_lift", d(&Config::grasp_h_lift)},
        {"grasp.t_hold", d(&Config::grasp_t_hold)},
        {"task.tolerance", d(&Config::task_tolerance)},
        {"metrics.mpl_radius", d(&Config::mpl_radius)},
        {"pipeline.follower_noise", d(&Config::follower_noise)},
        {"pipeline.follower_delay", d(&Config::follower_delay)},
        {"pipeline.disturbance_frame",
         [](Config& c, const std::string& k, const std::string& v) {
             c.disturbance_frame = parse_long(k, v);
         }},
        {"pipeline.disturbance_linear", v3(&Config::disturbance_linear)},
        {"pipeline.disturbance_angular", v3(&Config::disturbance_angular)},
        {"pipeline.inflation_radius", d(&Config::inflation_radius)},
        {"pipeline.gaze_standoff", d(&Config::gaze_standoff)},
        {"pipeline.camera_fov_h", d(&Config::camera_fov_h)},
        {"paths.priors", s(&Config::priors_path)},
        {"paths.map", s(&Config::map_path)},
        {"paths.map_sidecar", s(&Config::map_sidecar_path)},
        {"paths.chain", s(&Config::chain_path)},
    };

    for (const auto& [key, value] : kv) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key: " + key);
        it->second(cfg, key, value);
    }

    positive("dt", cfg.dt);
    positive("h_stand", cfg.h_stand);
    for (const auto& [name, lim] : cfg.profiles) {
        positive("profiles." + name + ".v", lim.v_max);
        positive("profiles." + name + ".omega", lim.omega_max);
    }
    if (cfg.monitor_window <= 0) throw ConfigError("config field 'monitor.window' must be positive");
    cfg.twin.validate();
    for (const std::string& path :
         {cfg.priors_path, cfg.map_path, cfg.map_sidecar_path, cfg.chain_path}) {
        if (!path.empty() && !std::filesystem::exists(path))
            throw ConfigError("configured file does not exist: " + path);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();

    std::map<std::string, std::string> kv;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config parse error in " + path + ": " + e.what());
        }
        flatten_json(j, "", kv);
        return from_key_values(kv);
    }

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config parse error at " + path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config parse error at " + path + ":" + std::to_string(lineno) +
                              ": empty key or value");
        kv[key] = value;
    }
    return from_key_values(kv);
}

}  // namespace prohoi
