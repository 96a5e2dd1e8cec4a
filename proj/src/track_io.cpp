#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tgvc/tracker.hpp"

namespace tgvc {

using nlohmann::json;

TrajectorySet tracks_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("track file: ") + e.what());
    }

    auto fail = [](std::size_t track, const std::string& what) -> ParseError {
        return ParseError("track " + std::to_string(track) + ": " + what);
    };

    try {
        TrajectorySet set;
        if (!doc.contains("L") || !doc.contains("grid_size") || !doc.contains("tracks"))
            throw ParseError("track file: missing L, grid_size or tracks field");
        long L = doc.at("L").get<long>();
        if (L < 1 || L > 0xFFFF) throw ParseError("track file: L out of range");
        set.frame_count = static_cast<std::uint16_t>(L);
        set.grid_size = doc.at("grid_size").get<int>();

        std::size_t idx = 0;
        for (const json& jt : doc.at("tracks")) {
            Trajectory t;
            const json& origin = jt.at("origin");
            if (!origin.is_array() || origin.size() != 2)
                throw fail(idx, "origin must be [row, col]");
            t.origin_row = origin[0].get<int>();
            t.origin_col = origin[1].get<int>();

            const json& xy = jt.at("xy");
            const json& vis = jt.at("vis");
            if (!xy.is_array() || xy.size() != static_cast<std::size_t>(L))
                throw fail(idx, "xy must hold L pairs");
            if (!vis.is_array() || vis.size() != static_cast<std::size_t>(L))
                throw fail(idx, "vis must hold L flags");
            for (const json& p : xy) {
                if (!p.is_array() || p.size() != 2) throw fail(idx, "xy entry must be [x, y]");
                t.xs.push_back(p[0].get<double>());
                t.ys.push_back(p[1].get<double>());
            }
            for (const json& v : vis) {
                long flag = v.get<long>();
                if (flag != 0 && flag != 1)
                    throw fail(idx, "vis value " + std::to_string(flag) + " is not 0/1");
                t.vis.push_back(static_cast<std::uint8_t>(flag));
            }
            set.trajectories.push_back(std::move(t));
            ++idx;
        }
        return set;
    } catch (const json::exception& e) {
        throw ParseError(std::string("track file: ") + e.what());
    }
}

std::string tracks_to_json(const TrajectorySet& set) {
    json doc;
    doc["L"] = set.frame_count;
    doc["grid_size"] = set.grid_size;
    json tracks = json::array();
    for (const Trajectory& t : set.trajectories) {
        json jt;
        jt["origin"] = {t.origin_row, t.origin_col};
        json xy = json::array();
        for (std::size_t f = 0; f < t.length(); ++f) xy.push_back({t.xs[f], t.ys[f]});
        jt["xy"] = std::move(xy);
        json vis = json::array();
        for (std::uint8_t v : t.vis) vis.push_back(static_cast<int>(v));
        jt["vis"] = std::move(vis);
        tracks.push_back(std::move(jt));
    }
    doc["tracks"] = std::move(tracks);
    return doc.dump(2) + "\n";
}

TrajectorySet import_tracks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open track file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return tracks_from_json(ss.str());
}

void export_tracks(const TrajectorySet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file: " + path);
    out << tracks_to_json(set);
}

}  // namespace tgvc
