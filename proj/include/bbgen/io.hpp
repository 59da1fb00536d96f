#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbgen/box.hpp"
#include "bbgen/distribution_analysis.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"
#include "bbgen/proi_generator.hpp"

namespace bbgen::io {

enum class AnnotationFormat { CocoJson, SimpleCsv };

/// ".json" means COCO, anything else the simple CSV layout.
inline AnnotationFormat guess_format(const std::filesystem::path& path) {
    return path.extension() == ".json" ? AnnotationFormat::CocoJson : AnnotationFormat::SimpleCsv;
}

/// Shortest-roundtrip is not wanted here: files carry 9 significant digits.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline double to_double(std::string_view field, const std::string& where) {
    std::string s(field);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
    std::size_t start = s.find_first_not_of(" \t");
    s = start == std::string::npos ? "" : s.substr(start);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) {
        throw DataError(where + ": '" + s + "' is not a number");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

/// COCO-style JSON: images[].id, annotations[] with image_id, category_id and
/// bbox [x, y, w, h]. Every listed image gets an entry, possibly empty.
inline std::map<std::int64_t, GroundTruthSet> parse_coco(const std::string& text, const std::string& name = "<coco>") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(name + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
        throw DataError(name + ": expected an object with an 'annotations' array");
    }
    std::map<std::int64_t, GroundTruthSet> out;
    try {
        if (doc.contains("images")) {
            for (const auto& image : doc.at("images")) {
                out[image.at("id").get<std::int64_t>()];
            }
        }
        const bool check_images = doc.contains("images");
        for (std::size_t k = 0; k < doc["annotations"].size(); ++k) {
            const auto& ann = doc["annotations"][k];
            const std::int64_t id = ann.contains("id") ? ann["id"].get<std::int64_t>() : static_cast<std::int64_t>(k);
            const std::string label = name + ": annotation id " + std::to_string(id);
            const std::int64_t image_id = ann.at("image_id").get<std::int64_t>();
            if (check_images && !out.contains(image_id)) {
                throw DataError(label + " references unknown image " + std::to_string(image_id));
            }
            const auto bbox = ann.at("bbox").get<std::vector<double>>();
            if (bbox.size() != 4) {
                throw DataError(label + ": bbox needs 4 numbers");
            }
            if (!(bbox[2] > 0.0) || !(bbox[3] > 0.0)) {
                throw DataError(label + ": bbox has non-positive width or height");
            }
            std::optional<Box> box;
            try {
                box.emplace(bbox[0], bbox[1], bbox[0] + bbox[2], bbox[1] + bbox[3]);
            } catch (const DataError& e) {
                throw DataError(label + ": " + e.what());
            }
            const int category = ann.contains("category_id") ? ann["category_id"].get<int>() : 1;
            out[image_id].push_back({*box, category, id});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(name + ": malformed COCO structure: " + e.what());
    }
    return out;
}

/// One box per line: "x1,y1,x2,y2" with an optional ",cat=N". Blank lines and
/// lines starting with '#' are skipped. Everything belongs to image 0;
/// instance ids are the 1-based line numbers.
inline GroundTruthSet parse_csv(const std::string& text, const std::string& name = "<csv>") {
    GroundTruthSet out;
    std::istringstream in(text);
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
            continue;
        }
        const std::string where = name + ":" + std::to_string(line_no);
        const auto fields = detail::split(line, ',');
        if (fields.size() != 4 && fields.size() != 5) {
            throw DataError(where + ": expected x1,y1,x2,y2[,cat=N], got " + std::to_string(fields.size()) + " fields");
        }
        std::optional<Box> box;
        try {
            box.emplace(detail::to_double(fields[0], where), detail::to_double(fields[1], where),
                         detail::to_double(fields[2], where), detail::to_double(fields[3], where));
        } catch (const DataError& e) {
            const std::string msg = e.what();
            throw DataError(msg.starts_with(where) ? msg : where + ": " + msg);
        }
        int category = 1;
        if (fields.size() == 5) {
            std::string_view cat = fields[4];
            while (!cat.empty() && cat.front() == ' ') cat.remove_prefix(1);
            if (!cat.starts_with("cat=")) {
                throw DataError(where + ": fifth field must look like cat=N");
            }
            const double c = detail::to_double(cat.substr(4), where);
            if (c != static_cast<double>(static_cast<int>(c))) {
                throw DataError(where + ": category must be an integer");
            }
            category = static_cast<int>(c);
        }
        out.push_back({*box, category, line_no});
    }
    return out;
}

inline std::map<std::int64_t, GroundTruthSet> load_ground_truths(const std::filesystem::path& path,
                                                                 AnnotationFormat format) {
    const std::string text = detail::read_file(path);
    if (format == AnnotationFormat::CocoJson) {
        return parse_coco(text, path.string());
    }
    std::map<std::int64_t, GroundTruthSet> out;
    auto gts = parse_csv(text, path.string());
    if (!gts.empty()) {
        out[0] = std::move(gts);
    }
    return out;
}

inline std::map<std::int64_t, GroundTruthSet> load_ground_truths(const std::filesystem::path& path) {
    return load_ground_truths(path, guess_format(path));
}

/// Writes through a temporary sibling and renames into place, so a failure
/// never leaves a partial file at `path`.
inline void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::filesystem::path tmp = path;
    tmp += ".partial";
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw Error("cannot write " + tmp.string());
            }
            body(out);
            out.flush();
            if (!out) {
                throw Error("write failed for " + tmp.string());
            }
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw;
    }
}

inline std::string roi_to_json_line(const GeneratedRoI& r) {
    std::string s = "{\"image_id\":" + std::to_string(r.image_id);
    s += ",\"gt_instance_id\":" + std::to_string(r.gt_instance_id);
    s += ",\"category_id\":" + std::to_string(r.category_id);
    s += ",\"box\":[" + format_number(r.box.x1()) + "," + format_number(r.box.y1()) + "," +
         format_number(r.box.x2()) + "," + format_number(r.box.y2()) + "]";
    s += ",\"target_iou\":" + format_number(r.target_iou);
    s += ",\"achieved_iou\":" + format_number(r.achieved_iou) + "}";
    return s;
}

inline void write_rois(std::ostream& out, const std::vector<GeneratedRoI>& rois) {
    for (const auto& r : rois) {
        out << roi_to_json_line(r) << '\n';
    }
}

inline void write_rois(const std::vector<GeneratedRoI>& rois, const std::filesystem::path& path) {
    write_atomically(path, [&](std::ostream& out) { write_rois(out, rois); });
}

inline std::vector<GeneratedRoI> parse_rois(const std::string& text, const std::string& name = "<rois>") {
    std::vector<GeneratedRoI> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(line_no);
        try {
            const auto j = nlohmann::json::parse(line);
            const auto b = j.at("box").get<std::vector<double>>();
            if (b.size() != 4) {
                throw DataError(where + ": box needs 4 numbers");
            }
            GeneratedRoI r{Box(b[0], b[1], b[2], b[3]),
                           j.at("image_id").get<std::int64_t>(),
                           j.at("gt_instance_id").get<std::int64_t>(),
                           j.at("category_id").get<int>(),
                           j.at("target_iou").get<double>(),
                           j.at("achieved_iou").get<double>()};
            out.push_back(r);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<GeneratedRoI> read_rois(const std::filesystem::path& path) {
    return parse_rois(detail::read_file(path), path.string());
}

inline std::string box_json(const Box& b) {
    return "[" + format_number(b.x1()) + "," + format_number(b.y1()) + "," + format_number(b.x2()) + "," +
           format_number(b.y2()) + "]";
}

inline void write_histogram_csv(std::ostream& out, const std::vector<IoUHistogram>& hists) {
    out << "source,bin_low,bin_high,count,fraction,density\n";
    for (const auto& h : hists) {
        for (std::size_t k = 0; k < h.counts.size(); ++k) {
            out << h.label << ',' << format_number(h.edges[k]) << ',' << format_number(h.edges[k + 1]) << ','
                << h.counts[k] << ',' << format_number(h.fraction(k)) << ',' << format_number(h.density(k)) << '\n';
        }
    }
}

inline std::string polygon_json(const FeasiblePolygon& p) {
    std::string s = "{\"kind\":\"" + std::string(to_string(p.kind)) + "\",\"threshold\":" + format_number(p.threshold);
    s += ",\"degenerate\":" + std::string(p.degenerate ? "true" : "false");
    s += ",\"area\":" + format_number(polygon_area(p));
    s += ",\"vertices\":[";
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        s += (i ? ",[" : "[") + format_number(p.vertices[i].x) + "," + format_number(p.vertices[i].y) + "]";
    }
    return s + "]}";
}

inline void write_contours_json(std::ostream& out, const ContourFamily& family) {
    out << "{\"reference\":" << box_json(family.reference) << ",\"space\":\"" << to_string(family.space)
        << "\",\"contours\":[";
    for (std::size_t i = 0; i < family.contours.size(); ++i) {
        out << (i ? ",\n" : "\n") << "{\"level\":" << format_number(family.contours[i].level)
            << ",\"polygon\":" << polygon_json(family.contours[i].polygon) << "}";
    }
    out << "\n]}\n";
}

/// "x,y" per line; blank lines and '#' comments skipped.
inline std::vector<Point> parse_points(const std::string& text, const std::string& name = "<points>") {
    std::vector<Point> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const auto fields = detail::split(line, ',');
        if (fields.size() != 2) {
            throw DataError(where + ": expected x,y");
        }
        out.push_back({detail::to_double(fields[0], where), detail::to_double(fields[1], where)});
    }
    return out;
}

inline std::vector<Point> read_points(const std::filesystem::path& path) {
    return parse_points(detail::read_file(path), path.string());
}

/// Everything that shaped a run, echoed next to its output.
struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    bool has_seed = false;
    double trace_step = 1e-4;
    std::size_t attempt_budget = kDefaultAttemptBudget;
    double nms_iou = 0.0;
    bool has_nms = false;
    std::string preset;
    std::vector<double> weights;
    std::size_t roi_num = 0;
    std::vector<std::pair<std::string, std::string>> extra;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::string to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        if (has_seed) j["seed"] = seed;
        j["trace_step"] = trace_step;
        j["attempt_budget"] = attempt_budget;
        if (has_nms) j["nms_iou"] = nms_iou;
        if (!preset.empty()) j["preset"] = preset;
        if (!weights.empty()) j["weights"] = weights;
        if (roi_num) j["roi_num"] = roi_num;
        for (const auto& [k, v] : extra) j[k] = v;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        return j.dump(2) + "\n";
    }
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& out) {
    std::filesystem::path p = out;
    p += ".config.json";
    return p;
}

}  // namespace bbgen::io
