// Command-line front end: generation, analysis and audits over files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbgen/balanced_samplers.hpp"
#include "bbgen/bb_generator.hpp"
#include "bbgen/distribution_analysis.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"
#include "bbgen/io.hpp"
#include "bbgen/oracle.hpp"
#include "bbgen/proi_generator.hpp"

namespace fs = std::filesystem;
using namespace bbgen;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kData = 3, kGeneration = 4 };

/// Raised when `verify` finds disagreements; maps to the generation exit code.
struct VerifyMismatch : Error {
    using Error::Error;
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::string out;
    double trace_step = 1e-4;
    std::size_t budget = kDefaultAttemptBudget;
    std::string proposal = "uniform";
};

Box parse_ref(const std::vector<double>& v) {
    if (v.size() != 4) {
        throw ParameterError("--ref needs x1,y1,x2,y2");
    }
    try {
        return Box(v[0], v[1], v[2], v[3]);
    } catch (const DataError& e) {
        throw ParameterError(std::string("--ref: ") + e.what());
    }
}

GenerationOptions generation_options(const Common& c) {
    GenerationOptions opts;
    if (!(c.trace_step > 0.0 && c.trace_step < 0.1)) {
        throw ParameterError("--trace-step must lie in (0, 0.1)");
    }
    if (c.budget == 0) {
        throw ParameterError("--budget must be at least 1");
    }
    opts.trace.step = c.trace_step;
    opts.attempt_budget = c.budget;
    if (c.proposal == "uniform") {
        opts.proposal = ProposalDistribution::uniform();
    } else if (c.proposal.starts_with("gaussian:")) {
        double sigma = 0.0;
        try {
            sigma = std::stod(c.proposal.substr(9));
        } catch (const std::exception&) {
            throw ParameterError("--proposal gaussian:<sigma> needs a number");
        }
        opts.proposal = ProposalDistribution::gaussian_at_corner(sigma);
    } else {
        throw ParameterError("--proposal must be 'uniform' or 'gaussian:<sigma>'");
    }
    return opts;
}

IoUDistributionSpec distribution(const std::string& preset, const std::vector<double>& weights) {
    if (!weights.empty()) {
        if (!preset.empty()) {
            throw ParameterError("give either --preset or --weights, not both");
        }
        IoUDistributionSpec spec;
        spec.weights = weights;
        spec.validate();
        return spec;
    }
    return preset_spec(preset.empty() ? "balanced" : preset);
}

io::RunConfig base_config(const std::string& command, const Common& c) {
    io::RunConfig cfg;
    cfg.command = command;
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.has_seed = true;
    }
    cfg.trace_step = c.trace_step;
    cfg.attempt_budget = c.budget;
    cfg.extra.emplace_back("proposal", c.proposal);
    if (!c.out.empty()) cfg.outputs.push_back(c.out);
    return cfg;
}

/// Writes the result to --out (plus sidecar) or stdout.
void emit(const Common& c, io::RunConfig cfg, const std::function<void(std::ostream&)>& body) {
    if (c.out.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    const fs::path out = c.out;
    io::write_atomically(out, body);
    try {
        io::write_atomically(io::sidecar_path(out), [&](std::ostream& s) { s << cfg.to_json(); });
    } catch (...) {
        std::error_code ignored;
        fs::remove(out, ignored);
        throw;
    }
}

void add_common(CLI::App* sub, Common& c, bool generating) {
    auto* seed = sub->add_option("--seed", c.seed, "RNG seed (unsigned 64-bit)");
    if (generating) seed->required();
    sub->add_option("--out", c.out, "output file (default: stdout)");
    sub->add_option("--trace-step", c.trace_step, "boundary trace step, fraction of box extent")->capture_default_str();
    sub->add_option("--budget", c.budget, "proposal budget per polygon sample")->capture_default_str();
    sub->add_option("--proposal", c.proposal, "uniform | gaussian:<sigma>")->capture_default_str();
}

std::string ref_text(const Box& b) { return io::box_json(b); }

std::map<std::int64_t, GroundTruthSet> load_gt(const std::string& path, const std::string& format) {
    io::AnnotationFormat f = io::guess_format(path);
    if (format == "coco") {
        f = io::AnnotationFormat::CocoJson;
    } else if (format == "csv") {
        f = io::AnnotationFormat::SimpleCsv;
    } else if (!format.empty()) {
        throw ParameterError("--format must be 'coco' or 'csv'");
    }
    auto gts = io::load_ground_truths(path, f);
    std::size_t boxes = 0;
    for (const auto& [_, set] : gts) boxes += set.size();
    if (boxes == 0) {
        std::cerr << "warning: " << path << " holds no annotations\n";
    }
    return gts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounding-box generation with guaranteed IoU, and its analysis tools"};
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    // gen-bb
    Common bb;
    std::vector<double> bb_ref;
    double bb_iou = 0.0;
    std::size_t bb_count = 1;
    auto* gen_bb = app.add_subcommand("gen-bb", "boxes with IoU >= T against one reference box");
    add_common(gen_bb, bb, true);
    gen_bb->add_option("--ref", bb_ref, "x1,y1,x2,y2")->required()->delimiter(',');
    gen_bb->add_option("--iou", bb_iou, "IoU threshold T in (0, 0.999]")->required();
    gen_bb->add_option("--count", bb_count, "number of boxes")->capture_default_str();

    // gen-proi
    Common proi;
    std::string proi_gt, proi_format, proi_preset;
    std::vector<double> proi_weights;
    std::size_t proi_roi_num = 32;
    auto* gen_proi = app.add_subcommand("gen-proi", "foreground-balanced positive RoIs per image");
    add_common(gen_proi, proi, true);
    gen_proi->add_option("--gt", proi_gt, "annotations (COCO .json or CSV)")->required();
    gen_proi->add_option("--format", proi_format, "coco | csv (default: by extension)");
    gen_proi->add_option("--preset", proi_preset, "target-IoU preset (default balanced)");
    gen_proi->add_option("--weights", proi_weights, "five bin weights over 0.5..0.9")->delimiter(',');
    gen_proi->add_option("--roi-num", proi_roi_num, "RoIs per image")->capture_default_str();

    // feasible-space
    Common fsp;
    std::vector<double> fs_ref, fs_levels{0.5, 0.6, 0.7, 0.8, 0.9};
    std::string fs_space = "tl";
    auto* feasible = app.add_subcommand("feasible-space", "feasible-corner contours as JSON polylines");
    add_common(feasible, fsp, false);
    feasible->add_option("--ref", fs_ref, "x1,y1,x2,y2")->required()->delimiter(',');
    feasible->add_option("--levels", fs_levels, "IoU levels")->delimiter(',')->capture_default_str();
    feasible->add_option("--space", fs_space, "tl | br (br fixes the top-left corner at TL(ref))")
        ->capture_default_str();

    // iou-hist
    Common hist;
    std::vector<std::string> hist_sources;
    std::size_t hist_n = 100000;
    auto* iou_hist = app.add_subcommand("iou-hist", "histogram of achieved IoU per source, as CSV");
    add_common(iou_hist, hist, true);
    iou_hist->add_option("--source", hist_sources, "preset name or base:T (repeatable)")->required();
    iou_hist->add_option("--n", hist_n, "samples per source")->capture_default_str();

    // ofb-sample
    Common ofb;
    std::string ofb_rois;
    std::size_t ofb_n = 0;
    bool ofb_without = false;
    auto* ofb_sample_cmd = app.add_subcommand("ofb-sample", "foreground-balanced draw from a RoI file");
    add_common(ofb_sample_cmd, ofb, true);
    ofb_sample_cmd->add_option("--rois", ofb_rois, "RoIs as JSON Lines (gen-proi output)")->required();
    ofb_sample_cmd->add_option("--n", ofb_n, "number of draws")->required();
    ofb_sample_cmd->add_flag("--without-replacement", ofb_without, "draw distinct RoIs");

    // ohpm
    Common hp;
    std::string hp_gt, hp_format, hp_preset;
    std::vector<double> hp_weights;
    std::size_t hp_pool = 128, hp_keep = 32;
    double hp_nms = kDefaultOhpmNmsIoU;
    auto* ohpm = app.add_subcommand("ohpm", "hard positive mining: over-generate, NMS, keep the hardest");
    add_common(ohpm, hp, true);
    ohpm->add_option("--gt", hp_gt, "annotations (COCO .json or CSV)")->required();
    ohpm->add_option("--format", hp_format, "coco | csv (default: by extension)");
    ohpm->add_option("--preset", hp_preset, "target-IoU preset (default balanced)");
    ohpm->add_option("--weights", hp_weights, "five bin weights over 0.5..0.9")->delimiter(',');
    ohpm->add_option("--pool", hp_pool, "generated RoIs per image")->capture_default_str();
    ohpm->add_option("--keep", hp_keep, "RoIs kept per image")->capture_default_str();
    ohpm->add_option("--nms-iou", hp_nms, "suppression IoU")->capture_default_str();

    // spatial-stats
    Common sp;
    std::string sp_points;
    std::vector<double> sp_ref, sp_levels{0.5, 0.6, 0.7, 0.8, 0.9};
    auto* spatial = app.add_subcommand("spatial-stats", "where top-left points fall against the contours");
    add_common(spatial, sp, false);
    spatial->add_option("--points", sp_points, "x,y per line")->required();
    spatial->add_option("--ref", sp_ref, "x1,y1,x2,y2")->required()->delimiter(',');
    spatial->add_option("--levels", sp_levels, "IoU levels")->delimiter(',')->capture_default_str();

    // verify
    Common vf;
    std::vector<double> vf_ref, vf_fixed;
    double vf_iou = 0.5, vf_pitch = oracle::kDefaultPitch;
    std::string vf_space = "tl";
    auto* verify = app.add_subcommand("verify", "compare a traced polygon against the brute-force grid");
    add_common(verify, vf, false);
    verify->add_option("--ref", vf_ref, "x1,y1,x2,y2")->required()->delimiter(',');
    verify->add_option("--iou", vf_iou, "IoU threshold")->capture_default_str();
    verify->add_option("--space", vf_space, "tl | br")->capture_default_str();
    verify->add_option("--fixed", vf_fixed, "top-left corner for br (default TL(ref))")->delimiter(',');
    verify->add_option("--pitch", vf_pitch, "grid pitch, fraction of box extent")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen_bb) {
            const Box ref = parse_ref(bb_ref);
            const auto opts = generation_options(bb);
            const auto boxes = generate_bb_batch(ref, bb_iou, bb_count, *bb.seed, opts);
            auto cfg = base_config("gen-bb", bb);
            cfg.extra.emplace_back("ref", ref_text(ref));
            cfg.extra.emplace_back("iou", io::format_number(bb_iou));
            cfg.extra.emplace_back("count", std::to_string(bb_count));
            emit(bb, cfg, [&](std::ostream& out) {
                for (const auto& g : boxes) {
                    out << "{\"box\":" << io::box_json(g.box) << ",\"threshold\":" << io::format_number(bb_iou)
                        << ",\"achieved_iou\":" << io::format_number(g.record.achieved_iou) << ",\"order\":\""
                        << to_string(g.record.order) << "\",\"proposals\":" << g.record.proposals_used
                        << ",\"attempts\":" << g.record.attempts << "}\n";
                }
            });
        } else if (*gen_proi) {
            const auto spec = distribution(proi_preset, proi_weights);
            const auto opts = generation_options(proi);
            const auto images = load_gt(proi_gt, proi_format);
            std::vector<GeneratedRoI> all;
            for (const auto& [image_id, gts] : images) {
                if (gts.empty()) continue;
                auto rois = generate_proi_seeded(gts, spec, proi_roi_num, *proi.seed, image_id, opts);
                all.insert(all.end(), rois.begin(), rois.end());
            }
            auto cfg = base_config("gen-proi", proi);
            cfg.preset = proi_weights.empty() ? (proi_preset.empty() ? "balanced" : proi_preset) : "";
            cfg.weights = spec.weights;
            cfg.roi_num = proi_roi_num;
            cfg.inputs.push_back(proi_gt);
            emit(proi, cfg, [&](std::ostream& out) { io::write_rois(out, all); });
        } else if (*feasible) {
            const Box ref = parse_ref(fs_ref);
            if (fs_space != "tl" && fs_space != "br") throw ParameterError("--space must be tl or br");
            TraceOptions trace;
            trace.step = generation_options(fsp).trace.step;
            const auto family = boundary_contours(
                ref, fs_levels, fs_space == "tl" ? CornerKind::TopLeft : CornerKind::BottomRight, trace);
            auto cfg = base_config("feasible-space", fsp);
            cfg.extra.emplace_back("ref", ref_text(ref));
            cfg.extra.emplace_back("space", fs_space);
            emit(fsp, cfg, [&](std::ostream& out) { io::write_contours_json(out, family); });
        } else if (*iou_hist) {
            const auto opts = generation_options(hist);
            if (hist_n == 0) throw ParameterError("--n must be at least 1");
            std::vector<IoUHistogram> hists;
            SeededRng root(*hist.seed);
            for (const auto& text : hist_sources) {
                SeededRng stream = root.split();
                hists.push_back(iou_histogram(IoUSource::parse(text), hist_n, stream, opts));
            }
            auto cfg = base_config("iou-hist", hist);
            std::string joined;
            for (const auto& s : hist_sources) joined += (joined.empty() ? "" : ";") + s;
            cfg.extra.emplace_back("sources", joined);
            cfg.extra.emplace_back("n", std::to_string(hist_n));
            emit(hist, cfg, [&](std::ostream& out) { io::write_histogram_csv(out, hists); });
        } else if (*ofb_sample_cmd) {
            const auto rois = io::read_rois(ofb_rois);
            std::vector<LabeledRoI> labeled;
            for (const auto& r : rois) labeled.push_back({r.box, r.category_id, 1.0 - r.achieved_iou});
            SeededRng rng(*ofb.seed);
            const auto picked = ofb_sample_indices(labeled, ofb_n, rng, !ofb_without);
            auto cfg = base_config("ofb-sample", ofb);
            cfg.inputs.push_back(ofb_rois);
            cfg.extra.emplace_back("n", std::to_string(ofb_n));
            cfg.extra.emplace_back("replacement", ofb_without ? "without" : "with");
            emit(ofb, cfg, [&](std::ostream& out) {
                for (std::size_t i : picked) out << io::roi_to_json_line(rois[i]) << '\n';
            });
        } else if (*ohpm) {
            const auto spec = distribution(hp_preset, hp_weights);
            const auto opts = generation_options(hp);
            const auto images = load_gt(hp_gt, hp_format);
            std::vector<GeneratedRoI> all;
            for (const auto& [image_id, gts] : images) {
                if (gts.empty()) continue;
                SeededRng rng = SeededRng(*hp.seed).derive(static_cast<std::uint64_t>(image_id));
                auto kept = ohpm_select(gts, spec, hp_pool, hp_keep, default_hardness, rng, hp_nms, opts);
                for (auto& r : kept) r.image_id = image_id;
                all.insert(all.end(), kept.begin(), kept.end());
            }
            auto cfg = base_config("ohpm", hp);
            cfg.preset = hp_weights.empty() ? (hp_preset.empty() ? "balanced" : hp_preset) : "";
            cfg.weights = spec.weights;
            cfg.nms_iou = hp_nms;
            cfg.has_nms = true;
            cfg.roi_num = hp_keep;
            cfg.extra.emplace_back("pool", std::to_string(hp_pool));
            cfg.inputs.push_back(hp_gt);
            emit(hp, cfg, [&](std::ostream& out) { io::write_rois(out, all); });
        } else if (*spatial) {
            const Box ref = parse_ref(sp_ref);
            const auto points = io::read_points(sp_points);
            TraceOptions trace;
            trace.step = generation_options(sp).trace.step;
            const auto report = spatial_stats(points, ref, sp_levels, trace);
            auto cfg = base_config("spatial-stats", sp);
            cfg.inputs.push_back(sp_points);
            emit(sp, cfg, [&](std::ostream& out) {
                out << "{\"reference\":" << io::box_json(ref) << ",\"points\":" << report.points << ",\"levels\":[";
                for (std::size_t i = 0; i < report.levels.size(); ++i) {
                    out << (i ? "," : "") << "{\"level\":" << io::format_number(report.levels[i].level)
                        << ",\"inside_fraction\":" << io::format_number(report.levels[i].inside_fraction) << "}";
                }
                const auto& q = report.quadrants;
                out << "],\"quadrants\":{\"inside\":" << io::format_number(q.inside)
                    << ",\"outside\":" << io::format_number(q.outside)
                    << ",\"right_above\":" << io::format_number(q.right_above)
                    << ",\"left_below\":" << io::format_number(q.left_below) << "}}\n";
            });
        } else if (*verify) {
            const Box ref = parse_ref(vf_ref);
            if (vf_space != "tl" && vf_space != "br") throw ParameterError("--space must be tl or br");
            TraceOptions trace;
            trace.step = generation_options(vf).trace.step;
            const CornerKind kind = vf_space == "tl" ? CornerKind::TopLeft : CornerKind::BottomRight;
            Point fixed = ref.bottom_right();
            FeasiblePolygon poly;
            if (kind == CornerKind::TopLeft) {
                poly = tl_feasible_polygon(ref, vf_iou, trace);
            } else {
                fixed = ref.top_left();
                if (!vf_fixed.empty()) {
                    if (vf_fixed.size() != 2) throw ParameterError("--fixed needs x,y");
                    fixed = {vf_fixed[0], vf_fixed[1]};
                }
                poly = br_feasible_polygon(ref, vf_iou, fixed, trace);
            }
            const auto grid = oracle::grid_around(ref, vf_iou, kind, vf_pitch);
            const auto field = oracle::brute_force_corner_region(ref, vf_iou, kind, fixed, grid);
            const auto report =
                oracle::compare_polygon_to_oracle(poly, field, 2.0 * trace.step, ref.width(), ref.height());
            auto cfg = base_config("verify", vf);
            cfg.extra.emplace_back("ref", ref_text(ref));
            cfg.extra.emplace_back("iou", io::format_number(vf_iou));
            cfg.extra.emplace_back("space", vf_space);
            emit(vf, cfg, [&](std::ostream& out) {
                out << "{\"checked\":" << report.checked << ",\"oracle_inside\":" << field.count()
                    << ",\"near_boundary\":" << report.near_boundary << ",\"interior\":" << report.interior.size()
                    << ",\"pass\":" << (report.pass() ? "true" : "false") << "}\n";
            });
            if (!report.pass()) {
                throw VerifyMismatch(std::to_string(report.interior.size()) +
                                     " grid points disagree away from the boundary");
            }
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const VerifyMismatch& e) {
        std::cerr << "verify: " << e.what() << '\n';
        return kGeneration;
    } catch (const GenerationFailure& e) {
        std::cerr << "generation failed: " << e.what() << '\n';
        return kGeneration;
    } catch (const SamplingFailure& e) {
        std::cerr << "generation failed: " << e.what() << '\n';
        return kGeneration;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOk;
}
