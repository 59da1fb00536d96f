#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbgen/io.hpp"

using namespace bbgen;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bbgen_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Coco, ConvertsXYWH) {
    const auto gts = io::parse_coco(R"({"images":[{"id":3,"width":640,"height":480},{"id":4}],
        "annotations":[{"id":17,"image_id":3,"category_id":44,"bbox":[10,20,40,80]}]})");
    ASSERT_EQ(gts.size(), 2u);
    ASSERT_EQ(gts.at(3).size(), 1u);
    EXPECT_EQ(gts.at(3)[0].box, Box(10, 20, 50, 100));
    EXPECT_EQ(gts.at(3)[0].category_id, 44);
    EXPECT_EQ(gts.at(3)[0].instance_id, 17);
    EXPECT_TRUE(gts.at(4).empty());
}

TEST(Coco, ZeroWidthNamesAnnotation) {
    try {
        io::parse_coco(R"({"images":[{"id":1}],"annotations":[{"id":905,"image_id":1,"category_id":1,"bbox":[1,1,0,5]}]})");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("905"), std::string::npos) << e.what();
    }
}

TEST(Coco, StructuralErrors) {
    EXPECT_THROW(io::parse_coco("{not json"), DataError);
    EXPECT_THROW(io::parse_coco(R"({"images":[]})"), DataError);
    EXPECT_THROW(io::parse_coco(R"({"images":[{"id":1}],"annotations":[{"id":2,"image_id":9,"bbox":[0,0,1,1]}]})"),
                 DataError);
    EXPECT_THROW(io::parse_coco(R"({"annotations":[{"id":2,"image_id":1,"bbox":[0,0,1]}]})"), DataError);
    EXPECT_THROW(io::parse_coco(R"({"annotations":[{"id":2,"image_id":1,"bbox":"x"}]})"), DataError);
}

TEST(Csv, RowsAndCategories) {
    const auto gts = io::parse_csv("# comment\n0.3,0.3,0.6,0.6,cat=1\n\n1,2,3,4\n");
    ASSERT_EQ(gts.size(), 2u);
    EXPECT_EQ(gts[0].box, Box(0.3, 0.3, 0.6, 0.6));
    EXPECT_EQ(gts[0].category_id, 1);
    EXPECT_EQ(gts[0].instance_id, 2);
    EXPECT_EQ(gts[1].instance_id, 4);
}

TEST(Csv, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        try {
            io::parse_csv(text, "f.csv");
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("0,0,1,1\n0,0,x,1\n").find("f.csv:2"), std::string::npos);
    EXPECT_NE(message("0,0,1,1\n0,0,1\n").find("f.csv:2"), std::string::npos);
    EXPECT_NE(message("1,1,1,2\n").find("f.csv:1"), std::string::npos);
    EXPECT_NE(message("0,0,1,1,dog=3\n").find("cat=N"), std::string::npos);
}

TEST(Load, ByExtension) {
    const auto csv = scratch("gt.csv");
    std::ofstream(csv) << "0,0,2,2,cat=5\n";
    const auto a = io::load_ground_truths(csv);
    EXPECT_EQ(a.at(0)[0].category_id, 5);
    const auto empty = scratch("empty.csv");
    std::ofstream(empty) << "";
    EXPECT_TRUE(io::load_ground_truths(empty).empty());
    EXPECT_THROW(io::load_ground_truths(scratch("missing.json")), DataError);
}

TEST(Rois, EmptyListEmptyFile) {
    const auto p = scratch("empty.jsonl");
    io::write_rois({}, p);
    EXPECT_EQ(fs::file_size(p), 0u);
    EXPECT_TRUE(io::read_rois(p).empty());
}

TEST(Rois, RoundTrip) {
    SeededRng rng(1);
    std::vector<GeneratedRoI> rois;
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-50, 50), y = rng.uniform(0, 1000);
        rois.push_back({Box(x, y, x + rng.uniform(0.1, 30), y + rng.uniform(0.1, 30)), i % 7, 1000 + i, i % 3,
                        rng.uniform(0.5, 0.95), rng.uniform(0.5, 1)});
    }
    const auto p = scratch("rois.jsonl");
    io::write_rois(rois, p);
    const auto back = io::read_rois(p);
    ASSERT_EQ(back.size(), rois.size());
    for (std::size_t i = 0; i < rois.size(); ++i) {
        EXPECT_EQ(back[i].image_id, rois[i].image_id);
        EXPECT_EQ(back[i].gt_instance_id, rois[i].gt_instance_id);
        EXPECT_EQ(back[i].category_id, rois[i].category_id);
        // 9 significant digits
        const auto a = back[i].box.coords(), b = rois[i].box.coords();
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-8 * std::max(1.0, std::abs(b[k])));
        EXPECT_NEAR(back[i].target_iou, rois[i].target_iou, 1e-9);
        EXPECT_NEAR(back[i].achieved_iou, rois[i].achieved_iou, 1e-9);
    }
    // A second pass reproduces the file exactly.
    const auto p2 = scratch("rois2.jsonl");
    io::write_rois(back, p2);
    EXPECT_EQ(slurp(p), slurp(p2));
}

TEST(Rois, StableFieldOrder) {
    const GeneratedRoI r{Box(1, 2, 3.5, 4.25), 7, 8, 9, 0.5, 0.625};
    EXPECT_EQ(io::roi_to_json_line(r),
              R"({"image_id":7,"gt_instance_id":8,"category_id":9,"box":[1,2,3.5,4.25],"target_iou":0.5,"achieved_iou":0.625})");
}

TEST(Rois, MalformedLineReported) {
    try {
        io::parse_rois("{\"image_id\":1}\n", "r.jsonl");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("r.jsonl:1"), std::string::npos);
    }
}

TEST(Atomic, FailureLeavesNothing) {
    const auto p = scratch("atomic.txt");
    fs::remove(p);
    EXPECT_THROW(io::write_atomically(p, [](std::ostream& out) {
                     out << "half";
                     throw GenerationFailure("boom");
                 }),
                 GenerationFailure);
    EXPECT_FALSE(fs::exists(p));
    fs::path tmp = p;
    tmp += ".partial";
    EXPECT_FALSE(fs::exists(tmp));
}

TEST(Histogram, CsvLayout) {
    IoUHistogram h;
    h.label = "base:0.5";
    h.edges = {0.5, 0.6, 1.0};
    h.counts = {3, 1};
    h.samples = 4;
    std::ostringstream out;
    io::write_histogram_csv(out, {h});
    EXPECT_EQ(out.str(), "source,bin_low,bin_high,count,fraction,density\n"
                         "base:0.5,0.5,0.6,3,0.75,7.5\n"
                         "base:0.5,0.6,1,1,0.25,0.625\n");
}

TEST(Contours, JsonParsesBack) {
    const auto family = boundary_contours(Box(0.3, 0.3, 0.6, 0.6), {0.5, 0.9});
    std::ostringstream out;
    io::write_contours_json(out, family);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["space"], "top-left");
    ASSERT_EQ(j["contours"].size(), 2u);
    EXPECT_EQ(j["contours"][1]["level"], 0.9);
    EXPECT_EQ(j["contours"][0]["polygon"]["vertices"].size(), family.contours[0].polygon.vertices.size());
}

TEST(Points, Parse) {
    const auto pts = io::parse_points("0.1,0.2\n# x\n3,4\n");
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1], (Point{3, 4}));
    EXPECT_THROW(io::parse_points("1,2,3\n"), DataError);
}

TEST(RunConfig, JsonKeepsKeyOrder) {
    io::RunConfig cfg;
    cfg.command = "gen-bb";
    cfg.seed = 7;
    cfg.has_seed = true;
    const auto j = nlohmann::ordered_json::parse(cfg.to_json());
    EXPECT_EQ(j.begin().key(), "command");
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(io::sidecar_path("out/x.jsonl").string(), "out/x.jsonl.config.json");
}
