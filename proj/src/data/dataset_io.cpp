// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "qrn/core/error.hpp"
#include "qrn/data/data.hpp"

namespace qrn::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string image_name(std::size_t index) {
    std::ostringstream os;
    os << std::setw(5) << std::setfill('0') << index << ".pgm";
    return os.str();
}

}  // namespace

void write_dataset(const fs::path& dir, const std::vector<Sample>& samples,
                   const detector::ClassSet& classes) {
    fs::create_directories(dir / "images");

    std::ofstream ann(dir / "annotations.jsonl");
    if (!ann) throw FormatError("cannot write annotations.jsonl", 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string name = image_name(i);
        save_pgm(to_raster(samples[i].image), dir / "images" / name);
        json rec;
        rec["file"] = "images/" + name;
        rec["objects"] = json::array();
        for (const auto& t : samples[i].truths) {
            rec["objects"].push_back(
                {{"box", {t.box.x0, t.box.y0, t.box.x1, t.box.y1}}, {"class", t.class_index}});
        }
        ann << rec.dump() << "\n";
    }

    std::ofstream cls(dir / "classes.txt");
    if (!cls) throw FormatError("cannot write classes.txt", 0);
    for (const auto& name : classes.names) cls << name << "\n";
}

Dataset load_dataset(const fs::path& dir) {
    Dataset ds;

    std::ifstream cls(dir / "classes.txt");
    if (!cls) throw FormatError("missing classes.txt in '" + dir.string() + "'", 0);
    std::string line;
    while (std::getline(cls, line))
        if (!line.empty()) ds.classes.names.push_back(line);
    if (ds.classes.names.empty()) throw FormatError("classes.txt is empty", 0);

    std::ifstream ann(dir / "annotations.jsonl");
    if (!ann) throw FormatError("missing annotations.jsonl in '" + dir.string() + "'", 0);
    std::size_t line_no = 0;
    while (std::getline(ann, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError("annotations.jsonl line " + std::to_string(line_no) + ": " +
                                  e.what(),
                              0);
        }
        Sample s;
        try {
            const std::string file = rec.at("file").get<std::string>();
            s.image = normalize(load_pgm(dir / file));
            for (const auto& obj : rec.at("objects")) {
                detector::GroundTruth t;
                const auto& b = obj.at("box");
                t.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                         b.at(3).get<double>()};
                t.class_index = obj.at("class").get<int>();
                if (t.class_index < 0 || t.class_index >= ds.classes.count())
                    throw FormatError("class index out of range in annotations line " +
                                          std::to_string(line_no),
                                      0);
                if (t.box.x0 < 0 || t.box.y0 < 0 || t.box.x1 > s.image.width ||
                    t.box.y1 > s.image.height || t.box.area() <= 0)
                    throw FormatError("truth box out of bounds in annotations line " +
                                          std::to_string(line_no),
                                      0);
                s.truths.push_back(t);
            }
        } catch (const json::exception& e) {
            throw FormatError("annotations.jsonl line " + std::to_string(line_no) + ": " +
                                  e.what(),
                              0);
        }
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) throw FormatError("dataset has no samples", 0);
    return ds;
}

}  // namespace qrn::data
