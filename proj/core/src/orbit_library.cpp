#include "p3b/orbit_library.hpp"

#include <fstream>

#include <json.hpp>

#include "p3b/errors.hpp"

namespace p3b {

using nlohmann::json;

OrbitLibrary::OrbitLibrary(std::string file) : file_(std::move(file)) {
    std::ifstream in(file_);
    if (!in) return;  // fresh library
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw InvalidInput("orbit library is not valid JSON: " + std::string(e.what()));
    }
    if (doc.value("format", "") != "p3b-orbit-library")
        throw InvalidInput("not an orbit library file: " + file_);
    if (doc.value("version", 0) != kFormatVersion)
        throw InvalidInput("unsupported orbit library version");
    for (const auto& j : doc.at("orbits")) {
        OrbitRecord r;
        r.id = j.at("id");
        r.sequence = j.at("sequence");
        r.kind = j.at("kind");
        r.start_end = j.at("start_end");
        r.finish_end = j.at("finish_end");
        r.d0 = j.at("d0");
        r.phi_star = j.at("phi_star");
        r.window = j.at("window");
        r.mirror_of = j.value("mirror_of", "");
        r.path_file = j.value("path_file", "");
        if (j.contains("residuals"))
            for (auto& [k, v] : j.at("residuals").items()) r.residuals[k] = v;
        records_.push_back(std::move(r));
    }
}

const OrbitRecord* OrbitLibrary::find(const std::string& id) const {
    for (const auto& r : records_)
        if (r.id == id) return &r;
    return nullptr;
}

void OrbitLibrary::append(const OrbitRecord& record) {
    if (find(record.id))
        throw InvalidInput("orbit id already recorded (library is append-only): " +
                           record.id);
    records_.push_back(record);
    save();
}

void OrbitLibrary::save() const {
    json doc;
    doc["format"] = "p3b-orbit-library";
    doc["version"] = kFormatVersion;
    doc["orbits"] = json::array();
    for (const auto& r : records_) {
        json j;
        j["id"] = r.id;
        j["sequence"] = r.sequence;
        j["kind"] = r.kind;
        j["start_end"] = r.start_end;
        j["finish_end"] = r.finish_end;
        j["d0"] = r.d0;
        j["phi_star"] = r.phi_star;
        j["window"] = r.window;
        if (!r.mirror_of.empty()) j["mirror_of"] = r.mirror_of;
        if (!r.path_file.empty()) j["path_file"] = r.path_file;
        if (!r.residuals.empty()) {
            json res;
            for (const auto& [k, v] : r.residuals) res[k] = v;
            j["residuals"] = res;
        }
        doc["orbits"].push_back(std::move(j));
    }
    std::ofstream out(file_);
    if (!out) throw InvalidInput("cannot write orbit library: " + file_);
    out << doc.dump(2) << '\n';
}

}  // namespace p3b
