#pragma once

#include <map>
#include <string>
#include <vector>

namespace p3b {

struct OrbitRecord {
    std::string id;        // e.g. "31-S-0", "1-W-p2"
    std::string sequence;  // serialized syzygy sequence
    std::string kind;      // "straight" | "winding"
    std::string start_end, finish_end;
    double d0 = 0.0;
    double phi_star = 0.0;
    double window = 0.0;
    std::string mirror_of;
    std::string path_file;  // CSV of the reduced path
    std::map<std::string, double> residuals;
};

// Versioned, append-only JSON document mapping orbit ids to records. Existing
// records are never rewritten; appending an id that already exists throws.
class OrbitLibrary {
  public:
    explicit OrbitLibrary(std::string file);

    const std::vector<OrbitRecord>& records() const { return records_; }
    const OrbitRecord* find(const std::string& id) const;
    void append(const OrbitRecord& record);  // persists immediately

    static constexpr int kFormatVersion = 1;

  private:
    void save() const;
    std::string file_;
    std::vector<OrbitRecord> records_;
};

}  // namespace p3b
