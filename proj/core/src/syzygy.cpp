#include "p3b/syzygy.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "p3b/errors.hpp"

namespace p3b {

namespace {

constexpr double kPi = std::numbers::pi;

double hermite(double p0, double p1, double m0, double m1, double t) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

Vec3 hermite_vec(const Vec3& p0, const Vec3& p1, const Vec3& m0, const Vec3& m1,
                 double t) {
    return {hermite(p0.x, p1.x, m0.x, m1.x, t), hermite(p0.y, p1.y, m0.y, m1.y, t),
            hermite(p0.z, p1.z, m0.z, m1.z, t)};
}

void core_crossings(const PathSample& a, const PathSample& b,
                    std::vector<Crossing>& out) {
    bool sa = a.u.z >= 0.0, sb = b.u.z >= 0.0;
    if (sa == sb) return;
    double h = b.sigma - a.sigma;
    if (h <= 0) return;
    Vec3 m0 = h * a.w, m1 = h * b.w;
    double lo = 0.0, hi = 1.0;
    double flo = a.u.z;
    while ((hi - lo) * h > 1e-10) {
        double mid = 0.5 * (lo + hi);
        double f = hermite(a.u.z, b.u.z, m0.z, m1.z, mid);
        if ((f >= 0.0) == (flo >= 0.0)) {
            lo = mid;
            flo = f;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    Vec3 u = normalized(hermite_vec(a.u, b.u, m0, m1, t));
    for (End end : {End::B12, End::B13, End::B23}) {
        if (angle_between(u, collision_point(end)) < 1e-6)
            throw AmbiguousCrossing("equator crossing within 1e-6 of a collision point");
    }
    out.push_back({a.sigma + t * h, arc_at_azimuth(std::atan2(u.y, u.x)), false});
}

void cusp_crossings(const PathSample& a, const PathSample& b,
                    std::vector<Crossing>& out) {
    long k0 = (long)std::floor(a.phi / kPi);
    long k1 = (long)std::floor(b.phi / kPi);
    if (k0 == k1) return;
    double dphi = b.phi - a.phi, ds = b.sigma - a.sigma;
    auto emit = [&](long m) {
        double t = (m * kPi - a.phi) / dphi;
        out.push_back({a.sigma + t * ds, cusp_crossing_arc(a.end, m), true, a.end});
    };
    if (k1 > k0)
        for (long m = k0 + 1; m <= k1; ++m) emit(m);
    else
        for (long m = k0; m > k1; --m) emit(m);
}

}  // namespace

int cusp_crossing_arc(End end, long k) {
    bool even = (k % 2) == 0;
    switch (end) {
        case End::B12: return even ? 1 : 2;
        case End::B23: return even ? 2 : 3;
        case End::B13: return even ? 3 : 1;
    }
    return 0;
}

std::vector<Crossing> detect_crossings(const ReducedPath& path) {
    std::vector<Crossing> out;
    const auto& s = path.samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const PathSample& a = s[i];
        const PathSample& b = s[i + 1];
        if (a.chart == Chart::Core && b.chart == Chart::Core)
            core_crossings(a, b, out);
        else if (a.chart == Chart::Cusp && b.chart == Chart::Cusp && a.end == b.end)
            cusp_crossings(a, b, out);
        // Chart-transition pairs share the same point; nothing can be missed.
    }
    return out;
}

SyzygySequence code(const ReducedPath& path) {
    SyzygySequence seq;
    for (const Crossing& c : detect_crossings(path)) seq.symbols.push_back(c.arc);
    seq.stutter_free = true;
    for (std::size_t i = 0; i + 1 < seq.symbols.size(); ++i)
        if (seq.symbols[i] == seq.symbols[i + 1]) seq.stutter_free = false;
    return seq;
}

SyzygySequence cancel_stutters(const SyzygySequence& seq) {
    SyzygySequence out;
    out.kind = seq.kind;
    for (int s : seq.symbols) {
        if (!out.symbols.empty() && out.symbols.back() == s)
            out.symbols.pop_back();
        else
            out.symbols.push_back(s);
    }
    out.stutter_free = true;
    return out;
}

std::vector<int> tiling_word(const SyzygySequence& seq, Region start_region) {
    if (seq.kind != SyzygySequence::Finite)
        throw InvalidInput("tiling_word requires a finite sequence");
    for (std::size_t i = 0; i + 1 < seq.symbols.size(); ++i)
        if (seq.symbols[i] == seq.symbols[i + 1])
            throw InvalidInput("tiling_word requires a stutter-free sequence");
    std::vector<int> word;
    Region region = start_region;
    for (int a : seq.symbols) {
        if (a < 1 || a > 3) throw InvalidInput("syzygy symbol outside {1,2,3}");
        if (a != 3) word.push_back(region == Region::Lower ? a : -a);
        region = region == Region::Lower ? Region::Upper : Region::Lower;
    }
    return word;
}

std::string SyzygySequence::str() const {
    std::string out;
    std::size_t n = symbols.size();
    std::size_t core_lo = left_tail, core_hi = n - right_tail;
    if (left_tail > 0) out += "...";
    for (std::size_t i = 0; i < n; ++i) {
        if (i == core_lo && left_tail > 0) out += '|';
        if (i == core_hi && right_tail > 0) out += '|';
        out += char('0' + symbols[i]);
    }
    if (right_tail > 0) out += "...";
    return out;
}

SyzygySequence SyzygySequence::parse(const std::string& text) {
    SyzygySequence seq;
    bool left_open = false, right_open = false;
    std::vector<std::vector<int>> groups(1);
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c == '.') {
            if (groups.size() == 1 && groups[0].empty())
                left_open = true;
            else
                right_open = true;
            ++i;
        } else if ((unsigned char)c == 0xe2 && i + 2 < text.size() + 1) {
            // UTF-8 ellipsis
            if (groups.size() == 1 && groups[0].empty())
                left_open = true;
            else
                right_open = true;
            i += 3;
        } else if (c == '|') {
            groups.emplace_back();
            ++i;
        } else if (c >= '1' && c <= '3') {
            groups.back().push_back(c - '0');
            ++i;
        } else if (std::isspace((unsigned char)c)) {
            ++i;
        } else {
            throw InvalidInput(std::string("unexpected character in syzygy sequence: ") + c);
        }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g == 0 && left_open && groups.size() > 1) seq.left_tail = groups[g].size();
        if (g + 1 == groups.size() && right_open && groups.size() > 1)
            seq.right_tail = groups[g].size();
        for (int s : groups[g]) seq.symbols.push_back(s);
    }
    if (left_open && right_open)
        seq.kind = BiInfiniteTruncated;
    else if (left_open || right_open)
        seq.kind = SemiInfiniteTruncated;
    seq.stutter_free = true;
    for (std::size_t i = 0; i + 1 < seq.symbols.size(); ++i)
        if (seq.symbols[i] == seq.symbols[i + 1]) seq.stutter_free = false;
    return seq;
}

}  // namespace p3b
