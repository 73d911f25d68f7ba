#include "p3b/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "p3b/errors.hpp"

namespace p3b {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_target(const SyzygySequence& target) {
    if (target.kind != SyzygySequence::Finite)
        throw InvalidInput("target sequence must be finite");
    if (target.symbols.empty()) throw InvalidInput("target sequence is empty");
    for (std::size_t i = 0; i < target.symbols.size(); ++i) {
        if (target.symbols[i] < 1 || target.symbols[i] > 3)
            throw InvalidInput("target symbol outside {1,2,3}");
        if (i > 0 && target.symbols[i] == target.symbols[i - 1])
            throw InvalidInput("target sequence has a stutter: " + target.str());
    }
}

std::string target_string(const SyzygySequence& target) {
    std::string s;
    for (int x : target.symbols) s += char('0' + x);
    return s;
}

FlowOptions shot_options(const FindOptions& opt) {
    FlowOptions fo;
    fo.tol = opt.flow_tol;
    fo.stop_at_depth = opt.horizon_depth;
    return fo;
}

struct Shot {
    ReducedPath path;
    std::vector<int> raw;
    int predicate = 0;
};

// Bisection predicate: the side (c vs d) of the first finish-tail symbol.
// Either observed directly as the crossing after the target prefix, or, when
// the geodesic dives past the horizon before its first winding, predicted
// from the sign of dphi at the deepest sample (the next multiple of pi that
// phi would meet determines the arc).
int tail_predicate(const ReducedPath& path, const std::vector<int>& target,
                   End finish_end, const std::vector<Crossing>& crossings) {
    std::size_t k = target.size();
    for (std::size_t i = 0; i < std::min(k, crossings.size()); ++i)
        if (crossings[i].arc != target[i]) return 0;
    auto [c, d] = arcs_adjacent_to(finish_end);
    if (crossings.size() > k) {
        int sym = crossings[k].arc;
        if (sym != c && sym != d) return 0;
        return sym == c ? 1 : -1;
    }
    if (crossings.size() < k) return 0;
    const PathSample& last = path.samples.back();
    if (last.chart != Chart::Cusp || last.end != finish_end) return 0;
    if (last.dphi == 0.0) return 0;
    long m = (long)std::floor(last.phi / kPi) + (last.dphi > 0 ? 1 : 0);
    int sym = cusp_crossing_arc(finish_end, m);
    if (sym != c && sym != d) return 0;
    return sym == c ? 1 : -1;
}

Shot shoot(End start_end, double phi, End finish_end, const std::vector<int>& target,
           const FindOptions& opt) {
    Shot s;
    s.path = geodesic_flow_from_cusp(start_end, opt.d0, phi, true, opt.horizon_length,
                                     shot_options(opt));
    auto crossings = detect_crossings(s.path);
    for (const auto& c : crossings) s.raw.push_back(c.arc);
    s.predicate = tail_predicate(s.path, target, finish_end, crossings);
    return s;
}

// Launch straight down the leg from the first path sample and glue the
// reversed descent in front, so the start tail is recorded to target_depth.
ReducedPath extend_backward(const ReducedPath& path, End start_end, double d0,
                            double phi, double target_depth, const FindOptions& opt) {
    FlowOptions fo;
    fo.tol = opt.flow_tol;
    fo.stop_at_depth = target_depth + 0.5;
    ReducedPath down = geodesic_flow_from_cusp(start_end, d0, phi, false,
                                               (target_depth - d0) * 2.0 + 5.0, fo);
    ReducedPath out;
    double L = down.samples.back().sigma;
    for (std::size_t i = down.samples.size(); i-- > 0;) {
        PathSample s = down.samples[i];
        s.sigma = L - s.sigma;
        s.w = -1.0 * s.w;
        s.dell = -s.dell;
        s.dphi = -s.dphi;
        out.samples.push_back(s);
    }
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        PathSample s = path.samples[i];
        s.sigma += L;
        out.samples.push_back(s);
    }
    return out;
}

struct Bracket {
    double lo, hi;
    int p_lo, p_hi;
};

std::pair<double, double> bisect(Bracket br, End start_end, End finish_end,
                                 const std::vector<int>& target,
                                 const FindOptions& opt) {
    for (int it = 0; it < opt.bisect_steps && br.hi - br.lo > opt.window_tol; ++it) {
        double mid = 0.5 * (br.lo + br.hi);
        int pm = shoot(start_end, mid, finish_end, target, opt).predicate;
        if (pm == 0) {
            // try a slightly offset probe before giving up
            double alt = mid + 0.1 * (br.hi - br.lo);
            pm = shoot(start_end, alt, finish_end, target, opt).predicate;
            if (pm == 0)
                throw ResolutionExceeded(
                    "bisection predicate undefined inside the bracket");
            mid = alt;
        }
        if (pm == br.p_lo)
            br.lo = mid, br.p_lo = pm;
        else
            br.hi = mid, br.p_hi = pm;
    }
    return {0.5 * (br.lo + br.hi), br.hi - br.lo};
}

PathSample interpolate_core(const PathSample& a, const PathSample& b, double sigma) {
    double h = b.sigma - a.sigma;
    double t = h > 0 ? (sigma - a.sigma) / h : 0.0;
    auto herm = [&](double p0, double p1, double m0, double m1) {
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 * h +
               (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1 * h;
    };
    PathSample s;
    s.sigma = sigma;
    s.u = {herm(a.u.x, b.u.x, a.w.x, b.w.x), herm(a.u.y, b.u.y, a.w.y, b.w.y),
           herm(a.u.z, b.u.z, a.w.z, b.w.z)};
    return s;
}

// Arclength of the point where the start-block depth last descends through
// the marker, used as a geometric origin for cross-path comparison.
double align_origin(const ReducedPath& path, double marker = 2.0) {
    const auto& s = path.samples;
    double found = s.empty() ? 0.0 : s.front().sigma;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].chart != Chart::Cusp) break;
        if (s[i + 1].chart != Chart::Cusp) break;
        double d0 = s[i].depth, d1 = s[i + 1].depth;
        if ((d0 - marker) * (d1 - marker) <= 0.0 && d0 != d1)
            found = s[i].sigma + (marker - d0) / (d1 - d0) * (s[i + 1].sigma - s[i].sigma);
    }
    return found;
}

}  // namespace

std::pair<End, End> resolve_ends(const SyzygySequence& target) {
    validate_target(target);
    return {end_opposite_arc(target.symbols.front()),
            end_opposite_arc(target.symbols.back())};
}

std::vector<ScanEntry> scan(End start_end, End finish_end,
                            const std::vector<int>& target_symbols,
                            const FindOptions& options) {
    if (options.grid < 8) throw InvalidInput("scan grid must be at least 8");
    if (options.d0 < 2.0) throw InvalidInput("launch depth must be at least 2");
    int n = options.grid;
    std::vector<ScanEntry> out(n);
    int workers = std::max(1, options.workers);
    auto work = [&](int w0) {
        for (int i = w0; i < n; i += workers) {
            double phi = -kPi + 2.0 * kPi * (i + 0.5) / n;
            Shot s = shoot(start_end, phi, finish_end, target_symbols, options);
            ScanEntry e;
            e.phi = phi;
            e.code.symbols = s.raw;
            e.code.kind = SyzygySequence::SemiInfiniteTruncated;
            e.tail = classify_tail(s.path, options.horizon_depth);
            e.predicate = s.predicate;
            out[i] = std::move(e);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return out;
}

namespace {

CollisionOrbit build_straight(double phi_star, double window, End start_end,
                              End finish_end, const SyzygySequence& target,
                              const FindOptions& opt) {
    CollisionOrbit orbit;
    Shot s = shoot(start_end, phi_star, finish_end, target.symbols, opt);
    orbit.path = extend_backward(s.path, start_end, opt.d0, phi_star,
                                 opt.horizon_depth + 0.5, opt);
    orbit.start_end = start_end;
    orbit.finish_end = finish_end;
    orbit.shot = {opt.d0, phi_star, window};
    orbit.realized = target;
    orbit.realized.stutter_free = true;
    orbit.start_tail = classify_tail(orbit.path, opt.horizon_depth, true);
    orbit.finish_tail = classify_tail(orbit.path, opt.horizon_depth, false);

    if (s.raw != target.symbols)
        throw VerificationFailed("refined shot does not realize the target code");
    if (orbit.start_tail.kind != TailClass::Straight ||
        orbit.start_tail.end != start_end)
        throw VerificationFailed("start tail is not straight into the start end");
    if (orbit.finish_tail.kind != TailClass::Straight ||
        orbit.finish_tail.end != finish_end)
        throw VerificationFailed("finish tail is not straight into the finish end");
    if (!seam_double_crossing_flag(orbit.realized))
        throw VerificationFailed("orbit re-enters a lifted domain through its seam");
    return orbit;
}

}  // namespace

std::pair<CollisionOrbit, CollisionOrbit> find_straight(const SyzygySequence& target,
                                                        const FindOptions& options) {
    auto [start_end, finish_end] = resolve_ends(target);
    auto entries = scan(start_end, finish_end, target.symbols, options);

    // Brackets between adjacent cells with defined, opposite predicates. The
    // predicate is even in phi (mirror symmetry), so roots come in +-phi
    // pairs; take the upper-region one and bisect its reflection separately.
    std::vector<Bracket> brackets;
    int n = (int)entries.size();
    for (int i = 0; i < n; ++i) {
        const ScanEntry& a = entries[i];
        const ScanEntry& b = entries[(i + 1) % n];
        double hi = i + 1 < n ? b.phi : b.phi + 2.0 * kPi;
        if (a.predicate != 0 && b.predicate != 0 && a.predicate != b.predicate)
            brackets.push_back({a.phi, hi, a.predicate, b.predicate});
    }
    if (brackets.empty())
        throw ResolutionExceeded("no shooting bracket for target " +
                                 target_string(target) + " at grid " +
                                 std::to_string(options.grid));
    auto upper = std::find_if(brackets.begin(), brackets.end(), [](const Bracket& b) {
        return std::sin(0.5 * (b.lo + b.hi)) > 0.0;
    });
    if (upper == brackets.end()) upper = brackets.begin();

    auto [phi1, w1] = bisect(*upper, start_end, finish_end, target.symbols, options);
    CollisionOrbit o1 =
        build_straight(phi1, w1, start_end, finish_end, target, options);
    o1.id = target_string(target) + "-S-0";

    Bracket reflected{-upper->hi, -upper->lo, upper->p_hi, upper->p_lo};
    auto [phi2, w2] = bisect(reflected, start_end, finish_end, target.symbols, options);
    CollisionOrbit o2 =
        build_straight(phi2, w2, start_end, finish_end, target, options);
    o2.id = target_string(target) + "-S-1";
    o2.mirror_of = o1.id;
    return {std::move(o1), std::move(o2)};
}

ReducedPath mirror(const ReducedPath& path) {
    ReducedPath out = path;
    for (auto& s : out.samples) {
        s.u.z = -s.u.z;
        s.w.z = -s.w.z;
        s.phi = -s.phi;
        s.dphi = -s.dphi;
    }
    return out;
}

CollisionOrbit mirror(const CollisionOrbit& orbit) {
    CollisionOrbit out = orbit;
    out.path = mirror(orbit.path);
    out.shot.phi_star = -orbit.shot.phi_star;
    out.mirror_of = orbit.id;
    out.id = orbit.id + "-m";
    return out;
}

std::vector<CollisionOrbit> find_winding(const CollisionOrbit& straight, double eps,
                                         int count, const FindOptions& options) {
    if (eps == 0.0) return {straight};
    if (eps < 0.0 || eps > kEpsMax)
        throw PerturbationTooLarge("eps outside (0, 0.05]");
    if (count < 1) throw InvalidInput("count must be positive");

    // mid-arclength core sample
    const auto& samples = straight.path.samples;
    double mid_sigma = samples.front().sigma + straight.path.length() / 2.0;
    const PathSample* mid = nullptr;
    double best = 1e300;
    for (const auto& s : samples) {
        if (s.chart != Chart::Core) continue;
        double d = std::abs(s.sigma - mid_sigma);
        if (d < best) best = d, mid = &s;
    }
    if (!mid) throw InvalidInput("straight orbit has no core samples");

    FlowOptions fw;
    fw.tol = options.flow_tol;
    fw.max_step_cusp = 2.0;
    fw.stop_after_cusp_crossings = 4;
    const double budget = 3e5;

    std::vector<CollisionOrbit> family;
    for (int sign : {+1, -1}) {
        for (int j = 1; j <= count; ++j) {
            double angle = sign * eps * j / count;
            Vec3 w = mid->w * std::cos(angle) + cross(mid->u, mid->w) * std::sin(angle);
            ReducedPath fwd = geodesic_flow({mid->u, w}, budget, fw);
            ReducedPath bwd = geodesic_flow({mid->u, -1.0 * w}, budget, fw);

            CollisionOrbit orbit;
            double L = bwd.samples.back().sigma;
            for (std::size_t i = bwd.samples.size(); i-- > 0;) {
                PathSample s = bwd.samples[i];
                s.sigma = L - s.sigma;
                s.w = -1.0 * s.w;
                s.dell = -s.dell;
                s.dphi = -s.dphi;
                orbit.path.samples.push_back(s);
            }
            for (std::size_t i = 1; i < fwd.samples.size(); ++i) {
                PathSample s = fwd.samples[i];
                s.sigma += L;
                orbit.path.samples.push_back(s);
            }

            orbit.start_tail = classify_tail(orbit.path, options.horizon_depth, true);
            orbit.finish_tail = classify_tail(orbit.path, options.horizon_depth, false);
            if (orbit.start_tail.kind == TailClass::Core ||
                orbit.finish_tail.kind == TailClass::Core)
                throw VerificationFailed("perturbed orbit has an unclassified tail");
            if (orbit.start_tail.end != straight.start_end ||
                orbit.finish_tail.end != straight.finish_end)
                throw PerturbationTooLarge(
                    "perturbation escapes the target ends within horizon");
            if (orbit.start_tail.kind != TailClass::Winding ||
                orbit.finish_tail.kind != TailClass::Winding)
                throw VerificationFailed("perturbed orbit tails are not winding");

            // core code between the tail blocks must match the straight orbit
            auto crossings = detect_crossings(orbit.path);
            std::vector<int> pre, core, post;
            for (const auto& c : crossings) {
                if (c.sigma <= orbit.start_tail.entry_sigma + 1e-12)
                    pre.push_back(c.arc);
                else if (c.sigma >= orbit.finish_tail.entry_sigma - 1e-12)
                    post.push_back(c.arc);
                else
                    core.push_back(c.arc);
            }
            if (core != straight.realized.symbols)
                throw VerificationFailed("perturbed orbit changed the core code");

            orbit.start_end = straight.start_end;
            orbit.finish_end = straight.finish_end;
            orbit.shot = straight.shot;
            orbit.realized.symbols = pre;
            orbit.realized.symbols.insert(orbit.realized.symbols.end(), core.begin(),
                                          core.end());
            orbit.realized.symbols.insert(orbit.realized.symbols.end(), post.begin(),
                                          post.end());
            orbit.realized.left_tail = pre.size();
            orbit.realized.right_tail = post.size();
            orbit.realized.kind = SyzygySequence::BiInfiniteTruncated;
            orbit.realized.stutter_free = true;
            for (std::size_t i = 0; i + 1 < orbit.realized.symbols.size(); ++i)
                if (orbit.realized.symbols[i] == orbit.realized.symbols[i + 1])
                    orbit.realized.stutter_free = false;
            orbit.mirror_of = "";
            orbit.id = target_string(straight.realized) + "-W-" +
                       (sign > 0 ? "p" : "m") + std::to_string(j);
            family.push_back(std::move(orbit));
        }
    }
    return family;
}

double aligned_core_distance(const ReducedPath& a, const ReducedPath& b) {
    double oa = align_origin(a), ob = align_origin(b);
    const auto& bs = b.samples;
    double worst = 0.0;
    for (const auto& sa : a.samples) {
        if (sa.chart != Chart::Core) continue;
        double sigma_b = sa.sigma - oa + ob;
        // binary search the bracketing pair in b
        std::size_t lo = 0, hi = bs.size();
        while (hi - lo > 1) {
            std::size_t m = (lo + hi) / 2;
            if (bs[m].sigma <= sigma_b)
                lo = m;
            else
                hi = m;
        }
        if (hi >= bs.size() || bs[lo].sigma > sigma_b) continue;
        if (bs[lo].chart != Chart::Core || bs[hi].chart != Chart::Core) continue;
        PathSample interp = interpolate_core(bs[lo], bs[hi], sigma_b);
        worst = std::max(worst, norm(sa.u - interp.u));
    }
    return worst;
}

double max_pointwise_distance(const ReducedPath& a, const ReducedPath& b) {
    return aligned_core_distance(a, b);
}

bool seam_double_crossing_flag(const SyzygySequence& realized) {
    SyzygySequence finite = realized;
    finite.kind = SyzygySequence::Finite;
    auto word = tiling_word(finite, Region::Lower);
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (word[i] == -word[i + 1]) return false;
    return true;
}

}  // namespace p3b
