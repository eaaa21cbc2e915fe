#include "tbar/balls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tbar/degrees.hpp"
#include "tbar/error.hpp"

namespace tbar {

namespace {

double dist(const Point& a, const Point& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Radius of ball b at scale sigma, given that it is `ratio` = r/sigma when growing.
double radius_at(const Ball& b, double ratio, double sigma) { return b.frozen ? b.radius : ratio * sigma; }

Ball merge(const Ball& a, const Ball& b, int n) {
    Ball m;
    m.radius = a.radius + b.radius;
    for (int i = 0; i < n; ++i) m.center[i] = (a.radius * a.center[i] + b.radius * b.center[i]) / m.radius;
    m.members = a.members;
    m.members.insert(m.members.end(), b.members.begin(), b.members.end());
    std::sort(m.members.begin(), m.members.end());
    m.degree_sum = a.degree_sum + b.degree_sum;
    m.aggregate = std::abs(m.degree_sum);
    m.frozen = m.aggregate == 0;
    return m;
}

// Merge any pair of closed balls that intersect, repeating until the family is disjoint.
void resolve_overlaps(BallCollection& c) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < c.balls.size() && !changed; ++i)
            for (std::size_t j = i + 1; j < c.balls.size() && !changed; ++j) {
                const Ball& a = c.balls[i];
                const Ball& b = c.balls[j];
                if (dist(a.center, b.center, c.n) <= (a.radius + b.radius) * (1.0 + 1e-12)) {
                    Ball m = merge(a, b, c.n);
                    c.events.push_back({c.scale, m.center, m.radius, m.aggregate});
                    c.balls.erase(c.balls.begin() + static_cast<std::ptrdiff_t>(j));
                    c.balls[i] = m;
                    changed = true;
                }
            }
    }
}

} // namespace

BallCollection initial_balls(const std::vector<Singularity>& sings, double sigma0, int n) {
    if (!(sigma0 > 0)) throw Error(ErrorCode::InvalidArgument, "sigma0 must be positive");
    BallCollection c;
    c.n = n;
    c.scale = sigma0;
    c.singularities = sings;
    int dmax = 0;
    for (const auto& s : sings) dmax = std::max(dmax, std::abs(s.degree));
    const double D = 1.0 + dmax;
    for (std::size_t i = 0; i < sings.size(); ++i)
        for (std::size_t j = i + 1; j < sings.size(); ++j)
            if (dist(sings[i].position, sings[j].position, n) <= 2.0 * D * sigma0)
                throw Error(ErrorCode::Overlap, "balls of radius D*sigma0 around singularities " + std::to_string(i) +
                                                    " and " + std::to_string(j) + " intersect");
    for (std::size_t i = 0; i < sings.size(); ++i) {
        Ball b;
        b.center = sings[i].position;
        b.radius = sings[i].degree != 0 ? sigma0 * std::abs(sings[i].degree) : sigma0;
        b.members = {static_cast<int>(i)};
        b.degree_sum = sings[i].degree;
        b.aggregate = std::abs(b.degree_sum);
        b.frozen = b.aggregate == 0;
        c.balls.push_back(b);
    }
    c.clamped = std::any_of(c.balls.begin(), c.balls.end(), [](const Ball& b) { return b.radius >= 0.5; });
    return c;
}

BallCollection grow_to_scale(const BallCollection& coll, double sigma_target) {
    if (!(sigma_target > coll.scale)) throw Error(ErrorCode::InvalidArgument, "target scale must exceed the current scale");
    BallCollection c = coll;
    while (true) {
        std::vector<double> ratio(c.balls.size());
        for (std::size_t i = 0; i < c.balls.size(); ++i) ratio[i] = c.balls[i].radius / c.scale;
        // Earliest tangency between two balls.
        double next = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.balls.size(); ++i)
            for (std::size_t j = i + 1; j < c.balls.size(); ++j) {
                const Ball& a = c.balls[i];
                const Ball& b = c.balls[j];
                if (a.frozen && b.frozen) continue;
                const double d = dist(a.center, b.center, c.n);
                double t;
                if (!a.frozen && !b.frozen) t = d / (ratio[i] + ratio[j]);
                else if (a.frozen) t = (d - a.radius) / ratio[j];
                else t = (d - b.radius) / ratio[i];
                next = std::min(next, std::max(t, c.scale));
            }
        const double stop = std::min(next, sigma_target);
        for (std::size_t i = 0; i < c.balls.size(); ++i) c.balls[i].radius = radius_at(c.balls[i], ratio[i], stop);
        c.scale = stop;
        if (next > sigma_target) break;
        resolve_overlaps(c);
    }
    c.clamped = c.clamped || std::any_of(c.balls.begin(), c.balls.end(), [](const Ball& b) { return b.radius >= 0.5; });
    return c;
}

double lower_bound_energy(const std::vector<Singularity>& sings, double r, double p, int k) {
    if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "boundary distance must be positive");
    int total = 0;
    for (const auto& s : sings) total += s.degree;
    const int d = std::abs(total);
    if (d == 0) return 0.0;
    return d * F_p_eval(r / (2.0 * d), k, p);
}

std::string check_ball_invariants(const BallCollection& c, double tol) {
    std::vector<int> covered(c.singularities.size(), 0);
    for (std::size_t i = 0; i < c.balls.size(); ++i) {
        const Ball& b = c.balls[i];
        if (b.members.empty()) return "ball " + std::to_string(i) + " contains no singularity";
        int sum = 0;
        for (int mbr : b.members) {
            ++covered[static_cast<std::size_t>(mbr)];
            sum += c.singularities[static_cast<std::size_t>(mbr)].degree;
            if (dist(c.singularities[static_cast<std::size_t>(mbr)].position, b.center, c.n) > b.radius * (1 + tol) + tol)
                return "singularity " + std::to_string(mbr) + " lies outside its ball";
        }
        if (std::abs(sum) != b.aggregate) return "aggregate degree mismatch in ball " + std::to_string(i);
        if (b.radius < c.scale * b.aggregate * (1 - tol)) return "ball " + std::to_string(i) + " violates r >= sigma d";
        for (std::size_t j = i + 1; j < c.balls.size(); ++j)
            if (dist(b.center, c.balls[j].center, c.n) <= b.radius + c.balls[j].radius)
                return "balls " + std::to_string(i) + " and " + std::to_string(j) + " intersect";
    }
    for (std::size_t s = 0; s < covered.size(); ++s)
        if (covered[s] != 1) return "singularity " + std::to_string(s) + " covered " + std::to_string(covered[s]) + " times";
    return {};
}

double total_radius(const BallCollection& coll) {
    double s = 0.0;
    for (const auto& b : coll.balls) s += b.radius;
    return s;
}

} // namespace tbar
