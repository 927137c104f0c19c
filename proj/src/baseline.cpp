#include "smscore/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "smscore/error.hpp"

namespace smscore {

double score_q0(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (b.size() != data.d())
        throw ShapeError("baseline", "coefficient dimension differs from data dimension");
    if (b.isZero(0.0)) throw DomainError("baseline", "score is undefined at b = 0");
    if (data.n() < 1) throw InsufficientDataError("baseline", "empty dataset");
    const Eigen::VectorXd index = data.x * b;
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        correct += (index[i] >= 0.0) == (data.y[i] == 1) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(data.n());
}

namespace {

struct Event {
    double angle;
    Eigen::Index obs;
    bool enters_positive;
};

}  // namespace

MaxScoreFit fit_maxscore_2d(const Dataset& data) {
    if (data.d() != 2) throw ShapeError("baseline", "maximum score search is implemented for d = 2 only");
    if (data.n() < 2) throw InsufficientDataError("baseline", "need at least two observations");
    if (data.y.size() != data.n()) throw ShapeError("baseline", "y and x row counts differ");

    constexpr double pi = std::numbers::pi;
    const Eigen::Index n = data.n();

    // x_i'b(theta) >= 0 exactly on the closed arc from atan2(-x1, x2) (entering)
    // counterclockwise to atan2(x1, -x2) (leaving). Zero rows never change sign.
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(2 * n));
    Eigen::Index constant_hits = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x1 = data.x(i, 0);
        const double x2 = data.x(i, 1);
        if (x1 == 0.0 && x2 == 0.0) {
            constant_hits += data.y[i] == 1 ? 1 : 0;
            continue;
        }
        events.push_back({std::atan2(-x1, x2), i, true});
        events.push_back({std::atan2(x1, -x2), i, false});
    }
    if (events.empty()) throw DegenerateDataError("baseline", "every regressor row is zero");
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.angle < b.angle; });

    // Group events sharing an angle; arc k runs from group k to group k+1 (cyclic).
    std::vector<double> angles;
    std::vector<std::size_t> group_start;
    for (std::size_t e = 0; e < events.size(); ++e) {
        if (angles.empty() || events[e].angle != angles.back()) {
            angles.push_back(events[e].angle);
            group_start.push_back(e);
        }
    }
    group_start.push_back(events.size());
    const auto m = angles.size();

    // State on arc 0 follows from which of each row's events is met first when
    // sweeping forward from group 1 (group 0 comes last).
    std::vector<std::size_t> enter_key(static_cast<std::size_t>(n), 0);
    std::vector<std::size_t> leave_key(static_cast<std::size_t>(n), 0);
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t key = g == 0 ? m : g;
        for (std::size_t e = group_start[g]; e < group_start[g + 1]; ++e) {
            auto& slot = events[e].enters_positive ? enter_key : leave_key;
            slot[static_cast<std::size_t>(events[e].obs)] = key;
        }
    }
    Eigen::Index count = constant_hits;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (enter_key[idx] == 0) continue;  // zero row
        const bool positive = leave_key[idx] < enter_key[idx];
        count += positive == (data.y[i] == 1) ? 1 : 0;
    }

    auto arc_width = [&](std::size_t k) {
        return k + 1 < m ? angles[k + 1] - angles[k] : angles[0] + 2.0 * pi - angles[k];
    };
    auto arc_mid = [&](std::size_t k) {
        double mid = angles[k] + 0.5 * arc_width(k);
        if (mid > pi) mid -= 2.0 * pi;
        return mid;
    };

    Eigen::Index best_count = count;
    std::size_t best_arc = 0;
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t e = group_start[k]; e < group_start[k + 1]; ++e) {
            const bool y1 = data.y[events[e].obs] == 1;
            // Entering the positive side turns a y = 0 hit into a miss and vice versa.
            count += events[e].enters_positive == y1 ? 1 : -1;
        }
        if (count > best_count ||
            (count == best_count && std::abs(arc_mid(k)) < std::abs(arc_mid(best_arc)))) {
            best_count = count;
            best_arc = k;
        }
    }

    MaxScoreFit out;
    out.theta_hat = arc_mid(best_arc);
    out.score = static_cast<double>(best_count) / static_cast<double>(n);
    const double half = 0.5 * arc_width(best_arc);
    out.argmax_interval = {out.theta_hat - half, out.theta_hat + half};
    return out;
}

}  // namespace smscore
