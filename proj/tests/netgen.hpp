// Config builders for tests: hand-made small networks and random valid ones.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "tsnnc/network.hpp"

namespace netgen {

using nlohmann::json;

struct Rng {
    std::mt19937 eng;
    explicit Rng(unsigned seed) : eng(seed) {}
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    bool coin(int percent) { return pick(1, 100) <= percent; }
};

inline json node(const std::string& id, bool sw) { return {{"id", id}, {"type", sw ? "sw" : "es"}}; }

inline json link(const std::string& from, const std::string& to, long rate)
{
    return {{"id", from + "-" + to}, {"from", from}, {"to", to}, {"rate_bps", rate}};
}

inline json port(const std::string& from, const std::string& to, long period_us, json windows, json slopes)
{
    return {{"id", from + ">" + to},
            {"link", from + "-" + to},
            {"gcl_period_us", period_us},
            {"st_windows", std::move(windows)},
            {"idle_slopes_bps", std::move(slopes)}};
}

inline json flow(const std::string& id, int cls, long bits, long period_us, json routes)
{
    json f{{"id", id}, {"class", cls}, {"frame_bits", bits}, {"period_us", period_us}};
    if (routes.size() == 1)
        f["route"] = routes[0];
    else
        f["routes"] = std::move(routes);
    return f;
}

// Windows on a period, keeping every gap at least min_gap_us wide.
inline json random_windows(Rng& rng, long period_us, int max_windows, long min_gap_us)
{
    json ws = json::array();
    int n = rng.pick(0, max_windows);
    long budget = period_us - n * min_gap_us;
    if (n == 0 || budget <= n)
        return ws;
    long cursor = rng.pick(0, static_cast<int>(min_gap_us / 2));
    for (int i = 0; i < n; ++i) {
        long len = rng.pick(5, static_cast<int>(std::max<long>(5, budget / (2 * n))));
        if (cursor + len + min_gap_us > period_us)
            break;
        ws.push_back({cursor, len});
        cursor += len + min_gap_us + rng.pick(0, 20);
    }
    // The wrap-around gap must be wide enough too.
    while (!ws.empty()) {
        long first = ws.front()[0].get<long>();
        long end = ws.back()[0].get<long>() + ws.back()[1].get<long>();
        if (first + period_us - end >= min_gap_us)
            break;
        ws.erase(ws.size() - 1);
    }
    return ws;
}

// Idle slopes for n classes, non-increasing, summing to at most 85% of C.
inline json random_slopes(Rng& rng, int n, long rate)
{
    json s = json::array();
    int prev = rng.pick(10, 40);
    int total = 0;
    for (int i = 0; i < n; ++i) {
        int pct = i == 0 ? prev : rng.pick(std::min(5, prev), prev);
        pct = std::min(pct, 85 - total - 5 * (n - i - 1));
        total += pct;
        prev = pct;
        s.push_back(rate / 100 * pct);
    }
    return s;
}

// Frame size and a period keeping one flow below 2% of C = 10^8.
inline std::pair<long, long> random_frame(Rng& rng)
{
    long bits = rng.pick(4, 120) * 100;
    long period = rng.pick(4, 16) * 250;
    long floor_us = (bits / 2 + 249) / 250 * 250;
    return {bits, std::max(period, floor_us)};
}

// One ES sending through one output port to a second ES.
inline json random_single_port(Rng& rng, int max_classes = 4, int max_windows = 3)
{
    const long C = 100000000;
    int classes = rng.pick(1, max_classes);
    long period = rng.pick(2, 10) * 100;
    json doc;
    doc["nodes"] = json::array({node("src", false), node("dst", false)});
    doc["links"] = json::array({link("src", "dst", C)});
    doc["ports"] = json::array(
        {port("src", "dst", period, random_windows(rng, period, max_windows, 130), random_slopes(rng, classes, C))});
    doc["flows"] = json::array();
    int nflows = rng.pick(classes, classes + 3);
    for (int k = 0; k < nflows; ++k) {
        int cls = k < classes ? k + 1 : rng.pick(1, classes);
        auto [bits, period_us] = random_frame(rng);
        doc["flows"].push_back(flow("f" + std::to_string(k), cls, bits, period_us, json::array({json::array({"src>dst"})})));
    }
    doc["d_tech_us"] = 0;
    doc["be_max_frame_bits"] = rng.coin(70) ? 12336 : 0;
    doc["credit_mode"] = "frozen";
    return doc;
}

// Up to max_es end systems around one or two switches.
inline json random_multihop(Rng& rng, int max_es = 4, int max_sw = 2, int max_flows = 10, int max_classes = 3)
{
    const long C = 100000000;
    int nes = rng.pick(2, max_es);
    int nsw = rng.pick(1, max_sw);
    int classes = rng.pick(1, max_classes);
    long period = rng.pick(4, 10) * 100;
    json doc;
    doc["nodes"] = json::array();
    doc["links"] = json::array();
    doc["ports"] = json::array();
    auto es = [](int i) { return "es" + std::to_string(i); };
    auto sw = [](int i) { return "sw" + std::to_string(i); };
    auto attach = [&](int i) { return i % nsw; };
    for (int i = 0; i < nes; ++i)
        doc["nodes"].push_back(node(es(i), false));
    for (int i = 0; i < nsw; ++i)
        doc["nodes"].push_back(node(sw(i), true));
    json slopes = random_slopes(rng, classes, C);
    auto add_pair = [&](const std::string& a, const std::string& b) {
        for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            doc["links"].push_back(link(x, y, C));
            doc["ports"].push_back(port(x, y, period, random_windows(rng, period, 2, 130), slopes));
        }
    };
    for (int i = 0; i < nes; ++i)
        add_pair(es(i), sw(attach(i)));
    if (nsw == 2)
        add_pair(sw(0), sw(1));

    auto route = [&](int s, int d) {
        json r = json::array();
        r.push_back(es(s) + ">" + sw(attach(s)));
        if (attach(s) != attach(d))
            r.push_back(sw(attach(s)) + ">" + sw(attach(d)));
        r.push_back(sw(attach(d)) + ">" + es(d));
        return r;
    };
    doc["flows"] = json::array();
    int nflows = rng.pick(1, max_flows);
    for (int k = 0; k < nflows; ++k) {
        int s = rng.pick(0, nes - 1);
        int d = rng.pick(0, nes - 2);
        if (d >= s)
            ++d;
        json routes = json::array({route(s, d)});
        if (nes > 2 && rng.coin(20)) {
            int d2 = rng.pick(0, nes - 1);
            if (d2 != s && d2 != d)
                routes.push_back(route(s, d2));
        }
        auto [bits, period_us] = random_frame(rng);
        doc["flows"].push_back(flow("f" + std::to_string(k), rng.pick(1, classes), bits, period_us, routes));
    }
    doc["d_tech_us"] = rng.pick(0, 4);
    doc["be_max_frame_bits"] = 12336;
    doc["credit_mode"] = "frozen";
    return doc;
}

}  // namespace netgen
