#include <doctest.h>

#include <sstream>

#include "netgen.hpp"
#include "tsnnc/analysis.hpp"
#include "tsnnc/st_curves.hpp"

using namespace tsnnc;
using nlohmann::json;

namespace {

Rational us(long v) { return rat(v, 1000000); }

// es0 -> sw -> es1 with optional ST window on every port.
json line(json windows, int flows_per_class = 1)
{
    const long C = 100000000;
    json doc;
    doc["nodes"] = json::array({netgen::node("es0", false), netgen::node("sw", true), netgen::node("es1", false)});
    doc["links"] = json::array({netgen::link("es0", "sw", C), netgen::link("sw", "es1", C)});
    json slopes = json::array({40000000, 20000000});
    doc["ports"] = json::array({netgen::port("es0", "sw", 500, windows, slopes),
                                netgen::port("sw", "es1", 500, windows, slopes)});
    doc["flows"] = json::array();
    for (int cls = 1; cls <= 2; ++cls)
        for (int k = 0; k < flows_per_class; ++k)
            doc["flows"].push_back(netgen::flow("c" + std::to_string(cls) + "f" + std::to_string(k), cls, 4000,
                                                1000, json::array({json::array({"es0>sw", "sw>es1"})})));
    doc["d_tech_us"] = 2;
    doc["be_max_frame_bits"] = 12336;
    doc["credit_mode"] = "frozen";
    return doc;
}

DelayReport run(const json& doc, CreditMode mode, Shaping shaping = Shaping::Full)
{
    return analyze(Network::validate(parse_config(doc)), AnalysisOptions{mode, shaping, false});
}

}  // namespace

TEST_CASE("service curve examples")
{
    Curve b = avb_service_curve(make_zero(), 100000000, 40000000, 4000);
    CHECK(b == make_rate_latency(40000000, us(100)));

    OutputPort full;
    full.rate = 100000000;
    full.gcl_period = us(100);
    full.windows = {{0, us(100)}};
    CHECK_THROWS_AS(avb_service_curve(st_arrival_curve(full), full.rate, 40000000, 4000), UnstableError);
}

TEST_CASE("frozen and non-frozen service on the same port")
{
    Network net = Network::validate(parse_config(line(json::array({json::array({0, 100})}))));
    std::size_t p = net.port_index("sw>es1");
    const OutputPort& port = net.port(p);
    auto fb = port_credit_bounds(net, p, CreditMode::Frozen);
    auto nb = port_credit_bounds(net, p, CreditMode::NonFrozen);
    for (std::size_t cls = 0; cls < 2; ++cls) {
        CAPTURE(cls);
        Curve bf = avb_service_curve(gbst_arrival_curve(port, net.guard_bands(p, cls)), port.rate,
                                     port.idle_slopes[cls], fb[cls].c_max);
        Curve bn = avb_service_curve(st_arrival_curve(port), port.rate, port.idle_slopes[cls], nb[cls].c_max);
        // Guard bands lower the frozen-mode rate; non-frozen pays with a larger credit bound instead.
        CHECK(bf.rate() < bn.rate());
        CHECK(nb[cls].c_max > fb[cls].c_max);
        // The curves cross: frozen gives earlier service, non-frozen more service in the long run.
        bool above = false, below = false;
        for (Rational t = 0; t <= us(20000); t += us(10)) {
            above = above || bf(t) > bn(t);
            below = below || bf(t) < bn(t);
        }
        CHECK(above);
        CHECK(below);
    }
}

TEST_CASE("arrival curve helpers")
{
    AvbFlow f;
    f.frame_bits = 10000;
    f.period = rat(1, 1000);
    Curve a = source_arrival(f);
    CHECK(a == make_affine(10000, 10000000));
    f.frame_bits = 0;
    CHECK(source_arrival(f) == make_zero());

    Curve moved = propagate_arrival(a, us(100));
    CHECK(moved.right_limit(0) == 11000);
    CHECK(moved(us(50)) == 11000 + 500);
    CHECK(moved.rate() == 10000000);
    CHECK(propagate_arrival(a, 0) == a);
    Curve st = make_staircase({2000, us(30), us(100)});
    Curve sh = propagate_arrival(st, us(20));
    for (Rational t = 0; t <= us(400); t += us(5))
        CHECK(sh(t) == st(t + us(20)));
}

TEST_CASE("group arrival examples")
{
    Rational C = 100000000;
    Curve sigma = add_constant(make_affine(0, 40000000), 10000);
    // A single light flow: the sum is below both caps.
    Curve one = make_affine(4000, 4000000);
    Curve g = group_arrival(one, C, 4000, sigma, Shaping::Full);
    CHECK(g.right_limit(0) == 4000);
    CHECK(g(us(1000)) == one(us(1000)));
    // Many bursty flows: the link cap binds at small t.
    std::vector<Curve> many(8, make_affine(12000, 1200000));
    Curve burst = sum(many);
    Curve cap = group_arrival(burst, C, 12000, sigma, Shaping::Full);
    CHECK(cap.right_limit(0) == 12000);
    CHECK(cap(us(10)) == 12000 + 1000);
    CHECK(cap(us(10)) < burst(us(10)));
    CHECK(group_arrival(burst, C, 12000, sigma, Shaping::None) == burst);
}

TEST_CASE("hop delay and end to end")
{
    Curve alpha = make_affine(1000, 1000000);
    Curve beta = make_rate_latency(10000000, us(100));
    CHECK(horizontal_deviation(alpha, beta) == us(100) + Rational(1000) / 10000000);
    CHECK(end_to_end({us(100), us(150)}, us(2)) == us(252));
    CHECK(end_to_end({us(42)}, us(2)) == us(42));
    CHECK(end_to_end({}, us(2)) == 0);
}

TEST_CASE("analyze a line network")
{
    json doc = line(json::array({json::array({0, 100})}), 2);
    DelayReport full = run(doc, CreditMode::Frozen);
    DelayReport none = run(doc, CreditMode::Frozen, Shaping::None);
    REQUIRE(full.flows.size() == 4);
    for (const FlowDelay& f : full.flows) {
        REQUIRE(f.routes.size() == 1);
        const RouteDelay& r = f.routes[0];
        CHECK(r.e2e == end_to_end(r.hop_delays, us(2)));
        CHECK(r.e2e > 0);
        CHECK(f.worst() <= none.flow(f.id).worst());
    }
    // Same class at the same port: same hop delay.
    CHECK(full.flow("c1f0").routes[0].hop_delays == full.flow("c1f1").routes[0].hop_delays);
    CHECK(full.port_classes.size() == 4);

    std::ostringstream csv;
    write_csv(csv, full);
    CHECK(csv.str().rfind("flow,class,destination,hops_us,e2e_us\nc1f0,1,sw>es1,", 0) == 0);
    json j = to_json(full);
    CHECK(j["flows"].size() == 4);
    CHECK(j["shaping"] == "full");
}

TEST_CASE("modes agree without guard bands")
{
    json doc = line(json::array());
    DelayReport f = run(doc, CreditMode::Frozen);
    DelayReport n = run(doc, CreditMode::NonFrozen);
    for (std::size_t i = 0; i < f.flows.size(); ++i)
        CHECK(f.flows[i].worst() == n.flows[i].worst());
}

TEST_CASE("empty flow set gives an empty report")
{
    json doc = line(json::array());
    doc["flows"] = json::array();
    DelayReport r = run(doc, CreditMode::Frozen);
    CHECK(r.flows.empty());
    CHECK(r.port_classes.empty());
}

TEST_CASE("overloaded class is reported as unstable")
{
    json doc = line(json::array(), 1);
    doc["flows"][0]["frame_bits"] = 12000;
    doc["flows"][0]["period_us"] = 200;  // 60 Mb/s against a 40 Mb/s slope
    CHECK_THROWS_AS(run(doc, CreditMode::Frozen), UnstableError);
}

TEST_CASE("random configs: shaping and ST monotonicity")
{
    netgen::Rng rng(21);
    int done = 0;
    for (int iter = 0; iter < 15; ++iter) {
        json doc = netgen::random_multihop(rng);
        CAPTURE(doc.dump());
        Network net = Network::validate(parse_config(doc));
        DelayReport full, none;
        try {
            full = analyze(net, {CreditMode::Frozen, Shaping::Full, false});
            none = analyze(net, {CreditMode::Frozen, Shaping::None, false});
        } catch (const UnstableError&) {
            continue;
        }
        for (std::size_t i = 0; i < full.flows.size(); ++i)
            CHECK(full.flows[i].worst() <= none.flows[i].worst());
        ++done;
    }
    CHECK(done >= 10);
}

TEST_CASE("longer ST windows never shorten the bounds")
{
    DelayReport prev;
    bool first = true;
    for (long len : {0, 25, 50, 100, 200}) {
        json ws = len ? json::array({json::array({100, len})}) : json::array();
        DelayReport r = run(line(ws, 2), CreditMode::Frozen);
        if (!first)
            for (std::size_t i = 0; i < r.flows.size(); ++i)
                CHECK(r.flows[i].worst() >= prev.flows[i].worst());
        prev = r;
        first = false;
    }
}

TEST_CASE("multicast branches share the delay of common hops")
{
    const long C = 100000000;
    json doc;
    doc["nodes"] = json::array({netgen::node("a", false), netgen::node("b", false), netgen::node("c", false),
                                netgen::node("sw", true)});
    doc["links"] = json::array({netgen::link("a", "sw", C), netgen::link("sw", "b", C), netgen::link("sw", "c", C)});
    json slopes = json::array({30000000});
    json ws = json::array({json::array({0, 50})});
    doc["ports"] = json::array({netgen::port("a", "sw", 400, ws, slopes), netgen::port("sw", "b", 400, ws, slopes),
                                netgen::port("sw", "c", 400, json::array(), slopes)});
    doc["flows"] = json::array(
        {netgen::flow("m", 1, 8000, 1000, json::array({json::array({"a>sw", "sw>b"}), json::array({"a>sw", "sw>c"})})),
         netgen::flow("u", 1, 2000, 500, json::array({json::array({"a>sw", "sw>b"})}))});
    doc["d_tech_us"] = 1;
    doc["be_max_frame_bits"] = 12336;
    DelayReport r = run(doc, CreditMode::Frozen);
    const FlowDelay& m = r.flow("m");
    REQUIRE(m.routes.size() == 2);
    CHECK(m.routes[0].hop_delays[0] == m.routes[1].hop_delays[0]);
    CHECK(m.routes[0].hop_delays[1] > m.routes[1].hop_delays[1]);  // sw>c has no ST and one flow
    CHECK(m.worst() == m.routes[0].e2e);
    CHECK(r.flow("u").routes[0].hop_delays == m.routes[0].hop_delays);
}

TEST_CASE("modes agree when guard bands are forced to zero")
{
    json doc = line(json::array({json::array({0, 100}), json::array({250, 60})}), 2);
    Network net = Network::validate(parse_config(doc));
    DelayReport f = analyze(net, {CreditMode::Frozen, Shaping::Full, false, true});
    DelayReport n = analyze(net, {CreditMode::NonFrozen, Shaping::Full, false, true});
    DelayReport real = analyze(net, {CreditMode::Frozen, Shaping::Full, false, false});
    for (std::size_t i = 0; i < f.flows.size(); ++i) {
        CHECK(f.flows[i].worst() == n.flows[i].worst());
        CHECK(f.flows[i].worst() < real.flows[i].worst());
    }
}
