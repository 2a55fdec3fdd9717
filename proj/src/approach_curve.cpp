#include "tangentscope/approach_curve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tangentscope {

ApproachCurve ApproachCurve::nontangential(double c) {
    ApproachCurve a;
    a.kind = Kind::nontangential;
    a.c = c;
    return a;
}

ApproachCurve ApproachCurve::log_tangential(double c, double p) {
    ApproachCurve a;
    a.kind = Kind::log_tangential;
    a.c = c;
    a.p = p;
    return a;
}

ApproachCurve ApproachCurve::power(double c, double alpha) {
    ApproachCurve a;
    a.kind = Kind::power;
    a.c = c;
    a.alpha = alpha;
    return a;
}

ApproachCurve ApproachCurve::table(std::vector<std::pair<double, double>> entries) {
    ApproachCurve a;
    a.kind = Kind::table;
    a.tab = std::move(entries);
    std::sort(a.tab.begin(), a.tab.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    return a;
}

double ApproachCurve::lambda(RadialParam r) const {
    double e = r.eps;
    if (e <= 0.0) throw std::invalid_argument("lambda needs eps > 0");
    switch (kind) {
        case Kind::nontangential: return c * e;
        case Kind::log_tangential: return c * e * std::pow(std::log(1.0 / e), p);
        case Kind::power: return c * std::pow(e, alpha);
        case Kind::table: {
            if (tab.empty()) throw std::invalid_argument("empty curve table");
            // linear interpolation in log(eps); clamp outside the range
            if (e >= tab.front().first) return tab.front().second;
            if (e <= tab.back().first) return tab.back().second;
            for (std::size_t i = 0; i + 1 < tab.size(); ++i) {
                double e0 = tab[i].first, e1 = tab[i + 1].first;
                if (e <= e0 && e >= e1) {
                    double w = (std::log(e) - std::log(e0)) / (std::log(e1) - std::log(e0));
                    return tab[i].second + w * (tab[i + 1].second - tab[i].second);
                }
            }
            return tab.back().second;
        }
    }
    throw std::logic_error("unreachable");
}

RadialParam ApproachCurve::solve_lambda(double target, double eps_lo, double eps_hi) const {
    if (eps_lo > eps_hi) std::swap(eps_lo, eps_hi);
    double f_lo = lambda(RadialParam::from_eps(eps_lo));
    double f_hi = lambda(RadialParam::from_eps(eps_hi));
    bool increasing = f_hi > f_lo; // lambda as a function of eps
    double lo = std::min(f_lo, f_hi), hi = std::max(f_lo, f_hi);
    if (target < lo - 1e-15 * hi || target > hi * (1.0 + 1e-15))
        throw std::invalid_argument("solve_lambda: target not bracketed");
    double a = std::log(eps_lo), b = std::log(eps_hi);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double v = lambda(RadialParam::from_eps(std::exp(m)));
        bool go_up = increasing ? (v < target) : (v > target);
        if (go_up)
            a = m;
        else
            b = m;
    }
    return RadialParam::from_eps(std::exp(0.5 * (a + b)));
}

bool ApproachCurve::validate(const std::vector<RadialParam>& rs) const {
    // positivity plus decay to zero along the sequence; no monotonicity is
    // required (log-tangential curves peak at eps = e^{-p})
    double peak = 0.0;
    for (RadialParam r : rs) {
        double v = lambda(r);
        if (!(v > 0.0)) return false;
        peak = std::max(peak, v);
    }
    if (rs.empty()) return true;
    return lambda(rs.back()) <= 0.1 * peak + 1e-300;
}

std::string ApproachCurve::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::nontangential: os << "nontangential:c=" << c; break;
        case Kind::log_tangential: os << "log:c=" << c << ",p=" << p; break;
        case Kind::power: os << "power:c=" << c << ",alpha=" << alpha; break;
        case Kind::table: os << "table[" << tab.size() << "]"; break;
    }
    return os.str();
}

ApproachCurve ApproachCurve::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad curve spec: " + spec);
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
    }
    auto get = [&](const std::string& k, double dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    };
    if (head == "nontangential") return nontangential(get("c", 1.0));
    if (head == "log") return log_tangential(get("c", 1.0), get("p", 1.0));
    if (head == "power") return power(get("c", 1.0), get("alpha", 0.5));
    throw std::invalid_argument("unknown curve: " + spec);
}

} // namespace tangentscope
