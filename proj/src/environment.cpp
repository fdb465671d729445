#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

constexpr int kMaxDirichletRejections = 1000000;

void check_lattice_dim(int d) {
    if (d < 2 || d > kMaxDim) throw ValidationError("environment dimension out of range");
}

std::uint64_t fold_double(std::uint64_t h, double x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    return hash_combine(h, bits);
}

}  // namespace

EnvironmentLaw EnvironmentLaw::deterministic_drift(int d, double kappa) {
    check_lattice_dim(d);
    if (!(kappa > 0.0) || !(kappa <= 1.0 / (2.0 * d))) {
        throw ValidationError("kappa must lie in (0, 1/(2d)]");
    }
    EnvironmentLaw law;
    law.d_ = d;
    law.kind_ = LawKind::deterministic_drift;
    law.kappa_ = kappa;
    law.law_hash_ = fold_double(hash_combine(0x1, static_cast<std::uint64_t>(d)), kappa);
    return law;
}

EnvironmentLaw EnvironmentLaw::epsilon_biased(int d, double delta, double kappa) {
    check_lattice_dim(d);
    if (!(kappa > 0.0) || !(kappa <= 1.0 / (2.0 * d))) {
        throw ValidationError("kappa must lie in (0, 1/(2d)]");
    }
    if (!(delta > 0.0)) throw ValidationError("epsilon-biased law needs delta > 0");
    const double off_axis = 1.0 / (2.0 * d) - delta / (2.0 * d - 1.0);
    if (off_axis < kappa) {
        throw ValidationError("epsilon-biased law violates ellipticity: 1/(2d) - delta/(2d-1) < kappa");
    }
    EnvironmentLaw law;
    law.d_ = d;
    law.kind_ = LawKind::epsilon_biased;
    law.kappa_ = kappa;
    law.delta_ = delta;
    law.law_hash_ = fold_double(fold_double(hash_combine(0x2, static_cast<std::uint64_t>(d)), kappa), delta);
    return law;
}

EnvironmentLaw EnvironmentLaw::dirichlet(int d, std::vector<double> alpha, double kappa) {
    check_lattice_dim(d);
    if (!(kappa > 0.0) || !(kappa <= 1.0 / (2.0 * d))) {
        throw ValidationError("kappa must lie in (0, 1/(2d)]");
    }
    if (alpha.size() != static_cast<std::size_t>(2 * d)) {
        throw ValidationError("dirichlet law needs a length-2d alpha vector");
    }
    for (double a : alpha) {
        if (!(a > 0.0)) throw ValidationError("dirichlet parameters must be positive");
    }
    EnvironmentLaw law;
    law.d_ = d;
    law.kind_ = LawKind::dirichlet;
    law.kappa_ = kappa;
    law.alpha_ = std::move(alpha);
    std::uint64_t h = hash_combine(0x3, static_cast<std::uint64_t>(d));
    h = fold_double(h, kappa);
    for (double a : law.alpha_) h = fold_double(h, a);
    law.law_hash_ = h;
    return law;
}

const char* EnvironmentLaw::tag() const {
    switch (kind_) {
        case LawKind::deterministic_drift: return "drift";
        case LawKind::epsilon_biased: return "epsbias";
        case LawKind::dirichlet: return "dirichlet";
    }
    return "unknown";
}

SiteKernel EnvironmentLaw::sample(const Site& site, std::uint64_t seed) const {
    SiteKernel k;
    k.d = d_;
    const int n = 2 * d_;
    switch (kind_) {
        case LawKind::deterministic_drift: {
            for (int i = 1; i < n; ++i) k.p[i] = kappa_;
            k.p[0] = 1.0 - (n - 1) * kappa_;
            return k;
        }
        case LawKind::epsilon_biased: {
            const double off = 1.0 / n - delta_ / (n - 1);
            for (int i = 1; i < n; ++i) k.p[i] = off;
            k.p[0] = 1.0 / n + delta_;
            return k;
        }
        case LawKind::dirichlet: {
            Rng rng(site_key(seed ^ law_hash_, site, d_));
            for (int trial = 0; trial < kMaxDirichletRejections; ++trial) {
                double sum = 0.0;
                for (int i = 0; i < n; ++i) {
                    k.p[i] = rng.next_gamma(alpha_[static_cast<std::size_t>(i)]);
                    sum += k.p[i];
                }
                double min_entry = 1.0;
                for (int i = 0; i < n; ++i) {
                    k.p[i] /= sum;
                    min_entry = std::min(min_entry, k.p[i]);
                }
                if (min_entry >= kappa_) return k;
            }
            throw NumericalError("dirichlet kappa-truncation exceeded rejection cap");
        }
    }
    throw ValidationError("unknown environment law");
}

const SiteKernel& Environment::kernel(const Site& site) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(site);
    if (it == cache_.end()) {
        it = cache_.emplace(site, law_.sample(site, master_seed_)).first;
    }
    return it->second;  // element references survive rehashing
}

std::size_t Environment::realized_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

double ellipticity_check(const Environment& env, const std::vector<Site>& region) {
    if (region.empty()) throw ValidationError("ellipticity check needs a nonempty region");
    double min_entry = 1.0;
    for (const Site& s : region) {
        min_entry = std::min(min_entry, env.kernel(s).min_entry());
    }
    if (min_entry < env.law().kappa()) {
        throw NumericalError("ellipticity violated: law produced an entry below kappa");
    }
    return min_entry;
}

const SiteKernel* EnvironmentSnapshot::find(const Site& site) const {
    auto it = std::lower_bound(kernels.begin(), kernels.end(), site,
                               [](const auto& kv, const Site& s) { return kv.first < s; });
    if (it == kernels.end() || !(it->first == site)) return nullptr;
    return &it->second;
}

void save_environment(const Environment& env, const std::vector<Site>& region,
                      const std::string& path) {
    std::vector<Site> sites = region;
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

    std::ofstream out(path);
    if (!out) throw IoError("cannot open snapshot file for writing: " + path);
    const int d = env.dim();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", env.law().kappa());
    out << "RWRE-ENV v1 d=" << d << " law=" << env.law().tag() << " kappa=" << buf
        << " seed=" << env.master_seed() << "\n";
    for (const Site& s : sites) {
        const SiteKernel& k = env.kernel(s);
        for (int i = 0; i < d; ++i) {
            if (i) out << ',';
            out << s.c[i];
        }
        for (int i = 0; i < 2 * d; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", k.p[i]);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failure on snapshot file: " + path);
}

EnvironmentSnapshot load_environment(const std::string& path, int expected_dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw IoError("snapshot file is empty: " + path);

    EnvironmentSnapshot snap;
    {
        std::istringstream hs(header);
        std::string magic, field;
        hs >> magic >> field;
        if (magic != "RWRE-ENV" || field != "v1") throw IoError("malformed snapshot header");
        auto take = [&](const std::string& key) {
            std::string tok;
            if (!(hs >> tok) || tok.rfind(key + "=", 0) != 0) {
                throw IoError("malformed snapshot header: missing " + key);
            }
            return tok.substr(key.size() + 1);
        };
        snap.d = std::stoi(take("d"));
        snap.law_tag = take("law");
        snap.kappa = std::stod(take("kappa"));
        snap.master_seed = std::stoull(take("seed"));
    }
    if (snap.d < 2 || snap.d > kMaxDim) throw IoError("snapshot dimension out of range");
    if (expected_dim != 0 && snap.d != expected_dim) {
        throw IoError("snapshot dimension mismatch: file has d=" + std::to_string(snap.d) +
                      ", expected d=" + std::to_string(expected_dim));
    }

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        Site s{};
        SiteKernel k;
        k.d = snap.d;
        std::string cell;
        for (int i = 0; i < snap.d; ++i) {
            if (!std::getline(ls, cell, ',')) throw IoError("malformed snapshot row " + std::to_string(line_no));
            s.c[i] = static_cast<std::int32_t>(std::stol(cell));
        }
        double sum = 0.0;
        for (int i = 0; i < 2 * snap.d; ++i) {
            if (!std::getline(ls, cell, ',')) throw IoError("malformed snapshot row " + std::to_string(line_no));
            k.p[i] = std::stod(cell);
            sum += k.p[i];
        }
        if (std::getline(ls, cell, ',')) throw IoError("trailing fields in snapshot row " + std::to_string(line_no));
        if (std::abs(sum - 1.0) > 1e-9 || k.min_entry() <= 0.0) {
            throw IoError("snapshot checksum failure: kernel row " + std::to_string(line_no) +
                          " does not form a probability vector");
        }
        snap.kernels.emplace_back(s, k);
    }
    std::sort(snap.kernels.begin(), snap.kernels.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return snap;
}

}  // namespace rwre
