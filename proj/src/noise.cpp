#include "snls/noise.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "snls/rng.hpp"

namespace snls {

NoiseModel::NoiseModel(int n_modes, double nu, CoeffRule rule, std::vector<double> custom_coeffs,
                       const Grid1D& grid)
    : n_modes_(n_modes), nu_(nu), grid_id_(grid.id()), n_nodes_(grid.n_interior()) {
    if (n_modes < 0) throw std::invalid_argument("NoiseModel: n_modes must be >= 0");
    if (rule == CoeffRule::OneOverEll) {
        q_.resize(static_cast<std::size_t>(n_modes));
        for (int l = 0; l < n_modes; ++l) q_[static_cast<std::size_t>(l)] = 1.0 / (l + 1);
    } else {
        if (custom_coeffs.size() != static_cast<std::size_t>(n_modes)) {
            throw std::invalid_argument("NoiseModel: custom coefficient vector must have length L");
        }
        q_ = std::move(custom_coeffs);
    }
    for (double q : q_) {
        if (!(q > 0.0)) throw std::invalid_argument("NoiseModel: coefficients must be positive");
    }

    // Sine modes vanishing at both endpoints. On (-1,1) this evaluates to
    // sin(l*pi*(x+1)) = (-1)^l sin(l*pi*x): equal in law to sin(l*pi*x)
    // since the Brownian coordinates are symmetric.
    mode_values_.resize(static_cast<std::size_t>(n_modes) * n_nodes_);
    const double scale = 2.0 / (grid.b() - grid.a());
    for (int l = 0; l < n_modes; ++l) {
        for (std::size_t i = 0; i < n_nodes_; ++i) {
            const double x = grid.node(i);
            mode_values_[static_cast<std::size_t>(l) * n_nodes_ + i] =
                std::sin((l + 1) * M_PI * (x - grid.a()) * scale);
        }
    }
}

NoiseModel make_noise_model(int n_modes, double nu, CoeffRule rule, const Grid1D& grid,
                            std::vector<double> custom_coeffs) {
    return NoiseModel(n_modes, nu, rule, std::move(custom_coeffs), grid);
}

WienerPath sample_path(const NoiseModel& model, std::uint64_t seed, double tau,
                       std::size_t n_steps) {
    if (!(tau > 0.0)) throw std::invalid_argument("sample_path: tau must be positive");
    if (n_steps < 1) throw std::invalid_argument("sample_path: n_steps must be >= 1");
    WienerPath path;
    path.tau = tau;
    path.n_steps = n_steps;
    path.n_modes = static_cast<std::size_t>(model.n_modes());
    path.increments.resize(n_steps * path.n_modes);
    const double sigma = std::sqrt(tau);
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (std::size_t l = 0; l < path.n_modes; ++l) {
            path.increments[n * path.n_modes + l] =
                sigma * standard_normal_at(seed, static_cast<std::uint32_t>(l), 0u,
                                           static_cast<std::uint32_t>(n));
        }
    }
    return path;
}

std::vector<double> expand_increment(const NoiseModel& model, const WienerPath& path,
                                     std::size_t step) {
    if (step >= path.n_steps) throw std::out_of_range("expand_increment: step index out of range");
    if (path.n_modes != static_cast<std::size_t>(model.n_modes())) {
        throw std::invalid_argument("expand_increment: path/model mode count mismatch");
    }
    std::vector<double> field(model.n_nodes(), 0.0);
    for (std::size_t l = 0; l < path.n_modes; ++l) {
        const double w = model.nu() * model.coeffs()[l] * path.increment(step, l);
        for (std::size_t i = 0; i < field.size(); ++i) {
            field[i] += w * model.mode_value(static_cast<int>(l), i);
        }
    }
    return field;
}

namespace {

// Pairwise (half-splitting) sum over strided values. The tree of a
// power-of-two group is the composition of the trees of its halves, which
// is what makes coarsen(coarsen(p,2),2) bit-identical to coarsen(p,4).
double tree_sum(const double* v, std::size_t len, std::size_t stride) {
    if (len == 1) return v[0];
    const std::size_t half = len / 2;
    return tree_sum(v, half, stride) + tree_sum(v + half * stride, len - half, stride);
}

} // namespace

WienerPath coarsen(const WienerPath& path, std::size_t factor) {
    if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
    if (path.n_steps % factor != 0) {
        throw std::invalid_argument("coarsen: factor must divide n_steps");
    }
    if (factor == 1) return path;
    WienerPath coarse;
    coarse.tau = static_cast<double>(factor) * path.tau;
    coarse.n_steps = path.n_steps / factor;
    coarse.n_modes = path.n_modes;
    coarse.increments.resize(coarse.n_steps * coarse.n_modes);
    for (std::size_t n = 0; n < coarse.n_steps; ++n) {
        for (std::size_t l = 0; l < path.n_modes; ++l) {
            coarse.increments[n * coarse.n_modes + l] =
                tree_sum(&path.increments[n * factor * path.n_modes + l], factor, path.n_modes);
        }
    }
    return coarse;
}

std::vector<double> f_q(const NoiseModel& model, const Grid1D& grid) {
    if (model.grid_id() != grid.id()) throw std::invalid_argument("f_q: model built on another grid");
    std::vector<double> field(grid.n_interior(), 0.0);
    for (int l = 0; l < model.n_modes(); ++l) {
        const double c = model.nu() * model.coeffs()[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double v = c * model.mode_value(l, i);
            field[i] += v * v;
        }
    }
    return field;
}

void dump_path(const WienerPath& path, std::ostream& os) {
    os << "# tau=" << std::hexfloat << path.tau << std::defaultfloat
       << " n_steps=" << path.n_steps << " n_modes=" << path.n_modes << "\n";
    char buf[40];
    for (std::size_t n = 0; n < path.n_steps; ++n) {
        for (std::size_t l = 0; l < path.n_modes; ++l) {
            std::snprintf(buf, sizeof buf, "%a", path.increment(n, l));
            os << buf << (l + 1 < path.n_modes ? "," : "");
        }
        os << "\n";
    }
}

WienerPath load_path(std::istream& is) {
    WienerPath path;
    std::string header;
    if (!std::getline(is, header) || header.rfind("# tau=", 0) != 0) {
        throw std::runtime_error("load_path: missing header line");
    }
    std::istringstream hs(header.substr(2));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "tau") path.tau = std::strtod(val.c_str(), nullptr);
        else if (key == "n_steps") path.n_steps = std::stoull(val);
        else if (key == "n_modes") path.n_modes = std::stoull(val);
    }
    path.increments.reserve(path.n_steps * path.n_modes);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            path.increments.push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    if (path.increments.size() != path.n_steps * path.n_modes) {
        throw std::runtime_error("load_path: increment table size does not match header");
    }
    return path;
}

} // namespace snls
