#include "rwre/lattice.hpp"

#include <cmath>

namespace rwre {

std::vector<Direction> directions(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension out of range");
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(2 * dim));
    for (int s = 0; s < 2 * dim; ++s) out.push_back(Direction::from_slot(s));
    return out;
}

Point unit(Direction e) { return Point{}.step(e); }

int sup_norm(const Point& p) {
    int m = 0;
    for (int v : p.c) m = std::max(m, std::abs(v));
    return m;
}

int l1_norm(const Point& p) {
    int s = 0;
    for (int v : p.c) s += std::abs(v);
    return s;
}

double l2_norm(const Point& p) {
    double s = 0;
    for (int v : p.c) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

std::string to_string(const Point& p, int dim) {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) s += ",";
        s += std::to_string(p.c[static_cast<std::size_t>(i)]);
    }
    return s + ")";
}

Box::Box(int dim, std::array<int, kMaxDim> lo, std::array<int, kMaxDim> hi) : dim_(dim), lo_(lo), hi_(hi) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension out of range");
    for (int i = dim; i < kMaxDim; ++i) lo_[static_cast<std::size_t>(i)] = hi_[static_cast<std::size_t>(i)] = 0;
    std::size_t stride = 1;
    for (int i = kMaxDim - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        if (hi_[k] < lo_[k]) throw std::invalid_argument("empty box");
        stride_[k] = stride;
        stride *= static_cast<std::size_t>(hi_[k] - lo_[k] + 1);
    }
}

Box Box::ball(int dim, int radius) {
    if (radius < 0) throw std::invalid_argument("negative radius");
    std::array<int, kMaxDim> lo{}, hi{};
    for (int i = 0; i < dim; ++i) {
        lo[static_cast<std::size_t>(i)] = -radius;
        hi[static_cast<std::size_t>(i)] = radius;
    }
    return Box(dim, lo, hi);
}

bool Box::contains(const Point& p) const {
    for (std::size_t i = 0; i < kMaxDim; ++i) {
        if (p.c[i] < lo_[i] || p.c[i] > hi_[i]) return false;
    }
    return true;
}

std::size_t Box::size() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < kMaxDim; ++i) n *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    return n;
}

std::size_t Box::index(const Point& p) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < kMaxDim; ++i) idx += static_cast<std::size_t>(p.c[i] - lo_[i]) * stride_[i];
    return idx;
}

Point Box::point(std::size_t index) const {
    Point p;
    for (std::size_t i = 0; i < kMaxDim; ++i) {
        p.c[i] = lo_[i] + static_cast<int>(index / stride_[i]);
        index %= stride_[i];
    }
    return p;
}

std::vector<Point> Box::points() const {
    std::vector<Point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
}

std::vector<Point> sphere(int dim, int radius) {
    std::vector<Point> out;
    for (const Point& p : Box::ball(dim, radius).points()) {
        if (sup_norm(p) == radius) out.push_back(p);
    }
    return out;
}

}  // namespace rwre
