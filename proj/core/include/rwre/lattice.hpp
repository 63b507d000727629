#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

inline constexpr int kMaxDim = 4;

/// Unit lattice direction encoded as a signed axis index in {±1, ..., ±d}.
/// Directions are totally ordered by slot: +1 < -1 < +2 < -2 < ...
class Direction {
public:
    constexpr Direction() = default;
    constexpr explicit Direction(int signed_axis) : value_(signed_axis) {
        if (signed_axis == 0 || std::abs(signed_axis) > kMaxDim) {
            throw std::invalid_argument("direction index out of range");
        }
    }

    static constexpr Direction from_slot(int slot) {
        const int axis = slot / 2 + 1;
        return Direction(slot % 2 == 0 ? axis : -axis);
    }

    [[nodiscard]] constexpr int value() const { return value_; }
    [[nodiscard]] constexpr int axis() const { return std::abs(value_) - 1; }
    [[nodiscard]] constexpr int sign() const { return value_ > 0 ? 1 : -1; }
    [[nodiscard]] constexpr int slot() const { return 2 * axis() + (value_ < 0 ? 1 : 0); }
    [[nodiscard]] constexpr Direction opposite() const { return Direction(-value_); }
    [[nodiscard]] constexpr bool orthogonal_to(Direction o) const { return axis() != o.axis(); }

    [[nodiscard]] std::string name() const {
        return (value_ > 0 ? "+" : "-") + std::to_string(std::abs(value_));
    }

    constexpr bool operator==(const Direction&) const = default;
    constexpr std::strong_ordering operator<=>(const Direction& o) const { return slot() <=> o.slot(); }

private:
    int value_ = 1;
};

/// All 2d directions of Z^d in slot order.
std::vector<Direction> directions(int dim);

/// Lattice point; coordinates beyond the active dimension are zero.
struct Point {
    std::array<int, kMaxDim> c{};

    constexpr Point() = default;
    constexpr Point(int x, int y) : c{x, y, 0, 0} {}
    static Point origin() { return Point{}; }

    [[nodiscard]] constexpr int operator[](std::size_t i) const { return c[i]; }
    constexpr int& operator[](std::size_t i) { return c[i]; }

    [[nodiscard]] constexpr Point step(Direction e) const {
        Point p = *this;
        p.c[static_cast<std::size_t>(e.axis())] += e.sign();
        return p;
    }

    constexpr bool operator==(const Point&) const = default;
    constexpr auto operator<=>(const Point&) const = default;  // lexicographic
};

Point unit(Direction e);
int sup_norm(const Point& p);
int l1_norm(const Point& p);
double l2_norm(const Point& p);
std::string to_string(const Point& p, int dim = 2);

struct PointHash {
    std::size_t operator()(const Point& p) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int v : p.c) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

/// Axis-aligned box [lo, hi] in Z^dim; the sup-norm ball B_R is box(dim, R).
class Box {
public:
    Box() = default;
    Box(int dim, std::array<int, kMaxDim> lo, std::array<int, kMaxDim> hi);
    static Box ball(int dim, int radius);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const std::array<int, kMaxDim>& lo() const { return lo_; }
    [[nodiscard]] const std::array<int, kMaxDim>& hi() const { return hi_; }
    [[nodiscard]] bool contains(const Point& p) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t index(const Point& p) const;  // row-major, requires contains(p)
    [[nodiscard]] Point point(std::size_t index) const;
    [[nodiscard]] std::vector<Point> points() const;  // lexicographic order

private:
    int dim_ = 2;
    std::array<int, kMaxDim> lo_{};
    std::array<int, kMaxDim> hi_{};
    std::array<std::size_t, kMaxDim> stride_{};
};

/// Sites of the ball B_R with sup-norm exactly R.
std::vector<Point> sphere(int dim, int radius);

}  // namespace rwre
