#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gridseek {

inline constexpr double kDefaultResolution = 0.075;  // meters per cell
inline constexpr double kSqrt2 = 1.41421356237309514547462185873882845;

struct Cell {
    int x = 0;  // column
    int y = 0;  // row

    friend bool operator==(const Cell&, const Cell&) = default;
    // Ordered by (row, col) so sorted containers scan in raster order.
    friend auto operator<=>(const Cell& a, const Cell& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

inline double cell_dist(Cell a, Cell b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

struct Pose {
    Cell cell;
    double heading = 0.0;  // radians, x-axis = 0, counter-clockwise

    friend bool operator==(const Pose&, const Pose&) = default;
};

// 8-neighborhood, orthogonal moves first.
inline constexpr int kDir8X[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kDir8Y[8] = {0, 0, 1, -1, 1, -1, 1, -1};
inline constexpr int kDir4X[4] = {1, -1, 0, 0};
inline constexpr int kDir4Y[4] = {0, 0, 1, -1};

template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0) throw std::invalid_argument("Grid: nonpositive size");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
    bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }

    T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    T& at(Cell c) { return at(c.x, c.y); }
    const T& at(Cell c) const { return at(c.x, c.y); }

    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    size_t index(Cell c) const { return static_cast<size_t>(c.y) * width_ + c.x; }
    Cell cell(size_t i) const { return {static_cast<int>(i % width_), static_cast<int>(i / width_)}; }

    void fill(const T& v) { data_.assign(data_.size(), v); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

// Exact length of an 8-connected grid path: counts of orthogonal and
// diagonal steps. Keeping the two counts separate makes path-length
// comparisons and sums exact, which the sparsification and A* checks
// rely on.
struct PathCost {
    int64_t ortho = 0;
    int64_t diag = 0;

    double cells() const { return static_cast<double>(ortho) + static_cast<double>(diag) * kSqrt2; }
    double meters(double resolution) const { return cells() * resolution; }

    friend PathCost operator+(PathCost a, PathCost b) { return {a.ortho + b.ortho, a.diag + b.diag}; }
    PathCost& operator+=(PathCost o) {
        ortho += o.ortho;
        diag += o.diag;
        return *this;
    }
    friend bool operator==(const PathCost&, const PathCost&) = default;
    friend bool operator<(PathCost a, PathCost b) { return a.cells() < b.cells(); }
};

inline PathCost step_cost(int dir8) { return dir8 < 4 ? PathCost{1, 0} : PathCost{0, 1}; }

inline double normalize_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace gridseek
