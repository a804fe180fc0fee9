#include "gridseek/mapping.hpp"

#include <algorithm>
#include <deque>

namespace gridseek::mapping {

BevMap::BevMap(int width, int height, double resolution)
    : occupancy_(width, height, CellState::kUnknown),
      semantic_(width, height, -1),
      resolution_(resolution),
      unknown_count_(width * height) {}

const KnownInstance* BevMap::instance(int id) const {
    auto it = instances_.find(id);
    return it == instances_.end() ? nullptr : &it->second;
}

void BevMap::set_cell(Cell c, CellState s, int instance_id) {
    CellState& slot = occupancy_.at(c);
    if (slot == CellState::kUnknown && s != CellState::kUnknown) --unknown_count_;
    slot = s;
    if (instance_id >= 0) {
        semantic_.at(c) = instance_id;
        instances_[instance_id].cells.insert(c);
    }
}

void BevMap::note_instance(const world::InstanceObs& obs, bool is_door) {
    KnownInstance& inst = instances_[obs.id];
    inst.id = obs.id;
    inst.category = obs.category;
    inst.state = obs.state;
    inst.position = obs.position;
    inst.is_door = inst.is_door || is_door;
}

void ViewpointIndex::record(int instance_id, const Pose& pose) {
    auto& list = index_[instance_id];
    if (!list.empty() && list.back().cell == pose.cell) return;
    list.push_back(pose);
}

const std::vector<Pose>& ViewpointIndex::viewpoints(int instance_id) const {
    static const std::vector<Pose> kEmpty;
    auto it = index_.find(instance_id);
    return it == index_.end() ? kEmpty : it->second;
}

bool ViewpointIndex::seen_category(const BevMap& bev, const std::string& category) const {
    for (const auto& [id, poses] : index_) {
        const KnownInstance* inst = bev.instance(id);
        if (inst && inst->category == category) return true;
    }
    return false;
}

void integrate(BevMap& bev, ViewpointIndex& vpi, const world::Observation& obs,
               const std::set<int>& door_ids) {
    for (const auto& cell : obs.cells) {
        if (!bev.in_bounds(cell.cell)) continue;
        bev.set_cell(cell.cell, cell.occupied ? CellState::kOccupied : CellState::kFree,
                     cell.instance);
    }
    for (const auto& inst : obs.instances) {
        bev.note_instance(inst, door_ids.count(inst.id) > 0);
        vpi.record(inst.id, obs.pose);
    }
}

std::vector<Frontier> detect_frontiers(const BevMap& bev, const FrontierConfig& config) {
    const int W = bev.width(), H = bev.height();

    // Unknown components that can escape to the grid border stay "open";
    // everything else is a sealed pocket.
    Grid<int> pocket(W, H, -1);
    std::vector<bool> pocket_open;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (bev.at(x, y) != CellState::kUnknown || pocket.at(x, y) >= 0) continue;
            const int id = static_cast<int>(pocket_open.size());
            bool open = false;
            std::deque<Cell> q{{x, y}};
            pocket.at(x, y) = id;
            while (!q.empty()) {
                Cell c = q.front();
                q.pop_front();
                if (c.x == 0 || c.y == 0 || c.x == W - 1 || c.y == H - 1) open = true;
                for (int k = 0; k < 4; ++k) {
                    Cell n{c.x + kDir4X[k], c.y + kDir4Y[k]};
                    if (!pocket.in_bounds(n) || pocket.at(n) >= 0) continue;
                    if (bev.at(n) != CellState::kUnknown) continue;
                    pocket.at(n) = id;
                    q.push_back(n);
                }
            }
            pocket_open.push_back(open);
        }

    // Frontier cells: free, 4-adjacent to unknown.
    Grid<uint8_t> is_frontier(W, H, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (bev.at(x, y) != CellState::kFree) continue;
            for (int k = 0; k < 4; ++k) {
                Cell n{x + kDir4X[k], y + kDir4Y[k]};
                if (bev.in_bounds(n) && bev.at(n) == CellState::kUnknown) {
                    is_frontier.at(x, y) = 1;
                    break;
                }
            }
        }

    // Cluster by 8-connectivity, raster order for stable ids.
    std::vector<Frontier> out;
    Grid<uint8_t> seen(W, H, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (!is_frontier.at(x, y) || seen.at(x, y)) continue;
            Frontier f;
            std::deque<Cell> q{{x, y}};
            seen.at(x, y) = 1;
            bool outward = false;
            while (!q.empty()) {
                Cell c = q.front();
                q.pop_front();
                f.cells.push_back(c);
                for (int k = 0; k < 4; ++k) {
                    Cell n{c.x + kDir4X[k], c.y + kDir4Y[k]};
                    if (bev.in_bounds(n) && bev.at(n) == CellState::kUnknown &&
                        pocket_open[pocket.at(n)])
                        outward = true;
                }
                for (int k = 0; k < 8; ++k) {
                    Cell n{c.x + kDir8X[k], c.y + kDir8Y[k]};
                    if (!seen.in_bounds(n) || seen.at(n) || !is_frontier.at(n)) continue;
                    seen.at(n) = 1;
                    q.push_back(n);
                }
            }
            if (static_cast<int>(f.cells.size()) < config.min_cluster_cells) continue;
            std::sort(f.cells.begin(), f.cells.end());
            double mx = 0.0, my = 0.0;
            for (const Cell& c : f.cells) {
                mx += c.x;
                my += c.y;
            }
            mx /= static_cast<double>(f.cells.size());
            my /= static_cast<double>(f.cells.size());
            Cell best = f.cells.front();
            double best_d = 1e18;
            for (const Cell& c : f.cells) {
                const double d = (c.x - mx) * (c.x - mx) + (c.y - my) * (c.y - my);
                if (d < best_d - 1e-12) {  // ties keep the lowest (row, col)
                    best_d = d;
                    best = c;
                }
            }
            f.centroid = best;
            f.kind = outward ? FrontierKind::kOutward : FrontierKind::kInterior;
            f.id = static_cast<int>(out.size());
            out.push_back(std::move(f));
        }
    return out;
}

}  // namespace gridseek::mapping
